#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <set>
#include <vector>

#include "dkanon/error.hpp"
#include "dkanon/relation.hpp"
#include "support.hpp"

using namespace dkanon;
using namespace testsup;

TEST_CASE("cell values distinguish suppression from concrete values") {
    const CellValue star = CellValue::suppressed();
    CHECK(star.is_suppressed());
    CHECK(star == CellValue::suppressed());
    CHECK(star != CellValue("Male"));
    CHECK(CellValue("Male") == CellValue("Male"));
    CHECK(CellValue("Male") != CellValue("Female"));
}

TEST_CASE("schema validation") {
    CHECK_THROWS_AS(Schema({"A", "A"}, {"A"}, {}), SchemaError);
    CHECK_THROWS_AS(Schema({"A", "B"}, {"A"}, {"A"}), SchemaError);
    CHECK_THROWS_AS(Schema({"A"}, {"Z"}, {}), SchemaError);
    const Schema s = medical_schema();
    CHECK(s.width() == 6);
    CHECK(s.index_of("CTY") == 4);
    CHECK_THROWS_AS(s.index_of("ZIP"), SchemaError);
    CHECK(s.is_qi(0));
    CHECK(!s.is_qi(5));
    CHECK(s.is_sensitive(5));
    CHECK(s.qi_indices() == std::vector<std::size_t>{0, 1, 2, 3, 4});
}

TEST_CASE("relation construction rejects malformed input") {
    const Schema s = medical_schema();
    CHECK_THROWS_AS(Relation(s, {1, 1},
                             {{CellValue("a"), CellValue("b"), CellValue("c"),
                               CellValue("d"), CellValue("e"), CellValue("f")},
                              {CellValue("a"), CellValue("b"), CellValue("c"),
                               CellValue("d"), CellValue("e"), CellValue("f")}}),
                    StructuralError);
    CHECK_THROWS_AS(Relation(s, {1}, {{CellValue("a")}}), StructuralError);
    // a suppressed cell in the sensitive position is rejected
    CHECK_THROWS_AS(rel_from(s, {{"a", "b", "c", "d", "e", "*"}}), StructuralError);
}

TEST_CASE("qi_groups partitions by QI equality") {
    const auto singletons = qi_groups(medical());
    CHECK(singletons.size() == 10);
    for (const auto& g : singletons) CHECK(g.size() == 1);

    const auto groups = qi_groups(medical_k3());
    REQUIRE(groups.size() == 3);
    std::set<std::set<TupleId>> as_sets;
    for (const auto& g : groups) as_sets.insert(std::set<TupleId>(g.begin(), g.end()));
    CHECK(as_sets.count({1, 2, 3}) == 1);
    CHECK(as_sets.count({4, 5, 6, 7}) == 1);
    CHECK(as_sets.count({8, 9, 10}) == 1);

    CHECK(qi_groups(Relation(medical_schema())).empty());
}

TEST_CASE("is_k_anonymous") {
    CHECK(is_k_anonymous(medical_k3(), 3));
    CHECK(is_k_anonymous(medical_k2(), 2));
    CHECK(!is_k_anonymous(medical(), 2));
    CHECK(is_k_anonymous(medical(), 1));
    CHECK(is_k_anonymous(medical_k3(), 1));
}

TEST_CASE("suppress stars exactly the disagreeing QI cells") {
    const Relation r = medical();

    const Relation pair = suppress(r, Clustering({{5, 6}}));
    REQUIRE(pair.size() == 2);
    for (TupleId id : {TupleId{5}, TupleId{6}}) {
        CHECK(pair.cell(id, 0) == CellValue("Male"));
        CHECK(pair.cell(id, 1) == CellValue("African"));
        CHECK(pair.cell(id, 2).is_suppressed());
        CHECK(pair.cell(id, 3).is_suppressed());
        CHECK(pair.cell(id, 4).is_suppressed());
    }
    CHECK(pair.cell(5, 5) == CellValue("Hypertension"));

    // identical-QI tuples need no stars
    const Relation twins = rel_from(medical_schema(),
                                    {{"F", "A", "1", "P", "C", "d1"},
                                     {"F", "A", "1", "P", "C", "d2"}});
    CHECK(information_loss(suppress(twins, Clustering({{1, 2}}))) == 0);

    // the three diverse clusters reproduce the published lower half
    const Relation lower = suppress(r, Clustering({{5, 6}, {7, 8}, {9, 10}}));
    CHECK(lower == medical_k2().restricted_to({5, 6, 7, 8, 9, 10}));

    CHECK_THROWS_AS(suppress(r, Clustering({{1, 2}, {2, 3}})), StructuralError);
}

TEST_CASE("information_loss counts stars") {
    CHECK(information_loss(medical()) == 0);
    CHECK(information_loss(medical_k2()) == 26);
    CHECK(information_loss(medical_k3()) == 31);
}

TEST_CASE("is_suppression_of") {
    const Relation r = medical();
    CHECK(is_suppression_of(r, medical_k2()));
    CHECK(is_suppression_of(r, medical_k3()));
    CHECK(is_suppression_of(r, r));

    auto rows = std::vector<std::vector<std::string>>{
        {"Female", "Caucasian", "80", "AB", "Calgary", "Hypertension"}};
    rows[0][0] = "Male";  // altered concrete value, not a suppression
    const Relation altered =
        Relation::merged(rel_from(medical_schema(), rows), r.without({1}));
    CHECK(!is_suppression_of(r, altered));

    CHECK_THROWS_AS(is_suppression_of(r, r.restricted_to({1, 2})), StructuralError);
}

TEST_CASE("clustering canonical form and coverage") {
    const Clustering s({{3, 1, 2}, {9, 8}});
    CHECK(s.covered_count() == 5);
    CHECK(s.covered_ids() == std::vector<TupleId>{1, 2, 3, 8, 9});
    CHECK(s == Clustering({{8, 9}, {1, 2, 3}}));
    CHECK_THROWS_AS(Clustering({{1, 2}, {}}), StructuralError);
}

TEST_CASE("suppression properties on random clusterings") {
    std::mt19937_64 rng(20240817);
    for (int round = 0; round < 60; ++round) {
        InstanceOptions opt;
        opt.min_rows = 4;
        opt.max_rows = 12;
        const Relation r = random_relation(rng, opt);

        // random disjoint clustering with sizes in [2,4]
        std::vector<TupleId> pool = r.ids();
        std::shuffle(pool.begin(), pool.end(), rng);
        std::vector<std::vector<TupleId>> clusters;
        std::size_t at = 0;
        std::size_t min_size = 100;
        while (pool.size() - at >= 2) {
            std::size_t size = 2 + rng() % 3;
            size = std::min(size, pool.size() - at);
            if (size < 2) break;
            clusters.emplace_back(pool.begin() + static_cast<std::ptrdiff_t>(at),
                                  pool.begin() + static_cast<std::ptrdiff_t>(at + size));
            min_size = std::min(min_size, size);
            at += size;
            if (rng() % 4 == 0) break;  // leave some tuples uncovered
        }
        if (clusters.empty()) continue;
        const Clustering s(clusters);
        const Relation anon = suppress(r, s);

        CHECK(is_k_anonymous(anon, static_cast<int>(min_size)));
        CHECK(is_suppression_of(r.restricted_to(s.covered_ids()), anon));

        // a cell is starred iff its cluster disagrees on that attribute
        for (const auto& c : s.clusters) {
            for (std::size_t a = 0; a < r.schema().width(); ++a) {
                if (!r.schema().is_qi(a)) continue;
                bool disagree = false;
                for (TupleId id : c) {
                    if (r.row(id)[a] != r.row(c.front())[a]) disagree = true;
                }
                for (TupleId id : c) {
                    CHECK(anon.row(id)[a].is_suppressed() == disagree);
                }
            }
        }

        // merging two clusters never removes stars
        if (s.clusters.size() >= 2) {
            std::vector<std::vector<TupleId>> merged_clusters(s.clusters.begin() + 1,
                                                              s.clusters.end());
            for (TupleId id : s.clusters.front()) merged_clusters.front().push_back(id);
            const Clustering coarser(merged_clusters);
            CHECK(information_loss(suppress(r, coarser)) >=
                  information_loss(suppress(r, s)));
        }
    }
}

TEST_CASE("restricted_to and without partition the relation") {
    const Relation r = medical();
    const Relation head = r.restricted_to({1, 2, 3});
    const Relation tail = r.without({1, 2, 3});
    CHECK(head.size() == 3);
    CHECK(tail.size() == 7);
    CHECK(Relation::merged(head, tail) == r);
}
