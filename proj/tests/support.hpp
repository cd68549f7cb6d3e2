#pragma once

// Shared fixtures and brute-force oracles for the test binaries.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "dkanon/clustering.hpp"
#include "dkanon/constraints.hpp"
#include "dkanon/relation.hpp"

namespace testsup {

using dkanon::CellValue;
using dkanon::Clustering;
using dkanon::ConstraintSet;
using dkanon::DiversityConstraint;
using dkanon::Relation;
using dkanon::Schema;
using dkanon::TupleId;

// Builds a relation from string rows where "*" stands for a suppressed cell.
inline Relation rel_from(const Schema& schema,
                         const std::vector<std::vector<std::string>>& rows) {
    std::vector<TupleId> ids;
    std::vector<std::vector<CellValue>> cells;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        ids.push_back(static_cast<TupleId>(i + 1));
        std::vector<CellValue> row;
        for (const std::string& v : rows[i]) {
            row.push_back(v == "*" ? CellValue::suppressed() : CellValue(v));
        }
        cells.push_back(std::move(row));
    }
    return Relation(schema, std::move(ids), std::move(cells));
}

inline Schema medical_schema() {
    return Schema({"GEN", "ETH", "AGE", "PRV", "CTY", "DIAG"},
                  {"GEN", "ETH", "AGE", "PRV", "CTY"}, {"DIAG"});
}

// Ten medical records; ids 1..10.
inline Relation medical() {
    return rel_from(medical_schema(),
                    {{"Female", "Caucasian", "80", "AB", "Calgary", "Hypertension"},
                     {"Female", "Caucasian", "32", "AB", "Calgary", "Tuberculosis"},
                     {"Male", "Caucasian", "59", "AB", "Calgary", "Osteoarthritis"},
                     {"Male", "Caucasian", "46", "MB", "Winnipeg", "Migraine"},
                     {"Male", "African", "31", "MB", "Winnipeg", "Hypertension"},
                     {"Male", "African", "43", "BC", "Vancouver", "Seizure"},
                     {"Male", "Caucasian", "29", "BC", "Vancouver", "Hypertension"},
                     {"Female", "Asian", "58", "BC", "Vancouver", "Seizure"},
                     {"Female", "Asian", "47", "MB", "Winnipeg", "Influenza"},
                     {"Female", "Asian", "71", "BC", "Vancouver", "Migraine"}});
}

// A published 2-anonymization of medical(): five QI-groups of two, 26 stars.
inline Relation medical_k2() {
    return rel_from(medical_schema(),
                    {{"Female", "Caucasian", "*", "AB", "Calgary", "Hypertension"},
                     {"Female", "Caucasian", "*", "AB", "Calgary", "Tuberculosis"},
                     {"Male", "Caucasian", "*", "*", "*", "Osteoarthritis"},
                     {"Male", "Caucasian", "*", "*", "*", "Migraine"},
                     {"Male", "African", "*", "*", "*", "Hypertension"},
                     {"Male", "African", "*", "*", "*", "Seizure"},
                     {"*", "*", "*", "BC", "Vancouver", "Hypertension"},
                     {"*", "*", "*", "BC", "Vancouver", "Seizure"},
                     {"Female", "Asian", "*", "*", "*", "Influenza"},
                     {"Female", "Asian", "*", "*", "*", "Migraine"}});
}

// A published 3-anonymization of medical(): QI-group sizes 3, 4, 3.
inline Relation medical_k3() {
    return rel_from(medical_schema(),
                    {{"*", "Caucasian", "*", "AB", "Calgary", "Hypertension"},
                     {"*", "Caucasian", "*", "AB", "Calgary", "Tuberculosis"},
                     {"*", "Caucasian", "*", "AB", "Calgary", "Osteoarthritis"},
                     {"Male", "*", "*", "*", "*", "Migraine"},
                     {"Male", "*", "*", "*", "*", "Hypertension"},
                     {"Male", "*", "*", "*", "*", "Seizure"},
                     {"Male", "*", "*", "*", "*", "Hypertension"},
                     {"Female", "Asian", "*", "*", "*", "Seizure"},
                     {"Female", "Asian", "*", "*", "*", "Influenza"},
                     {"Female", "Asian", "*", "*", "*", "Migraine"}});
}

inline DiversityConstraint sigma1() {
    return DiversityConstraint({"ETH"}, {"Asian"}, 2, 5);
}
inline DiversityConstraint sigma2() {
    return DiversityConstraint({"ETH"}, {"African"}, 1, 3);
}
inline DiversityConstraint sigma3() {
    return DiversityConstraint({"CTY"}, {"Vancouver"}, 2, 4);
}
inline DiversityConstraint sigma4() {
    return DiversityConstraint({"GEN"}, {"Male"}, 1, 3);
}

// Implication walk-through: Σ = {calgary_2_10, fcc_4_7}, query cc_5_8.
inline DiversityConstraint calgary_2_10() {
    return DiversityConstraint({"CTY"}, {"Calgary"}, 2, 10);
}
inline DiversityConstraint fcc_4_7() {
    return DiversityConstraint({"GEN", "ETH", "CTY"}, {"Female", "Caucasian", "Calgary"}, 4, 7);
}
inline DiversityConstraint cc_5_8() {
    return DiversityConstraint({"ETH", "CTY"}, {"Caucasian", "Calgary"}, 5, 8);
}

// Unsatisfiable pair: the specific target demands more than the general allows.
inline DiversityConstraint cc_6_8() {
    return DiversityConstraint({"ETH", "CTY"}, {"Caucasian", "Calgary"}, 6, 8);
}
inline DiversityConstraint calgary_1_5() {
    return DiversityConstraint({"CTY"}, {"Calgary"}, 1, 5);
}

// ---------------------------------------------------------------------------
// Random instances

struct InstanceOptions {
    std::size_t min_rows = 4;
    std::size_t max_rows = 10;
    std::size_t qi_attrs = 3;
    std::size_t domain = 3;
    std::size_t max_constraints = 3;
    std::uint32_t max_lo = 4;
    std::uint32_t max_hi_slack = 3;
    double unbounded_share = 0.3;
    double zero_lo_share = 0.2;
};

inline Schema random_schema(std::size_t qi_attrs) {
    std::vector<std::string> names;
    std::vector<std::string> qi;
    for (std::size_t i = 0; i < qi_attrs; ++i) {
        names.push_back("Q" + std::to_string(i));
        qi.push_back(names.back());
    }
    names.push_back("S0");
    return Schema(names, qi, {"S0"});
}

inline Relation random_relation(std::mt19937_64& rng, const InstanceOptions& opt) {
    const Schema schema = random_schema(opt.qi_attrs);
    std::uniform_int_distribution<std::size_t> rows_dist(opt.min_rows, opt.max_rows);
    std::uniform_int_distribution<std::size_t> val_dist(0, opt.domain - 1);
    const std::size_t n = rows_dist(rng);
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::string> row;
        for (std::size_t a = 0; a < schema.width(); ++a) {
            row.push_back("v" + std::to_string(val_dist(rng)));
        }
        rows.push_back(std::move(row));
    }
    return Relation::from_rows(schema, rows);
}

// Random constraints over the relation's QI attributes; the returned set is
// duplicate-free and range-satisfiable.
inline ConstraintSet random_constraints(std::mt19937_64& rng, const Relation& r,
                                        const InstanceOptions& opt) {
    const auto& qi = r.schema().qi_indices();
    std::uniform_int_distribution<std::size_t> m_dist(1, opt.max_constraints);
    std::uniform_int_distribution<std::size_t> val_dist(0, opt.domain - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int attempt = 0; attempt < 100; ++attempt) {
        std::vector<DiversityConstraint> members;
        const std::size_t m = m_dist(rng);
        for (std::size_t i = 0; i < m; ++i) {
            std::vector<std::size_t> picked(qi.begin(), qi.end());
            std::shuffle(picked.begin(), picked.end(), rng);
            const std::size_t width = 1 + (rng() % 2 != 0 && qi.size() > 1 ? 1 : 0);
            picked.resize(width);
            std::sort(picked.begin(), picked.end());
            std::vector<std::string> attrs;
            std::vector<std::string> values;
            for (std::size_t a : picked) {
                attrs.push_back(r.schema().attributes()[a]);
                values.push_back("v" + std::to_string(val_dist(rng)));
            }
            const std::uint32_t lo = unit(rng) < opt.zero_lo_share
                                         ? 0
                                         : 1 + static_cast<std::uint32_t>(
                                                   rng() % opt.max_lo);
            std::optional<std::uint32_t> hi;
            if (unit(rng) >= opt.unbounded_share) {
                hi = lo + static_cast<std::uint32_t>(rng() % (opt.max_hi_slack + 1));
            }
            DiversityConstraint sigma(attrs, values, lo, hi);
            const bool dup = std::any_of(
                members.begin(), members.end(), [&](const DiversityConstraint& s) {
                    return s.target == sigma.target && s.range == sigma.range;
                });
            if (!dup) members.push_back(std::move(sigma));
        }
        ConstraintSet sigma_set{std::move(members)};
        if (dkanon::is_satisfiable(sigma_set)) return sigma_set;
    }
    return ConstraintSet({sigma1()});
}

// ---------------------------------------------------------------------------
// Brute-force oracles

// Every clustering over `pool` with cluster sizes in [k, 2k-1], disjoint
// clusters, and total covered count in [lo, hi]; plain recursion, no pruning.
inline std::vector<Clustering> all_families(const std::vector<TupleId>& pool, int k,
                                            std::size_t lo, std::size_t hi) {
    std::vector<Clustering> out;
    const std::size_t n = pool.size();
    std::vector<bool> used(n, false);
    std::vector<std::vector<TupleId>> cur;

    auto emit = [&](std::size_t covered) {
        if (covered >= lo && covered <= hi) out.push_back(Clustering(cur));
    };

    std::function<void(std::size_t, std::size_t)> walk = [&](std::size_t pos,
                                                             std::size_t covered) {
        while (pos < n && used[pos]) ++pos;
        if (pos == n) {
            emit(covered);
            return;
        }
        walk(pos + 1, covered);  // pool[pos] stays uncovered

        // pool[pos] opens a new cluster; partners come from later positions
        std::vector<std::size_t> partners;
        std::function<void(std::size_t)> grow = [&](std::size_t from) {
            const std::size_t size = partners.size() + 1;
            if (size >= static_cast<std::size_t>(k) &&
                size <= static_cast<std::size_t>(2 * k - 1)) {
                std::vector<TupleId> cluster{pool[pos]};
                for (std::size_t p : partners) cluster.push_back(pool[p]);
                for (std::size_t p : partners) used[p] = true;
                used[pos] = true;
                cur.push_back(std::move(cluster));
                walk(pos + 1, covered + size);
                cur.pop_back();
                used[pos] = false;
                for (std::size_t p : partners) used[p] = false;
            }
            if (size >= static_cast<std::size_t>(2 * k - 1)) return;
            for (std::size_t next = from; next < n; ++next) {
                if (used[next]) continue;
                partners.push_back(next);
                grow(next + 1);
                partners.pop_back();
            }
        };
        grow(pos + 1);
    };
    walk(0, 0);
    return out;
}

// Fixpoint union of overlapping clusters; independent of the library merge.
inline Clustering naive_merge(const std::vector<Clustering>& picks) {
    std::vector<std::set<TupleId>> cs;
    for (const Clustering& s : picks) {
        for (const auto& c : s.clusters) cs.emplace_back(c.begin(), c.end());
    }
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < cs.size() && !changed; ++i) {
            for (std::size_t j = i + 1; j < cs.size() && !changed; ++j) {
                const bool overlap =
                    std::any_of(cs[i].begin(), cs[i].end(),
                                [&](TupleId t) { return cs[j].count(t) != 0; });
                if (overlap) {
                    cs[i].insert(cs[j].begin(), cs[j].end());
                    cs.erase(cs.begin() + static_cast<std::ptrdiff_t>(j));
                    changed = true;
                }
            }
        }
    }
    std::vector<std::vector<TupleId>> clusters;
    for (const auto& c : cs) clusters.emplace_back(c.begin(), c.end());
    return Clustering(std::move(clusters));
}

// Same acceptance the search applies to a complete assignment: the merged
// suppression meets every lower bound, and the residual is empty or holds at
// least k tuples.
inline bool oracle_accept(const Relation& r, const ConstraintSet& sigma_set,
                          const std::vector<Clustering>& picks, int k) {
    const Clustering merged = naive_merge(picks);
    const Relation s = dkanon::suppress(r, merged);
    for (const DiversityConstraint& sigma : sigma_set.members()) {
        if (sigma.range.is_empty()) return false;
        if (dkanon::frequency(s, sigma.target) < sigma.range.lo()) return false;
    }
    const std::size_t residual = r.size() - merged.covered_count();
    return residual == 0 || residual >= static_cast<std::size_t>(k);
}

// Exhaustive decision oracle: enumerates the full Cartesian product of
// per-constraint clustering candidates over the minimal cover, the same
// problem instance the backtracking search receives.
inline bool oracle_decide(const Relation& r, const ConstraintSet& sigma_in, int k) {
    const ConstraintSet sigma_set = dkanon::minimal_cover(sigma_in);
    if (sigma_set.empty()) {
        return r.empty() || r.size() >= static_cast<std::size_t>(k);
    }
    std::vector<std::vector<Clustering>> lists;
    for (const DiversityConstraint& sigma : sigma_set.members()) {
        if (sigma.range.is_empty()) return false;
        const auto pool = dkanon::relevant_tuples(r, sigma);
        std::size_t hi = pool.size();
        if (sigma.range.hi()) hi = std::min<std::size_t>(hi, *sigma.range.hi());
        lists.push_back(all_families(pool, k, sigma.range.lo(), hi));
        if (lists.back().empty()) return false;
    }
    std::vector<Clustering> picks;
    std::function<bool(std::size_t)> product = [&](std::size_t at) {
        if (at == lists.size()) return oracle_accept(r, sigma_set, picks, k);
        for (const Clustering& s : lists[at]) {
            picks.push_back(s);
            if (product(at + 1)) return true;
            picks.pop_back();
        }
        return false;
    };
    return product(0);
}

}  // namespace testsup
