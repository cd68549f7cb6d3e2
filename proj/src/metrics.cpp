#include "dkanon/metrics.hpp"

#include <algorithm>
#include <random>

#include "dkanon/clustering.hpp"
#include "dkanon/error.hpp"

namespace dkanon {

namespace {

bool fully_qi_suppressed(const Relation& r, TupleId id) {
    const auto& qi = r.schema().qi_indices();
    return std::all_of(qi.begin(), qi.end(), [&](std::size_t a) {
        return r.cell(id, a).is_suppressed();
    });
}

} // namespace

Discernibility discernibility(const Relation& r_anon, int k) {
    (void)k;
    const std::size_t n = r_anon.size();
    if (n == 0) return {};
    Discernibility d;
    for (const auto& group : qi_groups(r_anon)) {
        if (fully_qi_suppressed(r_anon, group.front())) {
            d.disc += group.size() * n;
        } else {
            d.disc += group.size() * group.size();
        }
    }
    d.normalized = static_cast<double>(d.disc) / (static_cast<double>(n) * static_cast<double>(n));
    return d;
}

double accuracy_ratio(const Relation& candidate, const Relation& reference, int k) {
    if (candidate.size() != reference.size()) {
        throw StructuralError("accuracy ratio requires equally sized relations");
    }
    const double cand = discernibility(candidate, k).normalized;
    if (cand == 0.0) return 1.0;
    return discernibility(reference, k).normalized / cand;
}

std::optional<double> conflict_rate(const Relation& r, const ConstraintSet& sigma_set) {
    const std::size_t m = sigma_set.size();
    if (m < 2) return std::nullopt;
    std::vector<std::vector<TupleId>> relevant;
    relevant.reserve(m);
    for (std::size_t i = 0; i < m; ++i) relevant.push_back(relevant_tuples(r, sigma_set[i]));

    double sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            std::vector<TupleId> common;
            std::set_intersection(relevant[i].begin(), relevant[i].end(),
                                  relevant[j].begin(), relevant[j].end(),
                                  std::back_inserter(common));
            const std::size_t uni =
                relevant[i].size() + relevant[j].size() - common.size();
            if (uni != 0) sum += static_cast<double>(common.size()) / static_cast<double>(uni);
        }
    }
    return sum / (static_cast<double>(m) * static_cast<double>(m - 1) / 2.0);
}

std::size_t estimate_published(const Relation& r) {
    if (r.empty()) return 0;
    return r.size() - qi_groups(r).size();
}

namespace {

// One random full partition into cluster sizes [k, 2k-1]: shuffle, then chop
// with sizes drawn uniformly from the choices that leave 0 or >= k tuples.
Clustering random_partition(std::vector<TupleId> ids, std::size_t k, std::mt19937_64& rng) {
    std::shuffle(ids.begin(), ids.end(), rng);
    std::vector<std::vector<TupleId>> clusters;
    std::size_t at = 0;
    while (at < ids.size()) {
        const std::size_t rem = ids.size() - at;
        std::vector<std::size_t> sizes;
        for (std::size_t s = k; s <= std::min(2 * k - 1, rem); ++s) {
            if (rem - s == 0 || rem - s >= k) sizes.push_back(s);
        }
        std::uniform_int_distribution<std::size_t> dist(0, sizes.size() - 1);
        const std::size_t s = sizes[dist(rng)];
        clusters.emplace_back(ids.begin() + at, ids.begin() + at + s);
        at += s;
    }
    return Clustering(std::move(clusters));
}

} // namespace

Relation reference_anonymization(const Relation& r, int k,
                                 std::size_t budget, std::uint64_t seed) {
    if (k < 1) throw ConfigError("k must be at least 1");
    const std::size_t kk = static_cast<std::size_t>(k);
    if (r.empty()) return r;
    if (r.size() < kk) return suppress_all_qi(r);

    std::optional<Relation> best;
    std::size_t best_disc = 0;
    auto consider = [&](const Clustering& s) {
        Relation candidate = suppress(r, s);
        const std::size_t d = discernibility(candidate, k).disc;
        if (!best || d < best_disc) {
            best = std::move(candidate);
            best_disc = d;
        }
    };

    if (r.size() < 9) {
        const auto n = static_cast<std::uint32_t>(r.size());
        CandidateEnumerator en(r.ids(), k, n, n);
        while (auto s = en.next()) consider(*s);
    } else {
        std::mt19937_64 rng(seed);
        for (std::size_t i = 0; i < budget; ++i) consider(random_partition(r.ids(), kk, rng));
    }
    if (!best) throw InternalError("no full partition found for reference anonymization");
    return *best;
}

MetricsReport build_report(const Relation& r_anon, const ConstraintSet& sigma_set, int k) {
    MetricsReport report;
    const Discernibility d = discernibility(r_anon, k);
    report.disc = d.disc;
    report.disc_normalized = d.normalized;
    report.info_loss = information_loss(r_anon);
    for (std::size_t i = 0; i < sigma_set.size(); ++i) {
        const ValidationResult v = validate(r_anon, sigma_set[i]);
        report.per_constraint.push_back({sigma_set[i], v.count, v.satisfied});
    }
    return report;
}

} // namespace dkanon
