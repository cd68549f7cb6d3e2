#include "dkanon/anonymizer.hpp"

#include <algorithm>
#include <limits>
#include <random>

#include "dkanon/error.hpp"

namespace dkanon {

namespace {

// Per-QI-attribute pattern a cluster publishes: the common value, or a
// suppressed cell where members disagree or share only suppression.
std::vector<CellValue> representative(const Relation& r, const std::vector<TupleId>& cluster) {
    const auto& qi = r.schema().qi_indices();
    std::vector<CellValue> rep;
    rep.reserve(qi.size());
    for (std::size_t a : qi) {
        const CellValue& first = r.cell(cluster.front(), a);
        bool agree = !first.is_suppressed();
        for (std::size_t i = 1; agree && i < cluster.size(); ++i) {
            agree = r.cell(cluster[i], a) == first;
        }
        rep.push_back(agree ? first : CellValue::suppressed());
    }
    return rep;
}

std::size_t disagreement(const Relation& r, TupleId t, const std::vector<CellValue>& rep) {
    const auto& qi = r.schema().qi_indices();
    std::size_t d = 0;
    for (std::size_t i = 0; i < qi.size(); ++i) {
        if (rep[i].is_suppressed() || r.cell(t, qi[i]) != rep[i]) ++d;
    }
    return d;
}

std::size_t starred_attrs(const std::vector<CellValue>& rep) {
    std::size_t n = 0;
    for (const CellValue& c : rep) {
        if (c.is_suppressed()) ++n;
    }
    return n;
}

// Stars the cluster would need if it also absorbed t.
std::size_t star_count_with(const Relation& r, const std::vector<CellValue>& rep,
                            std::size_t cluster_size, TupleId t) {
    return (cluster_size + 1) * disagreement(r, t, rep);
}

} // namespace

Clustering anonymize_kmember(const Relation& r, int k, std::uint64_t seed) {
    if (k < 1) throw ConfigError("k must be at least 1");
    if (r.empty()) return Clustering{};

    const std::size_t kk = static_cast<std::size_t>(k);
    if (r.size() < kk) {
        std::vector<TupleId> all = r.ids();
        return Clustering({std::move(all)});
    }

    std::vector<TupleId> pool = r.ids();
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> dist(0, pool.size() - 1);
    TupleId next_seed = pool[dist(rng)];

    std::vector<std::vector<TupleId>> clusters;
    std::vector<std::vector<CellValue>> reps;
    while (true) {
        std::vector<TupleId> cluster{next_seed};
        pool.erase(std::find(pool.begin(), pool.end(), next_seed));
        std::vector<CellValue> rep = representative(r, cluster);
        while (cluster.size() < kk) {
            TupleId best = pool.front();
            std::size_t best_cost = std::numeric_limits<std::size_t>::max();
            for (TupleId t : pool) {
                const std::size_t cost = star_count_with(r, rep, cluster.size(), t);
                if (cost < best_cost || (cost == best_cost && t < best)) {
                    best = t;
                    best_cost = cost;
                }
            }
            cluster.push_back(best);
            pool.erase(std::find(pool.begin(), pool.end(), best));
            rep = representative(r, cluster);
        }
        clusters.push_back(std::move(cluster));
        reps.push_back(std::move(rep));
        if (pool.size() < kk) break;
        TupleId farthest = pool.front();
        std::size_t far_d = 0;
        bool first = true;
        for (TupleId t : pool) {
            const std::size_t d = disagreement(r, t, reps.back());
            if (first || d > far_d || (d == far_d && t < farthest)) {
                farthest = t;
                far_d = d;
                first = false;
            }
        }
        next_seed = farthest;
    }

    std::sort(pool.begin(), pool.end());
    for (TupleId t : pool) {
        std::size_t best_c = 0;
        std::size_t best_inc = std::numeric_limits<std::size_t>::max();
        for (std::size_t c = 0; c < clusters.size(); ++c) {
            const std::size_t current = clusters[c].size() * starred_attrs(reps[c]);
            const std::size_t inc = star_count_with(r, reps[c], clusters[c].size(), t) - current;
            if (inc < best_inc) {
                best_c = c;
                best_inc = inc;
            }
        }
        clusters[best_c].push_back(t);
        reps[best_c] = representative(r, clusters[best_c]);
    }

    return Clustering(std::move(clusters));
}

namespace {

std::vector<std::size_t> target_attr_indices(const Schema& schema, const Target& target) {
    std::vector<std::size_t> idx;
    for (const auto& [attr, value] : target.pairs()) {
        idx.push_back(schema.index_of(attr));
    }
    return idx;
}

Relation star_cells(const Relation& r, const std::vector<TupleId>& ids,
                    const std::vector<std::size_t>& attrs) {
    std::vector<std::vector<CellValue>> rows;
    rows.reserve(r.size());
    for (std::size_t p = 0; p < r.size(); ++p) rows.push_back(r.row_at(p));
    for (TupleId id : ids) {
        auto pos = std::find(r.ids().begin(), r.ids().end(), id) - r.ids().begin();
        for (std::size_t a : attrs) {
            rows[static_cast<std::size_t>(pos)][a] = CellValue::suppressed();
        }
    }
    return Relation(r.schema(), r.ids(), std::move(rows));
}

// A residual group matches a target when its (QI-identical) tuples carry the
// target's concrete values.
bool group_matches(const Relation& joined, const std::vector<TupleId>& group,
                   const Target& target) {
    const Schema& schema = joined.schema();
    for (const auto& [attr, value] : target.pairs()) {
        const CellValue& c = joined.cell(group.front(), schema.index_of(attr));
        if (c.is_suppressed() || c.value() != value) return false;
    }
    return true;
}

std::size_t tuples_matching_other_targets(const Relation& joined,
                                          const std::vector<TupleId>& group,
                                          const ConstraintSet& sigma_set,
                                          std::size_t skip) {
    const Schema& schema = joined.schema();
    std::size_t n = 0;
    for (TupleId id : group) {
        for (std::size_t i = 0; i < sigma_set.size(); ++i) {
            if (i == skip) continue;
            bool match = true;
            for (const auto& [attr, value] : sigma_set[i].target.pairs()) {
                const CellValue& c = joined.cell(id, schema.index_of(attr));
                if (c.is_suppressed() || c.value() != value) {
                    match = false;
                    break;
                }
            }
            if (match) {
                ++n;
                break;
            }
        }
    }
    return n;
}

Relation greedy_repair(Relation joined, const std::vector<std::vector<TupleId>>& rk_groups,
                       const ConstraintSet& sigma_set) {
    // Ascending excess over the upper bound, so the nearly satisfied
    // constraints are repaired before the badly violated ones.
    std::vector<std::pair<std::uint32_t, std::size_t>> violated;
    for (std::size_t i = 0; i < sigma_set.size(); ++i) {
        const auto& sigma = sigma_set[i];
        const std::uint32_t count = frequency(joined, sigma.target);
        if (!sigma.range.has_upper_bound() || sigma.range.is_empty()) continue;
        if (count > *sigma.range.hi()) violated.emplace_back(count - *sigma.range.hi(), i);
    }
    std::stable_sort(violated.begin(), violated.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });

    for (const auto& [excess, i] : violated) {
        const auto& sigma = sigma_set[i];
        const auto attrs = target_attr_indices(joined.schema(), sigma.target);
        while (frequency(joined, sigma.target) > *sigma.range.hi()) {
            const std::vector<TupleId>* chosen = nullptr;
            std::size_t chosen_other = 0;
            for (const auto& g : rk_groups) {
                if (!group_matches(joined, g, sigma.target)) continue;
                const std::size_t other =
                    tuples_matching_other_targets(joined, g, sigma_set, i);
                const bool better =
                    chosen == nullptr || other < chosen_other ||
                    (other == chosen_other &&
                     (g.size() < chosen->size() ||
                      (g.size() == chosen->size() && g < *chosen)));
                if (better) {
                    chosen = &g;
                    chosen_other = other;
                }
            }
            if (chosen == nullptr) break;
            joined = star_cells(joined, *chosen, attrs);
        }
    }
    return joined;
}

Relation exhaustive_repair(const Relation& joined,
                           const std::vector<std::vector<TupleId>>& rk_groups,
                           const ConstraintSet& sigma_set) {
    if (rk_groups.size() > 12) {
        throw ConfigError("exhaustive integration supports at most 12 residual groups");
    }
    struct Pair {
        const std::vector<TupleId>* group;
        std::vector<std::size_t> attrs;
    };
    std::vector<Pair> pairs;
    for (std::size_t i = 0; i < sigma_set.size(); ++i) {
        const auto& sigma = sigma_set[i];
        if (!sigma.range.has_upper_bound() || sigma.range.is_empty()) continue;
        if (frequency(joined, sigma.target) <= *sigma.range.hi()) continue;
        const auto attrs = target_attr_indices(joined.schema(), sigma.target);
        for (const auto& g : rk_groups) {
            if (group_matches(joined, g, sigma.target)) pairs.push_back({&g, attrs});
        }
    }
    if (pairs.size() > 16) {
        throw ConfigError("exhaustive integration search space too large");
    }

    const std::size_t base_loss = information_loss(joined);
    std::optional<Relation> best;
    std::size_t best_added = 0;
    int best_popcount = 0;
    for (std::uint32_t mask = 0; mask < (1u << pairs.size()); ++mask) {
        Relation candidate = joined;
        for (std::size_t p = 0; p < pairs.size(); ++p) {
            if (mask & (1u << p)) {
                candidate = star_cells(candidate, *pairs[p].group, pairs[p].attrs);
            }
        }
        if (!validate(candidate, sigma_set)) continue;
        const std::size_t added = information_loss(candidate) - base_loss;
        const int pc = __builtin_popcount(mask);
        if (!best || added < best_added || (added == best_added && pc < best_popcount)) {
            best = std::move(candidate);
            best_added = added;
            best_popcount = pc;
        }
    }
    if (!best) throw InternalError("integration cannot repair the published relation");
    return *best;
}

} // namespace

Relation integrate(const Relation& r_sigma, const Relation& r_k,
                   const ConstraintSet& sigma_set, IntegrateMode mode) {
    Relation joined = Relation::merged(r_sigma, r_k);
    if (!validate(joined, sigma_set)) {
        const auto rk_groups = qi_groups(r_k);
        joined = mode == IntegrateMode::greedy
                     ? greedy_repair(std::move(joined), rk_groups, sigma_set)
                     : exhaustive_repair(joined, rk_groups, sigma_set);
        if (!validate(joined, sigma_set)) {
            throw InternalError("integration cannot repair the published relation");
        }
    }
    return joined;
}

AnonymizationOutcome diva(const Relation& r, const ConstraintSet& sigma_set,
                          const DivaConfig& cfg) {
    if (cfg.k < 1) throw ConfigError("k must be at least 1");
    if (cfg.candidate_cap < 1) throw ConfigError("candidate cap must be positive");
    check_against_schema(sigma_set, r.schema());
    if (!is_satisfiable(sigma_set)) {
        throw ConfigError("constraint set is unsatisfiable");
    }
    const ConstraintSet sigma = minimal_cover(sigma_set);

    SearchOptions opts;
    opts.candidate_cap = cfg.candidate_cap;
    const auto s_sigma = diverse_clustering(r, sigma, cfg.k, cfg.strategy, opts);
    if (!s_sigma) return AnonymizationOutcome::unsat();

    const Relation r_sigma = suppress(r, *s_sigma);
    const std::vector<TupleId> diverse_ids = s_sigma->covered_ids();
    const Relation residual = r.without(diverse_ids);
    const std::vector<TupleId> residual_ids = residual.ids();

    const Clustering rk = anonymize_kmember(residual, cfg.k, cfg.kmember_seed);
    const Relation r_k = suppress(residual, rk);
    Relation published = integrate(r_sigma, r_k, sigma);
    const std::size_t loss = information_loss(published);

    AnonymizationOutcome out;
    out.result = AnonymizationResult{std::move(published), diverse_ids, residual_ids, loss};
    return out;
}

bool decide(const Relation& r, const ConstraintSet& sigma_set, int k) {
    if (k < 1) throw ConfigError("k must be at least 1");
    check_against_schema(sigma_set, r.schema());
    if (!is_satisfiable(sigma_set)) {
        throw ConfigError("constraint set is unsatisfiable");
    }
    const ConstraintSet sigma = minimal_cover(sigma_set);
    return diverse_clustering(r, sigma, k, Strategy{}, SearchOptions{}).has_value();
}

} // namespace dkanon
