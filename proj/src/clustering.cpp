#include "dkanon/clustering.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <unordered_map>
#include <utility>

#include "dkanon/error.hpp"

namespace dkanon {

std::string to_string(StrategyKind kind) {
    switch (kind) {
    case StrategyKind::naive: return "naive";
    case StrategyKind::min_choice: return "min-choice";
    case StrategyKind::max_fanout: return "max-fanout";
    }
    throw InternalError("unknown strategy kind");
}

StrategyKind parse_strategy(const std::string& name) {
    if (name == "naive") return StrategyKind::naive;
    if (name == "min-choice") return StrategyKind::min_choice;
    if (name == "max-fanout") return StrategyKind::max_fanout;
    throw ConfigError("unknown strategy \"" + name +
                      "\" (expected naive, min-choice, or max-fanout)");
}

ConstraintGraph build_graph(const Relation& r, const ConstraintSet& sigma_set) {
    ConstraintGraph g;
    g.vertices.reserve(sigma_set.size());
    for (std::size_t i = 0; i < sigma_set.size(); ++i) {
        g.vertices.push_back({i, sigma_set[i], relevant_tuples(r, sigma_set[i])});
    }
    g.adjacent.assign(g.vertices.size(), {});
    for (std::size_t i = 0; i < g.vertices.size(); ++i) {
        for (std::size_t j = i + 1; j < g.vertices.size(); ++j) {
            const auto& a = g.vertices[i].relevant;
            const auto& b = g.vertices[j].relevant;
            std::vector<TupleId> common;
            std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                                  std::back_inserter(common));
            if (!common.empty()) {
                g.edges.emplace_back(i, j);
                g.adjacent[i].push_back(j);
                g.adjacent[j].push_back(i);
            }
        }
    }
    return g;
}

CandidateEnumerator::CandidateEnumerator(std::vector<TupleId> relevant,
                                         int k,
                                         std::uint32_t lo,
                                         std::optional<std::uint32_t> hi)
    : elems_(std::move(relevant)), k_(static_cast<std::size_t>(k)), lo_(lo) {
    if (k < 1) throw ConfigError("k must be at least 1");
    std::sort(elems_.begin(), elems_.end());
    if (std::adjacent_find(elems_.begin(), elems_.end()) != elems_.end()) {
        throw StructuralError("candidate enumeration over repeated tuple ids");
    }
    hi_ = elems_.size();
    if (hi && static_cast<std::size_t>(*hi) < hi_) hi_ = *hi;
    infeasible_ = lo_ > hi_;
    used_.assign(elems_.size(), 0);
}

void CandidateEnumerator::reset() {
    std::fill(used_.begin(), used_.end(), 0);
    used_count_ = 0;
    covered_ = 0;
    stack_.clear();
    fresh_ = true;
    done_ = false;
}

void CandidateEnumerator::apply(const Frame& f) {
    used_[f.cands[f.ci]] = 1;
    for (std::size_t c : f.comb) used_[f.cands[c]] = 1;
    used_count_ += f.s;
    covered_ += f.s;
}

void CandidateEnumerator::unapply(const Frame& f) {
    used_[f.cands[f.ci]] = 0;
    for (std::size_t c : f.comb) used_[f.cands[c]] = 0;
    used_count_ -= f.s;
    covered_ -= f.s;
}

bool CandidateEnumerator::next_combination(Frame& f) {
    const std::size_t n = f.cands.size();
    const std::size_t t = f.comb.size();
    std::size_t j = t;
    while (j > 0) {
        --j;
        if (f.comb[j] < n - (t - j)) {
            ++f.comb[j];
            for (std::size_t q = j + 1; q < t; ++q) f.comb[q] = f.comb[q - 1] + 1;
            return true;
        }
    }
    return false;
}

// A cluster of size s is worth taking iff the resulting coverage either lands
// in the window or leaves a gap some further cluster can still close.  Counts
// alone decide this: cluster members are interchangeable, so a position
// failing here has no emission anywhere below it.
bool CandidateEnumerator::viable(std::size_t s, std::size_t unused_total) const {
    const std::size_t t = covered_ + s;
    if (t > hi_) return false;
    if (t >= lo_) return true;
    return hi_ - t >= k_ && unused_total - s >= k_;
}

// Advances f to its next valid (minimum, size, members) position, given that
// f itself is currently unapplied.  A position is valid when the cluster fits
// the size band, keeps total coverage within hi_, and does not strand the
// search below lo_ with no way to close the remaining gap.
bool CandidateEnumerator::position(Frame& f, bool fresh) {
    const std::size_t unused_total = elems_.size() - used_count_;
    if (covered_ + unused_total < lo_) return false;
    if (fresh) {
        f.ci = 0;
        f.s = 0;
    } else if (f.s != 0 && viable(f.s, unused_total) && next_combination(f)) {
        return true;
    }
    while (f.ci < f.cands.size()) {
        const std::size_t max_s = std::min(2 * k_ - 1, f.cands.size() - f.ci);
        bool advanced = false;
        for (std::size_t s = (f.s == 0 ? k_ : f.s + 1); s <= max_s; ++s) {
            if (covered_ + s > hi_) break;
            if (!viable(s, unused_total)) continue;
            f.s = s;
            f.comb.resize(s - 1);
            std::iota(f.comb.begin(), f.comb.end(), f.ci + 1);
            advanced = true;
            break;
        }
        if (advanced) return true;
        ++f.ci;
        f.s = 0;
    }
    return false;
}

bool CandidateEnumerator::push_frame() {
    if (covered_ + k_ > hi_) return false;
    const std::size_t start =
        stack_.empty() ? 0 : stack_.back().cands[stack_.back().ci] + 1;
    Frame f;
    for (std::size_t p = start; p < elems_.size(); ++p) {
        if (!used_[p]) f.cands.push_back(p);
    }
    if (f.cands.size() < k_) return false;
    if (!position(f, true)) return false;
    apply(f);
    stack_.push_back(std::move(f));
    return true;
}

Clustering CandidateEnumerator::current() const {
    std::vector<std::vector<TupleId>> cs;
    cs.reserve(stack_.size());
    for (const Frame& f : stack_) {
        std::vector<TupleId> cluster;
        cluster.reserve(f.s);
        cluster.push_back(elems_[f.cands[f.ci]]);
        for (std::size_t c : f.comb) cluster.push_back(elems_[f.cands[c]]);
        cs.push_back(std::move(cluster));
    }
    return Clustering(std::move(cs));
}

std::optional<Clustering> CandidateEnumerator::next() {
    if (done_) return std::nullopt;
    if (fresh_) {
        fresh_ = false;
        if (infeasible_) {
            done_ = true;
            return std::nullopt;
        }
        if (lo_ == 0) return current();
    }
    while (true) {
        bool positioned = push_frame();
        if (!positioned) {
            while (!stack_.empty()) {
                Frame& f = stack_.back();
                unapply(f);
                if (position(f, false)) {
                    apply(f);
                    positioned = true;
                    break;
                }
                stack_.pop_back();
            }
            if (!positioned) {
                done_ = true;
                return std::nullopt;
            }
        }
        if (covered_ >= lo_) return current();
    }
}

namespace {

CandidateEnumerator make_enumerator(const ConstraintGraph::Vertex& v, int k) {
    if (v.constraint.range.is_empty()) {
        return CandidateEnumerator({}, k, 1, std::uint32_t{0});
    }
    return CandidateEnumerator(v.relevant, k, v.constraint.range.lo(),
                               v.constraint.range.hi());
}

std::size_t overlap_count(const std::vector<TupleId>& a, const std::vector<TupleId>& b) {
    std::size_t n = 0;
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (*i < *j) ++i;
        else if (*j < *i) ++j;
        else { ++n; ++i; ++j; }
    }
    return n;
}

// Ascending overlap with the neighbourhood, then fewer covered tuples, then
// lexicographic, so the search tries low-interference candidates first.
void order_heuristically(std::vector<Clustering>& cands,
                         const std::vector<TupleId>& adjacent_relevant) {
    std::vector<std::pair<std::pair<std::size_t, std::size_t>, Clustering>> keyed;
    keyed.reserve(cands.size());
    for (Clustering& c : cands) {
        const auto covered = c.covered_ids();
        keyed.emplace_back(std::make_pair(overlap_count(covered, adjacent_relevant),
                                          covered.size()),
                           std::move(c));
    }
    std::sort(keyed.begin(), keyed.end(),
              [](const auto& a, const auto& b) {
                  if (a.first != b.first) return a.first < b.first;
                  return a.second < b.second;
              });
    cands.clear();
    for (auto& kc : keyed) cands.push_back(std::move(kc.second));
}

bool lower_bound_met(const Relation& r, const DiversityConstraint& sigma) {
    if (sigma.range.is_empty()) return false;
    return frequency(r, sigma.target) >= sigma.range.lo();
}

} // namespace

std::vector<Clustering> candidate_clusterings(const Relation& r,
                                              const DiversityConstraint& sigma,
                                              int k,
                                              std::size_t cap,
                                              const std::vector<TupleId>& adjacent_relevant) {
    ConstraintGraph::Vertex v{0, sigma, relevant_tuples(r, sigma)};
    CandidateEnumerator en = make_enumerator(v, k);
    std::vector<Clustering> out;
    std::size_t pulls = 0;
    while (auto c = en.next()) {
        if (++pulls > cap) {
            throw BudgetExceeded("more than " + std::to_string(cap) +
                                 " candidate clusterings for " + sigma.describe());
        }
        out.push_back(std::move(*c));
    }
    order_heuristically(out, adjacent_relevant);
    return out;
}

Clustering merge(const Clustering& a, const Clustering& b) {
    std::vector<const std::vector<TupleId>*> cs;
    for (const auto& c : a.clusters) cs.push_back(&c);
    for (const auto& c : b.clusters) cs.push_back(&c);

    std::vector<std::size_t> parent(cs.size());
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    auto unite = [&](std::size_t x, std::size_t y) { parent[find(x)] = find(y); };

    std::unordered_map<TupleId, std::size_t> owner;
    for (std::size_t i = 0; i < cs.size(); ++i) {
        for (TupleId id : *cs[i]) {
            auto [it, inserted] = owner.emplace(id, i);
            if (!inserted) unite(i, it->second);
        }
    }

    std::unordered_map<std::size_t, std::set<TupleId>> groups;
    for (std::size_t i = 0; i < cs.size(); ++i) {
        auto& bucket = groups[find(i)];
        bucket.insert(cs[i]->begin(), cs[i]->end());
    }
    std::vector<std::vector<TupleId>> merged;
    merged.reserve(groups.size());
    for (auto& [root, ids] : groups) {
        merged.emplace_back(ids.begin(), ids.end());
    }
    return Clustering(std::move(merged));
}

bool consistent(const Clustering& s1, const DiversityConstraint& sig1,
                const Clustering& s2, const DiversityConstraint& sig2,
                const Relation& r) {
    const Relation sub = suppress(r, merge(s1, s2));
    return lower_bound_met(sub, sig1) && lower_bound_met(sub, sig2);
}

namespace {

bool assignment_consistent(const ConstraintGraph& g,
                           const Relation& r,
                           std::size_t v,
                           const Clustering& s,
                           const ColorAssignment& assigned) {
    for (std::size_t u : g.adjacent[v]) {
        auto it = assigned.find(u);
        if (it == assigned.end()) continue;
        if (!consistent(s, g.vertices[v].constraint, it->second,
                        g.vertices[u].constraint, r)) {
            return false;
        }
    }
    return true;
}

// Counts candidates of v consistent with the current assignment, saturating
// at limit.  Enumeration stops at cap pulls; this is a selection heuristic,
// so running out of pulls degrades the count instead of failing the run.
std::size_t consistent_count(const ConstraintGraph& g,
                             const Relation& r,
                             int k,
                             std::size_t v,
                             const ColorAssignment& assigned,
                             std::size_t limit,
                             std::size_t cap) {
    CandidateEnumerator en = make_enumerator(g.vertices[v], k);
    std::size_t count = 0;
    std::size_t pulls = 0;
    while (count < limit && pulls < cap) {
        auto c = en.next();
        if (!c) break;
        ++pulls;
        if (assignment_consistent(g, r, v, *c, assigned)) ++count;
    }
    return count;
}

std::size_t pick_random(const std::vector<std::size_t>& options, std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> dist(0, options.size() - 1);
    return options[dist(rng)];
}

} // namespace

std::optional<std::size_t> next_vertex(const ConstraintGraph& g,
                                       const ColorAssignment& assigned,
                                       const Relation& r,
                                       int k,
                                       const Strategy& strategy,
                                       std::mt19937_64& rng,
                                       const SearchOptions& opts) {
    std::vector<std::size_t> uncolored;
    for (std::size_t v = 0; v < g.size(); ++v) {
        if (assigned.find(v) == assigned.end()) uncolored.push_back(v);
    }
    if (uncolored.empty()) return std::nullopt;
    if (strategy.kind == StrategyKind::naive) return pick_random(uncolored, rng);

    const bool min_choice = strategy.kind == StrategyKind::min_choice;
    const std::size_t probe = std::min(opts.choice_probe_limit, opts.candidate_cap);
    std::vector<std::size_t> best;
    std::size_t best_score = 0;
    for (std::size_t v : uncolored) {
        std::size_t score;
        if (min_choice) {
            score = consistent_count(g, r, k, v, assigned, probe, opts.candidate_cap);
        } else {
            score = 0;
            for (std::size_t u : g.adjacent[v]) {
                if (assigned.find(u) == assigned.end()) ++score;
            }
        }
        const bool better =
            best.empty() || (min_choice ? score < best_score : score > best_score);
        if (better) {
            best.assign(1, v);
            best_score = score;
        } else if (score == best_score) {
            best.push_back(v);
        }
    }
    return pick_random(best, rng);
}

namespace {

class ColoringSearch {
public:
    ColoringSearch(const ConstraintGraph& g, const Relation& r, int k,
                   const Strategy& strategy, const SearchOptions& opts)
        : g_(g), r_(r), k_(k), strategy_(strategy), opts_(opts),
          rng_(strategy.seed), cands_(g.size()), prepared_(g.size(), 0) {}

    std::optional<ColorAssignment> run() {
        if (!recurse()) return std::nullopt;
        return assigned_;
    }

private:
    // A vertex whose full candidate list fits the cap and this memory guard
    // is materialized once and reordered per strategy; anything larger is
    // re-enumerated in canonical order on every activation.
    static constexpr std::size_t kStoredIdGuard = 2000000;

    struct VertexCandidates {
        bool materialized = false;
        std::vector<Clustering> list;
    };

    void prepare(std::size_t v) {
        if (prepared_[v]) return;
        prepared_[v] = 1;
        VertexCandidates& vc = cands_[v];
        CandidateEnumerator en = make_enumerator(g_.vertices[v], k_);
        std::size_t stored_ids = 0;
        while (auto c = en.next()) {
            stored_ids += c->covered_count();
            vc.list.push_back(std::move(*c));
            if (vc.list.size() > opts_.candidate_cap || stored_ids > kStoredIdGuard) {
                vc.list.clear();
                vc.list.shrink_to_fit();
                return;
            }
        }
        vc.materialized = true;
        if (strategy_.kind == StrategyKind::naive) {
            std::shuffle(vc.list.begin(), vc.list.end(), rng_);
        } else {
            std::vector<TupleId> neighbourhood;
            for (std::size_t u : g_.adjacent[v]) {
                const auto& rel = g_.vertices[u].relevant;
                neighbourhood.insert(neighbourhood.end(), rel.begin(), rel.end());
            }
            std::sort(neighbourhood.begin(), neighbourhood.end());
            neighbourhood.erase(std::unique(neighbourhood.begin(), neighbourhood.end()),
                                neighbourhood.end());
            order_heuristically(vc.list, neighbourhood);
        }
    }

    std::size_t pick() {
        auto v = next_vertex(g_, assigned_, r_, k_, strategy_, rng_, opts_);
        return *v;
    }

    bool try_assign(std::size_t v, const Clustering& s) {
        if (!assignment_consistent(g_, r_, v, s, assigned_)) return false;
        assigned_.emplace(v, s);
        if (recurse()) return true;
        assigned_.erase(v);
        return false;
    }

    bool recurse() {
        if (assigned_.size() == g_.size()) return accept_complete();
        const std::size_t v = pick();
        prepare(v);
        if (cands_[v].materialized) {
            for (const Clustering& s : cands_[v].list) {
                if (try_assign(v, s)) return true;
            }
            return false;
        }
        CandidateEnumerator en = make_enumerator(g_.vertices[v], k_);
        std::size_t pulls = 0;
        while (auto s = en.next()) {
            if (++pulls > opts_.candidate_cap) {
                throw BudgetExceeded("more than " + std::to_string(opts_.candidate_cap) +
                                     " candidate clusterings for " +
                                     g_.vertices[v].constraint.describe());
            }
            if (try_assign(v, *s)) return true;
        }
        return false;
    }

    // The pairwise checks only see lower bounds two constraints at a time;
    // the complete assignment must also meet every lower bound jointly, and
    // must leave an uncovered remainder of 0 or >= k tuples so the remainder
    // can still be published k-anonymously.
    bool accept_complete() const {
        Clustering all;
        for (const auto& [v, s] : assigned_) all = merge(all, s);
        const Relation sub = suppress(r_, all);
        for (const auto& vx : g_.vertices) {
            if (!lower_bound_met(sub, vx.constraint)) return false;
        }
        const std::size_t residual = r_.size() - all.covered_count();
        return residual == 0 || residual >= static_cast<std::size_t>(k_);
    }

    const ConstraintGraph& g_;
    const Relation& r_;
    int k_;
    Strategy strategy_;
    SearchOptions opts_;
    std::mt19937_64 rng_;
    ColorAssignment assigned_;
    std::vector<VertexCandidates> cands_;
    std::vector<char> prepared_;
};

} // namespace

std::optional<ColorAssignment> coloring(const ConstraintGraph& g,
                                        const Relation& r,
                                        int k,
                                        const Strategy& strategy,
                                        const SearchOptions& opts) {
    if (k < 1) throw ConfigError("k must be at least 1");
    return ColoringSearch(g, r, k, strategy, opts).run();
}

std::optional<Clustering> diverse_clustering(const Relation& r,
                                             const ConstraintSet& sigma_set,
                                             int k,
                                             const Strategy& strategy,
                                             const SearchOptions& opts) {
    const ConstraintGraph g = build_graph(r, sigma_set);
    auto assignment = coloring(g, r, k, strategy, opts);
    if (!assignment) return std::nullopt;
    Clustering all;
    for (const auto& [v, s] : *assignment) all = merge(all, s);
    return all;
}

} // namespace dkanon
