#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "dkanon/constraints.hpp"
#include "dkanon/relation.hpp"

namespace dkanon {

enum class StrategyKind { naive, min_choice, max_fanout };

std::string to_string(StrategyKind kind);
StrategyKind parse_strategy(const std::string& name); // throws ConfigError

// Vertex/candidate selection policy for the clustering search.  All random
// choices (naive selection, tie-breaks, naive candidate order) derive from
// the seed, so runs are reproducible.
struct Strategy {
    StrategyKind kind = StrategyKind::min_choice;
    std::uint64_t seed = 0;
};

struct SearchOptions {
    // Maximum candidate clusterings enumerated per constraint in one pass.
    // When a pass would need more, the run fails with BudgetExceeded rather
    // than silently searching an incomplete space.
    std::size_t candidate_cap = 10000;
    // Candidate counts used by the min-choice policy saturate here; exact
    // counts below the limit are what the policy discriminates on.
    std::size_t choice_probe_limit = 256;
};

// One vertex per constraint, in declaration order, with its matching tuples
// cached; an edge joins two constraints whose matching tuples intersect.
struct ConstraintGraph {
    struct Vertex {
        std::size_t id;
        DiversityConstraint constraint;
        std::vector<TupleId> relevant; // ascending
    };

    std::vector<Vertex> vertices;
    std::vector<std::pair<std::size_t, std::size_t>> edges; // i < j
    std::vector<std::vector<std::size_t>> adjacent;         // by vertex id

    std::size_t size() const { return vertices.size(); }
};

ConstraintGraph build_graph(const Relation& r, const ConstraintSet& sigma_set);

// Lazily enumerates, in a fixed canonical order, every clustering whose
// clusters are disjoint subsets of the given tuples with sizes in
// [k, 2k-1] and whose covered-tuple total p satisfies lo <= p <= hi_cap,
// where hi_cap = min(hi, |tuples|).  Families are emitted before their
// extensions, so a first satisfying clustering is found without exploring
// the whole space.
class CandidateEnumerator {
public:
    CandidateEnumerator(std::vector<TupleId> relevant,
                        int k,
                        std::uint32_t lo,
                        std::optional<std::uint32_t> hi);

    std::optional<Clustering> next();
    void reset();

private:
    struct Frame {
        std::vector<std::size_t> cands; // unused positions >= start, ascending
        std::size_t ci = 0;             // index into cands of the cluster minimum
        std::size_t s = 0;              // cluster size
        std::vector<std::size_t> comb;  // indices into cands of the other members
    };

    bool viable(std::size_t s, std::size_t unused_total) const;
    bool position(Frame& f, bool fresh);
    bool next_combination(Frame& f);
    void apply(const Frame& f);
    void unapply(const Frame& f);
    Clustering current() const;
    bool push_frame();

    std::vector<TupleId> elems_;
    std::size_t k_;
    std::size_t lo_;
    std::size_t hi_;
    bool infeasible_ = false;

    std::vector<char> used_;
    std::size_t used_count_ = 0;
    std::size_t covered_ = 0;
    std::vector<Frame> stack_;
    bool fresh_ = true;
    bool done_ = false;
};

// Materializes the candidate clusterings of sigma over r, ordered by
// ascending overlap with adjacent_relevant, then fewer covered tuples, then
// lexicographically.  Throws BudgetExceeded when more than cap candidates
// exist.
std::vector<Clustering> candidate_clusterings(const Relation& r,
                                              const DiversityConstraint& sigma,
                                              int k,
                                              std::size_t cap = 10000,
                                              const std::vector<TupleId>& adjacent_relevant = {});

// Union of two clusterings with transitively overlapping clusters unified.
Clustering merge(const Clustering& a, const Clustering& b);

// Operational pairwise compatibility: the merged clusterings, applied to r,
// must still meet both constraints' lower bounds.  Upper bounds are left to
// the integration step, which can repair them by further suppression.
bool consistent(const Clustering& s1, const DiversityConstraint& sig1,
                const Clustering& s2, const DiversityConstraint& sig2,
                const Relation& r);

using ColorAssignment = std::map<std::size_t, Clustering>;

// Picks the vertex the search branches on next, or nullopt when every vertex
// is colored.  naive: uniformly random uncolored vertex.  min-choice:
// uncolored vertex with the fewest candidates consistent with the current
// assignment.  max-fanout: uncolored vertex with the most uncolored
// neighbors.  Ties break by seeded random choice.
std::optional<std::size_t> next_vertex(const ConstraintGraph& g,
                                       const ColorAssignment& assigned,
                                       const Relation& r,
                                       int k,
                                       const Strategy& strategy,
                                       std::mt19937_64& rng,
                                       const SearchOptions& opts = {});

// Backtracking search for one clustering per constraint such that every
// adjacent pair is consistent and the complete assignment passes a final
// global check: the merged clustering meets every lower bound, and the
// uncovered remainder of r is either empty or at least k tuples (so that
// the residual can itself be made k-anonymous).  A failed global check
// backtracks like an inconsistent assignment.
std::optional<ColorAssignment> coloring(const ConstraintGraph& g,
                                        const Relation& r,
                                        int k,
                                        const Strategy& strategy,
                                        const SearchOptions& opts = {});

// Runs the search and merges the assignment into a single clustering whose
// suppression meets every constraint's lower bound.  nullopt means the
// search space was exhausted without a solution.
std::optional<Clustering> diverse_clustering(const Relation& r,
                                             const ConstraintSet& sigma_set,
                                             int k,
                                             const Strategy& strategy,
                                             const SearchOptions& opts = {});

} // namespace dkanon
