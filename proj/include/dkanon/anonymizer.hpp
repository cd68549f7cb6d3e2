#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dkanon/clustering.hpp"
#include "dkanon/constraints.hpp"
#include "dkanon/relation.hpp"

namespace dkanon {

struct DivaConfig {
    int k = 2;
    Strategy strategy;
    std::size_t candidate_cap = 10000;
    std::uint64_t kmember_seed = 0;
};

// Either a published relation with its provenance, or the verdict that no
// k-anonymous suppression of the input satisfies the constraints.
struct AnonymizationResult {
    Relation relation;
    std::vector<TupleId> diverse_part_ids;  // ascending
    std::vector<TupleId> residual_part_ids; // ascending
    std::size_t information_loss = 0;
};

struct AnonymizationOutcome {
    std::optional<AnonymizationResult> result;

    bool unsatisfiable() const { return !result.has_value(); }
    static AnonymizationOutcome unsat() { return {}; }
};

// Greedy k-member clustering for suppression-only publishing.  The seed picks
// the first cluster's first tuple; each later cluster starts from the
// unassigned tuple farthest (QI disagreement count, a suppressed
// representative cell counting as disagreement) from the previous cluster's
// representative, then grows by the tuple minimizing the cluster's star count
// until it holds k tuples.  Leftover tuples join the cluster whose star count
// grows least.  With fewer than k tuples the whole relation becomes one
// undersized cluster; suppressing it cannot reach k-anonymity, which only
// suppress_all_qi can give such a relation.
Clustering anonymize_kmember(const Relation& r, int k, std::uint64_t seed);

enum class IntegrateMode { greedy, exhaustive };

// Joins the diverse part and the residual part, then repairs upper-bound
// violations by suppressing the target attributes of whole residual
// QI-groups.  Greedy mode handles violated constraints in ascending
// (count - hi) order and picks groups matching the fewest other constraint
// targets, then smaller groups; exhaustive mode tries group subsets in
// ascending added-star order and is limited to small residuals.  Throws
// InternalError when no such suppression makes the union validate.
Relation integrate(const Relation& r_sigma, const Relation& r_k,
                   const ConstraintSet& sigma_set,
                   IntegrateMode mode = IntegrateMode::greedy);

// Two-phase pipeline: a diverse clustering covers enough tuples to meet every
// constraint's lower bound, the uncovered residual is k-membered, and
// integrate repairs upper bounds.  Rejects an unsatisfiable constraint set
// with ConfigError (distinct from the Unsatisfiable outcome) and drops
// implied constraints before searching.
AnonymizationOutcome diva(const Relation& r, const ConstraintSet& sigma_set,
                          const DivaConfig& cfg);

// Existence only: true iff some k-anonymous suppression of r satisfies the
// constraint set.  Preconditions as diva.
bool decide(const Relation& r, const ConstraintSet& sigma_set, int k);

} // namespace dkanon
