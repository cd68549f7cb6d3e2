#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dkanon/constraints.hpp"
#include "dkanon/relation.hpp"

namespace dkanon {

struct Discernibility {
    std::size_t disc = 0;
    double normalized = 0.0;
};

// Every tuple is charged the size of its QI-group; a tuple whose QI cells are
// all suppressed is charged the full relation size instead.  Normalized by
// |R|^2 (0 for an empty relation).
Discernibility discernibility(const Relation& r_anon, int k);

// disc_norm(reference) / disc_norm(candidate).  A zero candidate score forces
// a zero reference score, so the ratio is defined as 1 there.
double accuracy_ratio(const Relation& candidate, const Relation& reference, int k);

// Mean Jaccard overlap of relevant-tuple sets over unordered constraint
// pairs; a pair with an empty union scores 0.  Undefined below two
// constraints.
std::optional<double> conflict_rate(const Relation& r, const ConstraintSet& sigma_set);

// Expected number of publishable tuples: |R| minus the count of distinct
// QI-value combinations.
std::size_t estimate_published(const Relation& r);

// Best discernibility found over full partitions of r into clusters of sizes
// [k, 2k-1]: exhaustive below 9 tuples, otherwise `budget` seeded random
// partitions.  Fewer than k tuples can only be published fully suppressed.
Relation reference_anonymization(const Relation& r, int k,
                                 std::size_t budget = 1000,
                                 std::uint64_t seed = 0);

struct ConstraintReport {
    DiversityConstraint constraint;
    std::uint32_t count = 0;
    bool satisfied = false;
};

struct MetricsReport {
    std::size_t disc = 0;
    double disc_normalized = 0.0;
    std::size_t info_loss = 0;
    std::vector<ConstraintReport> per_constraint;
};

MetricsReport build_report(const Relation& r_anon, const ConstraintSet& sigma_set, int k);

} // namespace dkanon
