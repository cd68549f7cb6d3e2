#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dkanon/constraints.hpp"
#include "dkanon/relation.hpp"

namespace dkanon {

enum class ConstraintClass { minimum, average, proportion };

std::string to_string(ConstraintClass cls);
ConstraintClass parse_constraint_class(const std::string& name); // throws ConfigError

struct GeneratorSpec {
    ConstraintClass cls = ConstraintClass::proportion;
    std::vector<std::string> target_attrs;
    std::uint64_t seed = 0;
};

// Emits one constraint per distinct target-value combination (first
// occurrence order), with bounds set by the chosen class from U (the
// expected publishable-tuple count) and the combination frequencies:
//   minimum:    every combination gets [1,1]; the leftover U-d widens one
//               seeded-random upper bound whose frequency can absorb it.
//   average:    [min(floor(U/d),freq), min(ceil(U/d),freq)], the shortfall
//               widening one seeded-random eligible upper bound.
//   proportion: [floor(U*freq/|R|), ceil(U*freq/|R|)].
// With U < d, every class marks a seeded-random U-subset [1,1] and the rest
// [0,0].  When no single constraint can absorb a widening, it is split
// greedily across constraints by descending frequency.  k >= 1 drops
// constraints whose lower bound is below k (one warning each); k = 0 keeps
// everything.
ConstraintSet generate_constraints(const Relation& r, const GeneratorSpec& spec, int k,
                                   std::vector<std::string>* warnings = nullptr);

} // namespace dkanon
