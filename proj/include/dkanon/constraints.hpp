#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dkanon/relation.hpp"

namespace dkanon {

// A conjunction of attribute = value equalities.  Stored as pairs sorted by
// attribute name, so equality and the strict-subset test are insensitive to
// declaration order.
class Target {
public:
    Target(const std::vector<std::string>& attrs, const std::vector<std::string>& values);

    const std::vector<std::pair<std::string, std::string>>& pairs() const { return pairs_; }
    std::vector<std::string> attributes() const;
    std::vector<std::string> values() const;

    // Strict subset on attribute-value pairs.
    bool strict_subset_of(const Target& other) const;

    std::string describe() const;

    friend bool operator==(const Target& a, const Target& b) { return a.pairs_ == b.pairs_; }
    friend bool operator!=(const Target& a, const Target& b) { return !(a == b); }
    friend bool operator<(const Target& a, const Target& b) { return a.pairs_ < b.pairs_; }

private:
    std::vector<std::pair<std::string, std::string>> pairs_;
};

// A closed-below, possibly unbounded-above frequency interval, with a
// distinguished empty state that only arises during inference.
class FrequencyRange {
public:
    FrequencyRange(std::uint32_t lo, std::optional<std::uint32_t> hi);
    static FrequencyRange unbounded() { return FrequencyRange(0, std::nullopt); }
    static FrequencyRange empty() {
        FrequencyRange r(0, std::uint32_t{0});
        r.empty_ = true;
        return r;
    }

    bool is_empty() const { return empty_; }
    std::uint32_t lo() const { return lo_; }
    const std::optional<std::uint32_t>& hi() const { return hi_; }
    bool has_upper_bound() const { return hi_.has_value(); }

    bool contains(std::uint32_t count) const;
    FrequencyRange intersect(const FrequencyRange& other) const;
    // True iff every count admitted by this range is admitted by outer.
    bool subset_of(const FrequencyRange& outer) const;

    std::string describe() const;

    friend bool operator==(const FrequencyRange& a, const FrequencyRange& b) {
        if (a.empty_ != b.empty_) return false;
        return a.empty_ || (a.lo_ == b.lo_ && a.hi_ == b.hi_);
    }
    friend bool operator!=(const FrequencyRange& a, const FrequencyRange& b) { return !(a == b); }

private:
    std::uint32_t lo_;
    std::optional<std::uint32_t> hi_;
    bool empty_ = false;
};

// Requires the number of tuples matching the target to lie in the range.
struct DiversityConstraint {
    Target target;
    FrequencyRange range;

    DiversityConstraint(Target t, FrequencyRange r) : target(std::move(t)), range(std::move(r)) {}
    DiversityConstraint(const std::vector<std::string>& attrs,
                        const std::vector<std::string>& values,
                        std::uint32_t lo,
                        std::optional<std::uint32_t> hi)
        : target(attrs, values), range(lo, hi) {}

    std::string describe() const;

    friend bool operator==(const DiversityConstraint& a, const DiversityConstraint& b) {
        return a.target == b.target && a.range == b.range;
    }
    friend bool operator!=(const DiversityConstraint& a, const DiversityConstraint& b) { return !(a == b); }
};

// An ordered set of constraints; declaration order is preserved and exact
// duplicates are rejected.
class ConstraintSet {
public:
    ConstraintSet() = default;
    explicit ConstraintSet(std::vector<DiversityConstraint> members);

    const std::vector<DiversityConstraint>& members() const { return members_; }
    std::size_t size() const { return members_.size(); }
    bool empty() const { return members_.empty(); }
    const DiversityConstraint& operator[](std::size_t i) const { return members_[i]; }

    friend bool operator==(const ConstraintSet& a, const ConstraintSet& b) {
        return a.members_ == b.members_;
    }

private:
    std::vector<DiversityConstraint> members_;
};

// Number of tuples whose cells equal the target values on every target
// attribute.  Suppressed cells never match.
std::uint32_t frequency(const Relation& r, const Target& target);

struct ValidationResult {
    bool satisfied;
    std::uint32_t count;
};

ValidationResult validate(const Relation& r, const DiversityConstraint& sigma);
bool validate(const Relation& r, const ConstraintSet& sigma_set);
// As above but checking only lower bounds; used while clustering, where
// upper bounds are repaired later.
bool validate_lower_bounds(const Relation& r, const ConstraintSet& sigma_set);

// The tightest frequency range for `target` that every relation satisfying
// sigma_set must obey.  One pass over the set:
//   equal target          -> intersect with its range
//   target within member  -> counts can only shrink: intersect with [lo, inf)
//   member within target  -> counts can only grow:   intersect with [0, hi]
FrequencyRange narrowed_range(const ConstraintSet& sigma_set, const Target& target);

// True iff every relation satisfying sigma_set satisfies sigma, decided as
// narrowed_range(sigma_set, sigma.target) being contained in sigma's range.
bool implies(const ConstraintSet& sigma_set, const DiversityConstraint& sigma);

// False iff the set narrows some member's target to the empty range.
bool is_satisfiable(const ConstraintSet& sigma_set);

// Greedily removes members implied by the rest, scanning in declaration
// order until a fixpoint.  Input must be satisfiable.
ConstraintSet minimal_cover(const ConstraintSet& sigma_set);

// Ascending ids of tuples matching sigma's target.
std::vector<TupleId> relevant_tuples(const Relation& r, const DiversityConstraint& sigma);

// Rejects targets over unknown or non-quasi-identifier attributes.
void check_against_schema(const ConstraintSet& sigma_set, const Schema& schema);

} // namespace dkanon
