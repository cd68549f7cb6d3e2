#include "dkanon/constraints.hpp"

#include <algorithm>
#include <set>

namespace dkanon {

Target::Target(const std::vector<std::string>& attrs, const std::vector<std::string>& values) {
    if (attrs.empty()) throw StructuralError("constraint target has no attributes");
    if (attrs.size() != values.size()) {
        throw StructuralError("constraint target attribute/value count mismatch");
    }
    pairs_.reserve(attrs.size());
    for (std::size_t i = 0; i < attrs.size(); ++i) {
        pairs_.emplace_back(attrs[i], values[i]);
    }
    std::sort(pairs_.begin(), pairs_.end());
    for (std::size_t i = 1; i < pairs_.size(); ++i) {
        if (pairs_[i].first == pairs_[i - 1].first) {
            throw StructuralError("constraint target repeats attribute '" + pairs_[i].first + "'");
        }
    }
}

std::vector<std::string> Target::attributes() const {
    std::vector<std::string> out;
    out.reserve(pairs_.size());
    for (const auto& [a, v] : pairs_) out.push_back(a);
    return out;
}

std::vector<std::string> Target::values() const {
    std::vector<std::string> out;
    out.reserve(pairs_.size());
    for (const auto& [a, v] : pairs_) out.push_back(v);
    return out;
}

bool Target::strict_subset_of(const Target& other) const {
    if (pairs_.size() >= other.pairs_.size()) return false;
    return std::includes(other.pairs_.begin(), other.pairs_.end(), pairs_.begin(), pairs_.end());
}

std::string Target::describe() const {
    std::string attrs, values;
    for (const auto& [a, v] : pairs_) {
        if (!attrs.empty()) {
            attrs += ",";
            values += ",";
        }
        attrs += a;
        values += v;
    }
    return "{" + attrs + "}[" + values + "]";
}

FrequencyRange::FrequencyRange(std::uint32_t lo, std::optional<std::uint32_t> hi)
    : lo_(lo), hi_(std::move(hi)) {
    if (hi_ && *hi_ < lo_) {
        throw StructuralError("frequency range lower bound exceeds upper bound");
    }
}

bool FrequencyRange::contains(std::uint32_t count) const {
    if (empty_) return false;
    if (count < lo_) return false;
    return !hi_ || count <= *hi_;
}

FrequencyRange FrequencyRange::intersect(const FrequencyRange& other) const {
    if (empty_ || other.empty_) return empty();
    std::uint32_t lo = std::max(lo_, other.lo_);
    std::optional<std::uint32_t> hi;
    if (hi_ && other.hi_) hi = std::min(*hi_, *other.hi_);
    else if (hi_) hi = hi_;
    else hi = other.hi_;
    if (hi && *hi < lo) return empty();
    return FrequencyRange(lo, hi);
}

bool FrequencyRange::subset_of(const FrequencyRange& outer) const {
    if (empty_) return true;
    if (outer.empty_) return false;
    if (lo_ < outer.lo_) return false;
    if (!outer.hi_) return true;
    return hi_ && *hi_ <= *outer.hi_;
}

std::string FrequencyRange::describe() const {
    if (empty_) return "[empty]";
    std::string upper = hi_ ? std::to_string(*hi_) : "inf";
    return "[" + std::to_string(lo_) + "," + upper + "]";
}

std::string DiversityConstraint::describe() const {
    return target.describe() + range.describe();
}

ConstraintSet::ConstraintSet(std::vector<DiversityConstraint> members)
    : members_(std::move(members)) {
    for (std::size_t i = 0; i < members_.size(); ++i) {
        for (std::size_t j = i + 1; j < members_.size(); ++j) {
            if (members_[i] == members_[j]) {
                throw StructuralError("duplicate constraint " + members_[i].describe());
            }
        }
    }
}

std::uint32_t frequency(const Relation& r, const Target& target) {
    std::vector<std::pair<std::size_t, const std::string*>> needle;
    needle.reserve(target.pairs().size());
    for (const auto& [attr, value] : target.pairs()) {
        needle.emplace_back(r.schema().index_of(attr), &value);
    }
    std::uint32_t count = 0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        const auto& row = r.row_at(i);
        bool match = true;
        for (const auto& [idx, value] : needle) {
            const CellValue& cell = row[idx];
            if (cell.is_suppressed() || cell.value() != *value) {
                match = false;
                break;
            }
        }
        if (match) ++count;
    }
    return count;
}

ValidationResult validate(const Relation& r, const DiversityConstraint& sigma) {
    std::uint32_t count = frequency(r, sigma.target);
    return {sigma.range.contains(count), count};
}

bool validate(const Relation& r, const ConstraintSet& sigma_set) {
    for (const auto& sigma : sigma_set.members()) {
        if (!validate(r, sigma).satisfied) return false;
    }
    return true;
}

bool validate_lower_bounds(const Relation& r, const ConstraintSet& sigma_set) {
    for (const auto& sigma : sigma_set.members()) {
        if (frequency(r, sigma.target) < sigma.range.lo()) return false;
    }
    return true;
}

FrequencyRange narrowed_range(const ConstraintSet& sigma_set, const Target& target) {
    FrequencyRange delta = FrequencyRange::unbounded();
    for (const auto& member : sigma_set.members()) {
        if (member.target == target) {
            delta = delta.intersect(member.range);
        } else if (target.strict_subset_of(member.target)) {
            // The member constrains a more specific population, so at least
            // its lower bound many tuples match the broader target.
            delta = delta.intersect(FrequencyRange(member.range.lo(), std::nullopt));
        } else if (member.target.strict_subset_of(target)) {
            // The member constrains a broader population, so its upper bound
            // caps the count of the more specific target.
            if (member.range.has_upper_bound()) {
                delta = delta.intersect(FrequencyRange(0, member.range.hi()));
            }
        }
    }
    return delta;
}

bool implies(const ConstraintSet& sigma_set, const DiversityConstraint& sigma) {
    return narrowed_range(sigma_set, sigma.target).subset_of(sigma.range);
}

bool is_satisfiable(const ConstraintSet& sigma_set) {
    for (const auto& member : sigma_set.members()) {
        if (narrowed_range(sigma_set, member.target).is_empty()) return false;
    }
    return true;
}

ConstraintSet minimal_cover(const ConstraintSet& sigma_set) {
    if (!is_satisfiable(sigma_set)) {
        throw ConfigError("minimal cover requires a satisfiable constraint set");
    }
    std::vector<DiversityConstraint> kept = sigma_set.members();
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < kept.size(); ++i) {
            std::vector<DiversityConstraint> rest;
            rest.reserve(kept.size() - 1);
            for (std::size_t j = 0; j < kept.size(); ++j) {
                if (j != i) rest.push_back(kept[j]);
            }
            if (implies(ConstraintSet(rest), kept[i])) {
                kept.erase(kept.begin() + static_cast<std::ptrdiff_t>(i));
                changed = true;
                break;
            }
        }
    }
    return ConstraintSet(std::move(kept));
}

std::vector<TupleId> relevant_tuples(const Relation& r, const DiversityConstraint& sigma) {
    std::vector<std::pair<std::size_t, const std::string*>> needle;
    needle.reserve(sigma.target.pairs().size());
    for (const auto& [attr, value] : sigma.target.pairs()) {
        needle.emplace_back(r.schema().index_of(attr), &value);
    }
    std::vector<TupleId> out;
    for (std::size_t i = 0; i < r.size(); ++i) {
        const auto& row = r.row_at(i);
        bool match = true;
        for (const auto& [idx, value] : needle) {
            const CellValue& cell = row[idx];
            if (cell.is_suppressed() || cell.value() != *value) {
                match = false;
                break;
            }
        }
        if (match) out.push_back(r.id_at(i));
    }
    std::sort(out.begin(), out.end());
    return out;
}

void check_against_schema(const ConstraintSet& sigma_set, const Schema& schema) {
    for (const auto& sigma : sigma_set.members()) {
        for (const auto& [attr, value] : sigma.target.pairs()) {
            std::size_t idx = schema.index_of(attr); // throws on unknown attribute
            if (!schema.is_qi(idx)) {
                throw SchemaError("constraint target attribute '" + attr +
                                  "' is not a quasi-identifier");
            }
        }
    }
}

} // namespace dkanon
