#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "dkanon/error.hpp"

namespace dkanon {

// Tuple identifiers are assigned at ingestion in file order, starting at 1,
// and are stable across suppression: an anonymized tuple keeps the id of the
// tuple it was derived from.
using TupleId = std::uint32_t;

// A single cell: either a concrete categorical value or the suppression
// marker.  Two suppressed cells compare equal, which is what makes suppressed
// tuples groupable under the quasi-identifier equality used by k-anonymity.
class CellValue {
public:
    static CellValue suppressed() { return CellValue(); }
    explicit CellValue(std::string value) : suppressed_(false), value_(std::move(value)) {}

    bool is_suppressed() const { return suppressed_; }
    const std::string& value() const { return value_; }

    friend bool operator==(const CellValue& a, const CellValue& b) {
        if (a.suppressed_ != b.suppressed_) return false;
        return a.suppressed_ || a.value_ == b.value_;
    }
    friend bool operator!=(const CellValue& a, const CellValue& b) { return !(a == b); }

private:
    CellValue() : suppressed_(true) {}

    bool suppressed_;
    std::string value_;
};

// Attribute names plus their partition into quasi-identifier and sensitive
// attributes.  Attributes outside both sets are carried through untouched.
class Schema {
public:
    Schema(std::vector<std::string> attributes,
           std::vector<std::string> qi,
           std::vector<std::string> sensitive);

    const std::vector<std::string>& attributes() const { return attributes_; }
    std::size_t width() const { return attributes_.size(); }

    std::size_t index_of(const std::string& attribute) const;
    bool has_attribute(const std::string& attribute) const;

    bool is_qi(std::size_t index) const { return qi_[index]; }
    bool is_sensitive(std::size_t index) const { return sensitive_[index]; }
    const std::vector<std::size_t>& qi_indices() const { return qi_indices_; }

    friend bool operator==(const Schema& a, const Schema& b) {
        return a.attributes_ == b.attributes_ && a.qi_ == b.qi_ && a.sensitive_ == b.sensitive_;
    }
    friend bool operator!=(const Schema& a, const Schema& b) { return !(a == b); }

private:
    std::vector<std::string> attributes_;
    std::vector<char> qi_;
    std::vector<char> sensitive_;
    std::vector<std::size_t> qi_indices_;
    std::unordered_map<std::string, std::size_t> index_;
};

// An ordered multiset of tuples over a schema.  Suppressed cells may appear
// only in quasi-identifier positions.
class Relation {
public:
    explicit Relation(Schema schema);
    Relation(Schema schema, std::vector<TupleId> ids, std::vector<std::vector<CellValue>> rows);

    // Builds a relation from concrete string rows, assigning ids 1..n in order.
    static Relation from_rows(Schema schema, const std::vector<std::vector<std::string>>& rows);

    const Schema& schema() const { return schema_; }
    std::size_t size() const { return ids_.size(); }
    bool empty() const { return ids_.empty(); }

    const std::vector<TupleId>& ids() const { return ids_; }
    bool has_id(TupleId id) const { return pos_.count(id) != 0; }

    const std::vector<CellValue>& row(TupleId id) const;
    const std::vector<CellValue>& row_at(std::size_t position) const { return rows_[position]; }
    TupleId id_at(std::size_t position) const { return ids_[position]; }
    const CellValue& cell(TupleId id, std::size_t attr_index) const { return row(id)[attr_index]; }

    // Sub-relations preserve the original tuple order and ids.
    Relation restricted_to(const std::vector<TupleId>& keep) const;
    Relation without(const std::vector<TupleId>& drop) const;

    // Disjoint-id union; the result is ordered by tuple id.
    static Relation merged(const Relation& a, const Relation& b);

    friend bool operator==(const Relation& a, const Relation& b) {
        return a.schema_ == b.schema_ && a.ids_ == b.ids_ && a.rows_ == b.rows_;
    }
    friend bool operator!=(const Relation& a, const Relation& b) { return !(a == b); }

private:
    void check_row(const std::vector<CellValue>& cells) const;

    Schema schema_;
    std::vector<TupleId> ids_;
    std::vector<std::vector<CellValue>> rows_;
    std::unordered_map<TupleId, std::size_t> pos_;
};

// A set of pairwise-disjoint, non-empty tuple clusters.  Kept in canonical
// form: members ascending within a cluster, clusters ordered by smallest
// member.
struct Clustering {
    std::vector<std::vector<TupleId>> clusters;

    Clustering() = default;
    explicit Clustering(std::vector<std::vector<TupleId>> cs);

    std::size_t covered_count() const;
    std::vector<TupleId> covered_ids() const; // ascending

    // Structural validation against a relation: known ids, disjointness,
    // no empty cluster.
    void check_against(const Relation& r) const;

    friend bool operator==(const Clustering& a, const Clustering& b) { return a.clusters == b.clusters; }
    friend bool operator!=(const Clustering& a, const Clustering& b) { return !(a == b); }
    friend bool operator<(const Clustering& a, const Clustering& b) { return a.clusters < b.clusters; }
};

// Maximal sets of tuples with identical quasi-identifier cells, in order of
// first appearance.  Suppressed cells match each other exactly.
std::vector<std::vector<TupleId>> qi_groups(const Relation& r);

// True iff every QI-group has at least k members.  k must be >= 1.
bool is_k_anonymous(const Relation& r, int k);

// Returns the sub-relation containing exactly the clustered tuples, with a
// QI cell suppressed iff its cluster disagrees on that attribute.  Sensitive
// cells are never modified.  Tuples outside the clustering are excluded.
Relation suppress(const Relation& r, const Clustering& s);

// Suppresses every QI cell of every tuple.
Relation suppress_all_qi(const Relation& r);

// Number of suppressed cells.
std::size_t information_loss(const Relation& r);

// True iff anonymized was obtained from original by suppression only: same
// schema, same tuple ids, and every cell either equal to the original or
// suppressed in a QI position.
bool is_suppression_of(const Relation& original, const Relation& anonymized);

} // namespace dkanon
