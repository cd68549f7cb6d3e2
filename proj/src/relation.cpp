#include "dkanon/relation.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

namespace dkanon {

namespace {

std::string quote(const std::string& s) { return "'" + s + "'"; }

} // namespace

Schema::Schema(std::vector<std::string> attributes,
               std::vector<std::string> qi,
               std::vector<std::string> sensitive)
    : attributes_(std::move(attributes)) {
    qi_.assign(attributes_.size(), 0);
    sensitive_.assign(attributes_.size(), 0);
    for (std::size_t i = 0; i < attributes_.size(); ++i) {
        if (!index_.emplace(attributes_[i], i).second) {
            throw SchemaError("duplicate attribute " + quote(attributes_[i]));
        }
    }
    for (const auto& name : qi) {
        auto it = index_.find(name);
        if (it == index_.end()) {
            throw SchemaError("unknown attribute " + quote(name) + " in quasi-identifier list");
        }
        if (qi_[it->second]) {
            throw SchemaError("attribute " + quote(name) + " listed twice as quasi-identifier");
        }
        qi_[it->second] = 1;
    }
    for (const auto& name : sensitive) {
        auto it = index_.find(name);
        if (it == index_.end()) {
            throw SchemaError("unknown attribute " + quote(name) + " in sensitive list");
        }
        if (sensitive_[it->second]) {
            throw SchemaError("attribute " + quote(name) + " listed twice as sensitive");
        }
        if (qi_[it->second]) {
            throw SchemaError("attribute " + quote(name) + " cannot be both quasi-identifier and sensitive");
        }
        sensitive_[it->second] = 1;
    }
    for (std::size_t i = 0; i < attributes_.size(); ++i) {
        if (qi_[i]) qi_indices_.push_back(i);
    }
}

std::size_t Schema::index_of(const std::string& attribute) const {
    auto it = index_.find(attribute);
    if (it == index_.end()) {
        throw SchemaError("unknown attribute " + quote(attribute));
    }
    return it->second;
}

bool Schema::has_attribute(const std::string& attribute) const {
    return index_.count(attribute) != 0;
}

Relation::Relation(Schema schema) : schema_(std::move(schema)) {}

Relation::Relation(Schema schema, std::vector<TupleId> ids, std::vector<std::vector<CellValue>> rows)
    : schema_(std::move(schema)), ids_(std::move(ids)), rows_(std::move(rows)) {
    if (ids_.size() != rows_.size()) {
        throw StructuralError("relation id/row count mismatch");
    }
    for (std::size_t i = 0; i < ids_.size(); ++i) {
        check_row(rows_[i]);
        if (!pos_.emplace(ids_[i], i).second) {
            throw StructuralError("duplicate tuple id " + std::to_string(ids_[i]));
        }
    }
}

Relation Relation::from_rows(Schema schema, const std::vector<std::vector<std::string>>& rows) {
    std::vector<TupleId> ids;
    std::vector<std::vector<CellValue>> cells;
    ids.reserve(rows.size());
    cells.reserve(rows.size());
    TupleId next = 1;
    for (const auto& row : rows) {
        std::vector<CellValue> converted;
        converted.reserve(row.size());
        for (const auto& v : row) converted.push_back(CellValue(v));
        ids.push_back(next++);
        cells.push_back(std::move(converted));
    }
    return Relation(std::move(schema), std::move(ids), std::move(cells));
}

void Relation::check_row(const std::vector<CellValue>& cells) const {
    if (cells.size() != schema_.width()) {
        throw StructuralError("row width does not match schema");
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (cells[i].is_suppressed() && !schema_.is_qi(i)) {
            throw StructuralError("suppressed cell outside quasi-identifier attribute " +
                                  quote(schema_.attributes()[i]));
        }
    }
}

const std::vector<CellValue>& Relation::row(TupleId id) const {
    auto it = pos_.find(id);
    if (it == pos_.end()) {
        throw StructuralError("unknown tuple id " + std::to_string(id));
    }
    return rows_[it->second];
}

Relation Relation::restricted_to(const std::vector<TupleId>& keep) const {
    std::unordered_set<TupleId> wanted(keep.begin(), keep.end());
    for (TupleId id : keep) {
        if (!has_id(id)) throw StructuralError("unknown tuple id " + std::to_string(id));
    }
    std::vector<TupleId> ids;
    std::vector<std::vector<CellValue>> rows;
    for (std::size_t i = 0; i < ids_.size(); ++i) {
        if (wanted.count(ids_[i])) {
            ids.push_back(ids_[i]);
            rows.push_back(rows_[i]);
        }
    }
    return Relation(schema_, std::move(ids), std::move(rows));
}

Relation Relation::without(const std::vector<TupleId>& drop) const {
    std::unordered_set<TupleId> dropped(drop.begin(), drop.end());
    std::vector<TupleId> ids;
    std::vector<std::vector<CellValue>> rows;
    for (std::size_t i = 0; i < ids_.size(); ++i) {
        if (!dropped.count(ids_[i])) {
            ids.push_back(ids_[i]);
            rows.push_back(rows_[i]);
        }
    }
    return Relation(schema_, std::move(ids), std::move(rows));
}

Relation Relation::merged(const Relation& a, const Relation& b) {
    if (a.schema_ != b.schema_) {
        throw StructuralError("cannot merge relations with different schemas");
    }
    std::vector<std::pair<TupleId, const std::vector<CellValue>*>> all;
    all.reserve(a.size() + b.size());
    for (std::size_t i = 0; i < a.size(); ++i) all.emplace_back(a.ids_[i], &a.rows_[i]);
    for (std::size_t i = 0; i < b.size(); ++i) all.emplace_back(b.ids_[i], &b.rows_[i]);
    std::sort(all.begin(), all.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    std::vector<TupleId> ids;
    std::vector<std::vector<CellValue>> rows;
    ids.reserve(all.size());
    rows.reserve(all.size());
    for (const auto& [id, row] : all) {
        ids.push_back(id);
        rows.push_back(*row);
    }
    return Relation(a.schema_, std::move(ids), std::move(rows));
}

Clustering::Clustering(std::vector<std::vector<TupleId>> cs) : clusters(std::move(cs)) {
    for (auto& c : clusters) {
        if (c.empty()) throw StructuralError("clustering contains an empty cluster");
        std::sort(c.begin(), c.end());
    }
    std::sort(clusters.begin(), clusters.end());
}

std::size_t Clustering::covered_count() const {
    std::size_t n = 0;
    for (const auto& c : clusters) n += c.size();
    return n;
}

std::vector<TupleId> Clustering::covered_ids() const {
    std::vector<TupleId> ids;
    for (const auto& c : clusters) ids.insert(ids.end(), c.begin(), c.end());
    std::sort(ids.begin(), ids.end());
    return ids;
}

void Clustering::check_against(const Relation& r) const {
    std::unordered_set<TupleId> seen;
    for (const auto& c : clusters) {
        if (c.empty()) throw StructuralError("clustering contains an empty cluster");
        for (TupleId id : c) {
            if (!r.has_id(id)) {
                throw StructuralError("clustering references unknown tuple id " + std::to_string(id));
            }
            if (!seen.insert(id).second) {
                throw StructuralError("clustering clusters overlap on tuple id " + std::to_string(id));
            }
        }
    }
}

namespace {

// Collision-free key for a tuple's QI projection: each cell is emitted as a
// tag byte plus, for concrete values, a length-prefixed payload.
std::string qi_key(const Schema& schema, const std::vector<CellValue>& row) {
    std::string key;
    for (std::size_t i : schema.qi_indices()) {
        const CellValue& cell = row[i];
        if (cell.is_suppressed()) {
            key.push_back('\x01');
        } else {
            key.push_back('\x02');
            const std::string& v = cell.value();
            std::size_t len = v.size();
            for (int b = 0; b < 4; ++b) key.push_back(static_cast<char>((len >> (8 * b)) & 0xff));
            key += v;
        }
    }
    return key;
}

} // namespace

std::vector<std::vector<TupleId>> qi_groups(const Relation& r) {
    std::vector<std::vector<TupleId>> groups;
    std::unordered_map<std::string, std::size_t> by_key;
    for (std::size_t i = 0; i < r.size(); ++i) {
        std::string key = qi_key(r.schema(), r.row_at(i));
        auto [it, inserted] = by_key.emplace(std::move(key), groups.size());
        if (inserted) groups.emplace_back();
        groups[it->second].push_back(r.id_at(i));
    }
    return groups;
}

bool is_k_anonymous(const Relation& r, int k) {
    if (k < 1) throw ConfigError("k must be at least 1");
    for (const auto& g : qi_groups(r)) {
        if (g.size() < static_cast<std::size_t>(k)) return false;
    }
    return true;
}

Relation suppress(const Relation& r, const Clustering& s) {
    s.check_against(r);
    const Schema& schema = r.schema();

    // Suppression pattern per cluster: a QI attribute is kept iff every
    // member agrees on it.
    std::unordered_map<TupleId, const std::vector<char>*> pattern_of;
    std::vector<std::vector<char>> patterns;
    patterns.reserve(s.clusters.size());
    for (const auto& cluster : s.clusters) {
        std::vector<char> star(schema.width(), 0);
        for (std::size_t attr : schema.qi_indices()) {
            const CellValue& first = r.cell(cluster.front(), attr);
            for (std::size_t j = 1; j < cluster.size(); ++j) {
                if (r.cell(cluster[j], attr) != first) {
                    star[attr] = 1;
                    break;
                }
            }
        }
        patterns.push_back(std::move(star));
        for (TupleId id : cluster) pattern_of[id] = &patterns.back();
    }

    std::vector<TupleId> ids;
    std::vector<std::vector<CellValue>> rows;
    for (std::size_t i = 0; i < r.size(); ++i) {
        TupleId id = r.id_at(i);
        auto it = pattern_of.find(id);
        if (it == pattern_of.end()) continue;
        std::vector<CellValue> row = r.row_at(i);
        const std::vector<char>& star = *it->second;
        for (std::size_t attr = 0; attr < row.size(); ++attr) {
            if (star[attr]) row[attr] = CellValue::suppressed();
        }
        ids.push_back(id);
        rows.push_back(std::move(row));
    }
    return Relation(schema, std::move(ids), std::move(rows));
}

Relation suppress_all_qi(const Relation& r) {
    std::vector<TupleId> ids(r.ids());
    std::vector<std::vector<CellValue>> rows;
    rows.reserve(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        std::vector<CellValue> row = r.row_at(i);
        for (std::size_t attr : r.schema().qi_indices()) row[attr] = CellValue::suppressed();
        rows.push_back(std::move(row));
    }
    return Relation(r.schema(), std::move(ids), std::move(rows));
}

std::size_t information_loss(const Relation& r) {
    std::size_t stars = 0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        for (const CellValue& cell : r.row_at(i)) {
            if (cell.is_suppressed()) ++stars;
        }
    }
    return stars;
}

bool is_suppression_of(const Relation& original, const Relation& anonymized) {
    if (original.schema() != anonymized.schema()) {
        throw StructuralError("schema mismatch between original and anonymized relation");
    }
    if (original.size() != anonymized.size()) {
        throw StructuralError("tuple count mismatch between original and anonymized relation");
    }
    for (TupleId id : original.ids()) {
        if (!anonymized.has_id(id)) {
            throw StructuralError("anonymized relation is missing tuple id " + std::to_string(id));
        }
    }
    const Schema& schema = original.schema();
    for (TupleId id : original.ids()) {
        const auto& orig = original.row(id);
        const auto& anon = anonymized.row(id);
        for (std::size_t attr = 0; attr < schema.width(); ++attr) {
            if (anon[attr] == orig[attr]) continue;
            if (anon[attr].is_suppressed() && schema.is_qi(attr)) continue;
            return false;
        }
    }
    return true;
}

} // namespace dkanon
