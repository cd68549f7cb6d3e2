#include "dkanon/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dkanon/error.hpp"

namespace dkanon {

namespace {

using nlohmann::json;

constexpr char kSuppressedMark[] = "*";

// One RFC-4180 record; quoted fields may contain commas, doubled quotes, and
// line breaks.  Returns false at end of input.
bool read_record(const std::string& text, std::size_t& at, std::vector<std::string>& fields) {
    fields.clear();
    if (at >= text.size()) return false;
    std::string field;
    bool quoted = false;
    while (true) {
        if (at >= text.size()) {
            fields.push_back(std::move(field));
            return true;
        }
        const char c = text[at];
        if (quoted) {
            if (c == '"') {
                if (at + 1 < text.size() && text[at + 1] == '"') {
                    field.push_back('"');
                    at += 2;
                } else {
                    quoted = false;
                    ++at;
                }
            } else {
                field.push_back(c);
                ++at;
            }
            continue;
        }
        switch (c) {
        case '"':
            quoted = true;
            ++at;
            break;
        case ',':
            fields.push_back(std::move(field));
            field.clear();
            ++at;
            break;
        case '\r':
            if (at + 1 < text.size() && text[at + 1] == '\n') ++at;
            [[fallthrough]];
        case '\n':
            ++at;
            fields.push_back(std::move(field));
            return true;
        default:
            field.push_back(c);
            ++at;
        }
    }
}

bool needs_quoting(const std::string& field) {
    return field.find_first_of(",\"\r\n") != std::string::npos;
}

void append_field(std::string& out, const std::string& field) {
    // An empty field is quoted so that a one-column empty row is never
    // mistaken for a blank line.
    if (!field.empty() && !needs_quoting(field)) {
        out += field;
        return;
    }
    out += '"';
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
}

} // namespace

std::vector<std::string> csv_header(const std::string& text) {
    std::size_t at = 0;
    std::vector<std::string> fields;
    if (!read_record(text, at, fields)) throw ParseError("empty CSV: missing header");
    return fields;
}

Relation parse_csv(const std::string& text, Schema schema, const CsvOptions& options) {
    std::size_t at = 0;
    std::vector<std::string> fields;
    if (!read_record(text, at, fields)) throw ParseError("empty CSV: missing header");
    if (fields != schema.attributes()) {
        throw ParseError("CSV header does not match the schema's attributes");
    }

    std::vector<std::vector<CellValue>> rows;
    std::size_t line = 1;
    while (read_record(text, at, fields)) {
        ++line;
        if (fields.size() == 1 && fields[0].empty()) continue; // blank line
        if (fields.size() != schema.width()) {
            throw ParseError("row " + std::to_string(line) + " has " +
                             std::to_string(fields.size()) + " fields, expected " +
                             std::to_string(schema.width()));
        }
        std::vector<CellValue> row;
        row.reserve(fields.size());
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (fields[i] == kSuppressedMark) {
                if (!options.allow_suppressed) {
                    throw ParseError("row " + std::to_string(line) +
                                     ": the input must be concrete; `*` is the reserved "
                                     "suppression marker");
                }
                if (!schema.is_qi(i)) {
                    throw ParseError("row " + std::to_string(line) + ": `*` in \"" +
                                     schema.attributes()[i] +
                                     "\", which is not a quasi-identifier");
                }
                row.push_back(CellValue::suppressed());
            } else {
                row.push_back(CellValue(fields[i]));
            }
        }
        rows.push_back(std::move(row));
    }

    std::vector<TupleId> ids(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) ids[i] = static_cast<TupleId>(i + 1);
    return Relation(std::move(schema), std::move(ids), std::move(rows));
}

std::string emit_csv(const Relation& r) {
    std::string out;
    const auto& attrs = r.schema().attributes();
    for (std::size_t i = 0; i < attrs.size(); ++i) {
        if (i > 0) out += ',';
        append_field(out, attrs[i]);
    }
    out += '\n';
    for (std::size_t p = 0; p < r.size(); ++p) {
        const auto& row = r.row_at(p);
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i > 0) out += ',';
            if (row[i].is_suppressed()) {
                out += kSuppressedMark;
            } else {
                append_field(out, row[i].value());
            }
        }
        out += '\n';
    }
    return out;
}

namespace {

json parse_json(const std::string& text, const char* what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed ") + what + " JSON: " + e.what());
    }
}

std::vector<std::string> string_list(const json& j, const char* what) {
    if (!j.is_array()) throw ParseError(std::string(what) + " must be an array of strings");
    std::vector<std::string> out;
    for (const auto& v : j) {
        if (!v.is_string()) throw ParseError(std::string(what) + " must be an array of strings");
        out.push_back(v.get<std::string>());
    }
    return out;
}

} // namespace

SchemaSpec parse_schema_json(const std::string& text) {
    const json j = parse_json(text, "schema");
    if (!j.is_object()) throw ParseError("schema JSON must be an object");
    SchemaSpec spec;
    if (j.contains("qi")) spec.qi = string_list(j.at("qi"), "\"qi\"");
    if (j.contains("sensitive")) spec.sensitive = string_list(j.at("sensitive"), "\"sensitive\"");
    return spec;
}

std::string emit_schema_json(const Schema& schema) {
    json qi = json::array();
    json sensitive = json::array();
    for (std::size_t i = 0; i < schema.width(); ++i) {
        if (schema.is_qi(i)) qi.push_back(schema.attributes()[i]);
        if (schema.is_sensitive(i)) sensitive.push_back(schema.attributes()[i]);
    }
    return json{{"qi", std::move(qi)}, {"sensitive", std::move(sensitive)}}.dump(2) + "\n";
}

ConstraintSet parse_constraints_json(const std::string& text) {
    const json j = parse_json(text, "constraint");
    if (!j.is_array()) throw ParseError("constraint JSON must be an array");
    std::vector<DiversityConstraint> members;
    for (const auto& e : j) {
        if (!e.is_object() || !e.contains("attrs") || !e.contains("values") ||
            !e.contains("lo") || !e.contains("hi")) {
            throw ParseError("each constraint needs \"attrs\", \"values\", \"lo\", \"hi\"");
        }
        const auto attrs = string_list(e.at("attrs"), "\"attrs\"");
        const auto values = string_list(e.at("values"), "\"values\"");
        const json& lo = e.at("lo");
        const json& hi = e.at("hi");
        if (!lo.is_number_unsigned()) throw ParseError("\"lo\" must be a non-negative integer");
        if (!hi.is_null() && !hi.is_number_unsigned()) {
            throw ParseError("\"hi\" must be a non-negative integer or null");
        }
        std::optional<std::uint32_t> hi_value;
        if (!hi.is_null()) hi_value = hi.get<std::uint32_t>();
        try {
            members.emplace_back(attrs, values, lo.get<std::uint32_t>(), hi_value);
        } catch (const Error& e2) {
            throw ParseError(std::string("invalid constraint: ") + e2.what());
        }
    }
    try {
        return ConstraintSet(std::move(members));
    } catch (const Error& e2) {
        throw ParseError(std::string("invalid constraint set: ") + e2.what());
    }
}

std::string emit_constraints_json(const ConstraintSet& sigma_set) {
    json out = json::array();
    for (std::size_t i = 0; i < sigma_set.size(); ++i) {
        const auto& sigma = sigma_set[i];
        json e{{"attrs", sigma.target.attributes()},
               {"values", sigma.target.values()},
               {"lo", sigma.range.lo()}};
        e["hi"] = sigma.range.has_upper_bound() ? json(*sigma.range.hi()) : json(nullptr);
        out.push_back(std::move(e));
    }
    return out.dump(2) + "\n";
}

std::string emit_metrics_json(const MetricsReport& report) {
    json constraints = json::array();
    for (const auto& c : report.per_constraint) {
        json e{{"attrs", c.constraint.target.attributes()},
               {"values", c.constraint.target.values()},
               {"lo", c.constraint.range.lo()},
               {"count", c.count},
               {"satisfied", c.satisfied}};
        e["hi"] = c.constraint.range.has_upper_bound() ? json(*c.constraint.range.hi())
                                                       : json(nullptr);
        constraints.push_back(std::move(e));
    }
    json out{{"disc", report.disc},
             {"disc_normalized", report.disc_normalized},
             {"info_loss", report.info_loss},
             {"constraints", std::move(constraints)}};
    return out.dump(2) + "\n";
}

SynthSpec parse_synth_spec_json(const std::string& text) {
    const json j = parse_json(text, "data spec");
    if (!j.is_object() || !j.contains("rows") || !j.contains("attributes")) {
        throw ParseError("data spec JSON needs \"rows\" and \"attributes\"");
    }
    if (!j.at("rows").is_number_unsigned()) {
        throw ParseError("\"rows\" must be a non-negative integer");
    }
    SynthSpec spec;
    spec.rows = j.at("rows").get<std::size_t>();
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned()) {
            throw ParseError("\"seed\" must be a non-negative integer");
        }
        spec.seed = j.at("seed").get<std::uint64_t>();
    }
    if (!j.at("attributes").is_array()) throw ParseError("\"attributes\" must be an array");
    for (const auto& e : j.at("attributes")) {
        if (!e.is_object() || !e.contains("name") || !e.contains("values")) {
            throw ParseError("each attribute needs \"name\" and \"values\"");
        }
        AttrSpec a;
        if (!e.at("name").is_string()) throw ParseError("attribute \"name\" must be a string");
        a.name = e.at("name").get<std::string>();
        a.values = string_list(e.at("values"), "\"values\"");
        if (e.contains("distribution")) {
            if (!e.at("distribution").is_string()) {
                throw ParseError("\"distribution\" must be a string");
            }
            a.dist = parse_distribution(e.at("distribution").get<std::string>());
        }
        if (e.contains("mean")) a.mean = e.at("mean").get<double>();
        if (e.contains("stddev")) a.stddev = e.at("stddev").get<double>();
        if (e.contains("s")) a.zipf_s = e.at("s").get<double>();
        if (e.contains("qi")) {
            if (!e.at("qi").is_boolean()) throw ParseError("\"qi\" must be a boolean");
            a.qi = e.at("qi").get<bool>();
        }
        spec.attributes.push_back(std::move(a));
    }
    return spec;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot read \"" + path + "\"");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write \"" + path + "\"");
    out << content;
    if (!out) throw ParseError("cannot write \"" + path + "\"");
}

} // namespace dkanon
