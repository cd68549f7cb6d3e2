#pragma once

#include <string>
#include <vector>

#include "dkanon/constraints.hpp"
#include "dkanon/generator.hpp"
#include "dkanon/metrics.hpp"
#include "dkanon/relation.hpp"
#include "dkanon/synth.hpp"

namespace dkanon {

// CSV with RFC-4180 quoting.  The literal `*` is the reserved suppression
// marker (quoted or not), legal only in quasi-identifier columns; emit writes
// suppressed cells as `*`.  parse(emit(r)) == r.
struct CsvOptions {
    // With false, any `*` cell is rejected; used for ingesting private input,
    // which must be concrete.
    bool allow_suppressed = true;
};

std::vector<std::string> csv_header(const std::string& text);
Relation parse_csv(const std::string& text, Schema schema, const CsvOptions& options = {});
std::string emit_csv(const Relation& r);

// {"qi": [...], "sensitive": [...]}; attribute order comes from the CSV
// header, so the schema file only partitions the attributes.
struct SchemaSpec {
    std::vector<std::string> qi;
    std::vector<std::string> sensitive;
};

SchemaSpec parse_schema_json(const std::string& text);
std::string emit_schema_json(const Schema& schema);

// Array of {"attrs": [...], "values": [...], "lo": int, "hi": int|null};
// null means unbounded.
ConstraintSet parse_constraints_json(const std::string& text);
std::string emit_constraints_json(const ConstraintSet& sigma_set);

std::string emit_metrics_json(const MetricsReport& report);

// {"rows": int, "seed": int, "attributes": [{"name", "values",
// "distribution", "mean"?, "stddev"?, "s"?, "qi"?}]}
SynthSpec parse_synth_spec_json(const std::string& text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

} // namespace dkanon
