#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dkanon/relation.hpp"

namespace dkanon {

enum class Distribution { uniform, gaussian, zipf };

std::string to_string(Distribution dist);
Distribution parse_distribution(const std::string& name); // throws ConfigError

struct AttrSpec {
    std::string name;
    std::vector<std::string> values;
    Distribution dist = Distribution::uniform;
    std::optional<double> mean;   // gaussian; defaults to (n-1)/2
    std::optional<double> stddev; // gaussian; defaults to n/6
    double zipf_s = 1.0;          // zipf exponent; rank 1 is the first value
    bool qi = true;
};

struct SynthSpec {
    std::size_t rows = 0;
    std::uint64_t seed = 0;
    std::vector<AttrSpec> attributes;
};

// Deterministic for a fixed seed: rows are drawn attribute by attribute from
// one generator stream, independent of platform library details.
Relation synth_generate(const SynthSpec& spec);

} // namespace dkanon
