#include "dkanon/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "dkanon/error.hpp"

namespace dkanon {

std::string to_string(Distribution dist) {
    switch (dist) {
    case Distribution::uniform: return "uniform";
    case Distribution::gaussian: return "gaussian";
    case Distribution::zipf: return "zipf";
    }
    throw InternalError("unknown distribution");
}

Distribution parse_distribution(const std::string& name) {
    if (name == "uniform") return Distribution::uniform;
    if (name == "gaussian") return Distribution::gaussian;
    if (name == "zipf") return Distribution::zipf;
    throw ConfigError("unknown distribution \"" + name +
                      "\" (expected uniform, gaussian, or zipf)");
}

namespace {

double unit_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

class ValueSampler {
public:
    ValueSampler(const AttrSpec& spec) : spec_(spec) {
        const std::size_t n = spec.values.size();
        if (n == 0) throw ConfigError("attribute \"" + spec.name + "\" has no values");
        switch (spec.dist) {
        case Distribution::uniform:
            break;
        case Distribution::gaussian:
            mean_ = spec.mean.value_or(static_cast<double>(n - 1) / 2.0);
            stddev_ = spec.stddev.value_or(static_cast<double>(n) / 6.0);
            if (!(stddev_ > 0.0)) {
                throw ConfigError("attribute \"" + spec.name +
                                  "\" needs a positive standard deviation");
            }
            break;
        case Distribution::zipf: {
            if (spec.zipf_s < 0.0) {
                throw ConfigError("attribute \"" + spec.name +
                                  "\" needs a non-negative zipf exponent");
            }
            double total = 0.0;
            for (std::size_t rank = 1; rank <= n; ++rank) {
                total += 1.0 / std::pow(static_cast<double>(rank), spec.zipf_s);
                cumulative_.push_back(total);
            }
            break;
        }
        }
    }

    std::size_t draw(std::mt19937_64& rng) const {
        const std::size_t n = spec_.values.size();
        switch (spec_.dist) {
        case Distribution::uniform: {
            const auto idx = static_cast<std::size_t>(unit_uniform(rng) * static_cast<double>(n));
            return std::min(idx, n - 1);
        }
        case Distribution::gaussian: {
            double u1 = unit_uniform(rng);
            const double u2 = unit_uniform(rng);
            if (u1 <= 0.0) u1 = 0x1.0p-53;
            const double z = std::sqrt(-2.0 * std::log(u1)) *
                             std::cos(2.0 * 3.141592653589793238462643383279502884 * u2);
            const double x = std::round(mean_ + stddev_ * z);
            if (x <= 0.0) return 0;
            if (x >= static_cast<double>(n - 1)) return n - 1;
            return static_cast<std::size_t>(x);
        }
        case Distribution::zipf: {
            const double u = unit_uniform(rng) * cumulative_.back();
            const auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), u);
            const auto idx = static_cast<std::size_t>(it - cumulative_.begin());
            return std::min(idx, n - 1);
        }
        }
        throw InternalError("unknown distribution");
    }

private:
    const AttrSpec& spec_;
    double mean_ = 0.0;
    double stddev_ = 1.0;
    std::vector<double> cumulative_;
};

} // namespace

Relation synth_generate(const SynthSpec& spec) {
    if (spec.attributes.empty()) throw ConfigError("no attributes in the data spec");
    std::vector<std::string> names;
    std::vector<std::string> qi;
    std::vector<std::string> sensitive;
    std::vector<ValueSampler> samplers;
    samplers.reserve(spec.attributes.size());
    for (const AttrSpec& a : spec.attributes) {
        names.push_back(a.name);
        (a.qi ? qi : sensitive).push_back(a.name);
        samplers.emplace_back(a);
    }
    Schema schema(names, qi, sensitive);

    std::mt19937_64 rng(spec.seed);
    std::vector<std::vector<std::string>> rows;
    rows.reserve(spec.rows);
    for (std::size_t i = 0; i < spec.rows; ++i) {
        std::vector<std::string> row;
        row.reserve(spec.attributes.size());
        for (std::size_t a = 0; a < spec.attributes.size(); ++a) {
            row.push_back(spec.attributes[a].values[samplers[a].draw(rng)]);
        }
        rows.push_back(std::move(row));
    }
    return Relation::from_rows(std::move(schema), rows);
}

} // namespace dkanon
