#include "dkanon/generator.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "dkanon/error.hpp"
#include "dkanon/metrics.hpp"

namespace dkanon {

std::string to_string(ConstraintClass cls) {
    switch (cls) {
    case ConstraintClass::minimum: return "minimum";
    case ConstraintClass::average: return "average";
    case ConstraintClass::proportion: return "proportion";
    }
    throw InternalError("unknown constraint class");
}

ConstraintClass parse_constraint_class(const std::string& name) {
    if (name == "minimum") return ConstraintClass::minimum;
    if (name == "average") return ConstraintClass::average;
    if (name == "proportion") return ConstraintClass::proportion;
    throw ConfigError("unknown constraint class \"" + name +
                      "\" (expected minimum, average, or proportion)");
}

namespace {

struct Combo {
    std::vector<std::string> values;
    std::uint64_t freq = 0;
};

// Distinct target-value combinations in first-occurrence order, counting only
// tuples concrete on every target attribute.
std::vector<Combo> collect_combos(const Relation& r, const std::vector<std::size_t>& attrs) {
    std::vector<Combo> combos;
    for (std::size_t p = 0; p < r.size(); ++p) {
        std::vector<std::string> values;
        values.reserve(attrs.size());
        bool concrete = true;
        for (std::size_t a : attrs) {
            const CellValue& c = r.row_at(p)[a];
            if (c.is_suppressed()) {
                concrete = false;
                break;
            }
            values.push_back(c.value());
        }
        if (!concrete) continue;
        auto it = std::find_if(combos.begin(), combos.end(),
                               [&](const Combo& cb) { return cb.values == values; });
        if (it == combos.end()) {
            combos.push_back({std::move(values), 1});
        } else {
            ++it->freq;
        }
    }
    return combos;
}

struct Bounds {
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;
};

// Widens one seeded-random upper bound that can absorb all of w
// (freq >= hi + w); with no such constraint, spreads w over the bounds in
// descending frequency order as far as the frequencies allow.
void distribute(std::vector<Bounds>& bounds, const std::vector<Combo>& combos,
                std::uint64_t w, std::mt19937_64& rng) {
    if (w == 0) return;
    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < bounds.size(); ++i) {
        if (combos[i].freq >= bounds[i].hi + w) eligible.push_back(i);
    }
    if (!eligible.empty()) {
        std::uniform_int_distribution<std::size_t> dist(0, eligible.size() - 1);
        bounds[eligible[dist(rng)]].hi += w;
        return;
    }
    std::vector<std::size_t> order(bounds.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return combos[a].freq > combos[b].freq;
    });
    for (std::size_t i : order) {
        if (w == 0) break;
        const std::uint64_t room =
            combos[i].freq > bounds[i].hi ? combos[i].freq - bounds[i].hi : 0;
        const std::uint64_t take = std::min(room, w);
        bounds[i].hi += take;
        w -= take;
    }
}

std::vector<Bounds> minimum_under(std::size_t d, std::uint64_t u, std::mt19937_64& rng) {
    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<Bounds> bounds(d);
    for (std::uint64_t i = 0; i < u; ++i) bounds[order[i]] = {1, 1};
    return bounds;
}

} // namespace

ConstraintSet generate_constraints(const Relation& r, const GeneratorSpec& spec, int k,
                                   std::vector<std::string>* warnings) {
    if (k < 0) throw ConfigError("k must not be negative");
    if (spec.target_attrs.empty()) throw ConfigError("no target attributes given");
    std::vector<std::size_t> attrs;
    for (const auto& name : spec.target_attrs) {
        const std::size_t idx = r.schema().index_of(name);
        if (!r.schema().is_qi(idx)) {
            throw SchemaError("target attribute \"" + name + "\" is not a quasi-identifier");
        }
        attrs.push_back(idx);
    }

    const std::vector<Combo> combos = collect_combos(r, attrs);
    const std::size_t d = combos.size();
    if (d == 0) throw ConfigError("no target value combinations in the relation");
    const std::uint64_t u = estimate_published(r);

    std::mt19937_64 rng(spec.seed);
    std::vector<Bounds> bounds;
    if (u < d) {
        bounds = minimum_under(d, u, rng);
    } else {
        switch (spec.cls) {
        case ConstraintClass::minimum: {
            bounds.assign(d, {1, 1});
            distribute(bounds, combos, u - d, rng);
            break;
        }
        case ConstraintClass::average: {
            const std::uint64_t lo = u / d;
            const std::uint64_t hi = (u + d - 1) / d;
            std::uint64_t total_hi = 0;
            for (const Combo& c : combos) {
                bounds.push_back({std::min(lo, c.freq), std::min(hi, c.freq)});
                total_hi += bounds.back().hi;
            }
            distribute(bounds, combos, u - std::min(u, total_hi), rng);
            break;
        }
        case ConstraintClass::proportion: {
            const std::uint64_t n = r.size();
            for (const Combo& c : combos) {
                bounds.push_back({u * c.freq / n, (u * c.freq + n - 1) / n});
            }
            break;
        }
        }
    }

    std::vector<DiversityConstraint> out;
    for (std::size_t i = 0; i < d; ++i) {
        DiversityConstraint sigma(spec.target_attrs, combos[i].values,
                                  static_cast<std::uint32_t>(bounds[i].lo),
                                  static_cast<std::uint32_t>(bounds[i].hi));
        if (k >= 1 && bounds[i].lo < static_cast<std::uint64_t>(k)) {
            if (warnings) {
                warnings->push_back("dropped " + sigma.describe() +
                                    ": lower bound below k=" + std::to_string(k));
            }
            continue;
        }
        out.push_back(std::move(sigma));
    }
    return ConstraintSet(std::move(out));
}

} // namespace dkanon
