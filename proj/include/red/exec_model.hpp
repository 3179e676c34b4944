#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <variant>

#include "red/errors.hpp"
#include "red/time.hpp"

namespace red {

struct ConstantDist {
    usec value = 0;
};

struct UniformDist {
    usec lo = 0;
    usec hi = 0;
};

struct TruncNormalDist {
    usec mean = 0;
    usec sd = 0;
    usec lo = 0;
    usec hi = 0;
};

using CostDist = std::variant<ConstantDist, UniformDist, TruncNormalDist>;

/// Per-node execution time model, keyed "<task>/<node>". Nodes without an
/// entry run at their cost estimate.
struct ExecutionModel {
    std::map<std::string, CostDist> per_node;
};

namespace detail {

// splitmix64: the sampling stream is keyed by (seed, task, job, node), so a
// node's drawn cost is independent of dispatch order and identical across
// scheduling policies.
struct CounterRng {
    std::uint64_t state;

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, n) via 128-bit multiply.
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * n) >> 64);
    }

    double unit() { // (0, 1)
        return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
    }
};

inline std::uint64_t fnv1a(std::uint64_t h, const std::string& s) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline CounterRng node_stream(std::uint64_t seed, const std::string& task,
                              std::int64_t job_index, const std::string& node) {
    std::uint64_t h = 0xcbf29ce484222325ULL ^ seed;
    h = fnv1a(h, task);
    h = fnv1a(h, "#");
    h ^= static_cast<std::uint64_t>(job_index) * 0x9e3779b97f4a7c15ULL;
    h = fnv1a(h, "/");
    h = fnv1a(h, node);
    return CounterRng{h};
}

} // namespace detail

inline void validate_dist(const CostDist& d, const std::string& key) {
    if (const auto* c = std::get_if<ConstantDist>(&d)) {
        if (c->value <= 0) throw ScenarioError("exec model '" + key + "': value must be > 0");
    } else if (const auto* u = std::get_if<UniformDist>(&d)) {
        if (u->lo <= 0 || u->hi < u->lo)
            throw ScenarioError("exec model '" + key + "': need 0 < lo <= hi");
    } else if (const auto* t = std::get_if<TruncNormalDist>(&d)) {
        if (t->lo <= 0 || t->hi < t->lo || t->sd < 0)
            throw ScenarioError("exec model '" + key + "': need 0 < lo <= hi, sd >= 0");
    }
}

/// Draws the execution time for one node instance. Deterministic given
/// (seed, task, job_index, node); sampled values are always > 0.
inline usec sample_cost(const ExecutionModel& model, std::uint64_t seed,
                        const std::string& task, std::int64_t job_index,
                        const std::string& node, usec estimate) {
    auto it = model.per_node.find(task + "/" + node);
    if (it == model.per_node.end()) return estimate;
    auto rng = detail::node_stream(seed, task, job_index, node);
    const CostDist& d = it->second;
    if (const auto* c = std::get_if<ConstantDist>(&d)) return c->value;
    if (const auto* u = std::get_if<UniformDist>(&d))
        return u->lo + static_cast<usec>(rng.below(static_cast<std::uint64_t>(u->hi - u->lo + 1)));
    const auto& t = std::get<TruncNormalDist>(d);
    if (t.sd == 0) return std::min(std::max(t.mean, t.lo), t.hi);
    // Box-Muller with rejection against the truncation bounds.
    for (int i = 0; i < 256; ++i) {
        double u1 = rng.unit(), u2 = rng.unit();
        double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
        usec v = static_cast<usec>(std::llround(static_cast<double>(t.mean) +
                                                z * static_cast<double>(t.sd)));
        if (v >= t.lo && v <= t.hi) return v;
    }
    return std::min(std::max(t.mean, t.lo), t.hi);
}

} // namespace red
