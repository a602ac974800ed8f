#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "gossim/graph.hpp"

namespace gossim {

enum class Policy { fixed_prob, prob_bcast, adaptive1, adaptive2, adaptive3 };

inline std::string_view policy_name(Policy p) {
    switch (p) {
        case Policy::fixed_prob: return "fixed-prob";
        case Policy::prob_bcast: return "prob-bcast";
        case Policy::adaptive1: return "adaptive1";
        case Policy::adaptive2: return "adaptive2";
        case Policy::adaptive3: return "adaptive3";
    }
    return "?";
}

inline std::optional<Policy> parse_policy(std::string_view name) {
    if (name == "fixed-prob") return Policy::fixed_prob;
    if (name == "prob-bcast") return Policy::prob_bcast;
    if (name == "adaptive1") return Policy::adaptive1;
    if (name == "adaptive2") return Policy::adaptive2;
    if (name == "adaptive3") return Policy::adaptive3;
    return std::nullopt;
}

inline bool policy_is_adaptive(Policy p) {
    return p == Policy::adaptive1 || p == Policy::adaptive2 ||
           p == Policy::adaptive3;
}

// Parameters of one simulation run.
struct SimConfig {
    std::uint64_t steps = 5000;
    std::uint32_t n = 100;
    std::uint32_t edges_per_node = 2;
    std::uint32_t ttl_init = 8;
    std::size_t cache_capacity = 256;
    double mean_intergen = 200.0; // steps between events; omega = 1/mean
    Policy policy = Policy::fixed_prob;
    double v0 = 0.2;      // base dissemination probability
    double sigma = 0.2;   // stimulus increment
    std::uint64_t delta = 300; // stimulus decay duration
    double alpha = 1.0 / 3.0;  // low-rate sensitivity
    std::uint64_t t_mon = 100; // monitoring period
    std::uint64_t run_seed = 1;

    double event_rate() const { return 1.0 / mean_intergen; }

    // Throws std::invalid_argument on an invalid configuration. The graph is
    // needed for the TTL-vs-diameter check.
    void validate(const Graph& g) const {
        if (steps < 1) throw std::invalid_argument("steps must be >= 1");
        if (n < 2) throw std::invalid_argument("n must be >= 2");
        if (g.node_count != n)
            throw std::invalid_argument("graph size does not match config n");
        if (!(v0 > 0.0 && v0 <= 1.0))
            throw std::invalid_argument("v0 must be in (0, 1]");
        if (alpha < 0.0) throw std::invalid_argument("alpha must be >= 0");
        if (t_mon < 1) throw std::invalid_argument("t_mon must be >= 1");
        if (cache_capacity < 1)
            throw std::invalid_argument("cache_capacity must be >= 1");
        if (!(mean_intergen > 0.0))
            throw std::invalid_argument("mean_intergen must be > 0");
        if (sigma < 0.0) throw std::invalid_argument("sigma must be >= 0");
        if (ttl_init < diameter(g))
            throw std::invalid_argument("ttl_init must cover the graph diameter");
    }
};

// Monitoring/stimulus parameter tuples shipped as named presets.
struct PresetParams {
    std::uint64_t t_mon;
    double sigma;
    std::uint64_t delta;
    double alpha;
};

inline std::optional<PresetParams> find_preset(std::string_view name) {
    if (name == "alg1-paper") return PresetParams{100, 0.2, 300, 1.0 / 3.0};
    if (name == "alg2-paper") return PresetParams{50, 0.5, 1000, 3.0 / 4.0};
    if (name == "alg3-paper") return PresetParams{50, 0.7, 10000, 1.0};
    if (name == "alg3-setup1") return PresetParams{50, 0.5, 1000, 1.0};
    if (name == "alg3-setup2") return PresetParams{50, 0.5, 5000, 1.0};
    if (name == "alg3-setup3") return PresetParams{50, 0.5, 1000, 3.0 / 4.0};
    if (name == "alg3-setup4") return PresetParams{50, 0.7, 10000, 1.0};
    if (name == "alg3-setup5") return PresetParams{30, 0.25, 10000, 1.0};
    if (name == "alg3-setup6") return PresetParams{30, 0.25, 10000, 0.5};
    return std::nullopt;
}

} // namespace gossim
