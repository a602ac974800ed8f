#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace gossim {

// splitmix64 finalizer, used to derive well-separated seeds for substreams.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

enum class StreamPurpose : std::uint64_t {
    generation = 1,
    forwarding = 2,
    forwarder_selection = 3,
};

// Each (run, node, purpose) triple gets its own stream so that, e.g., a
// protocol change cannot perturb the event generation sequence.
constexpr std::uint64_t derive_stream_seed(std::uint64_t run_seed,
                                           std::uint64_t node_id,
                                           StreamPurpose purpose) {
    return mix64(mix64(run_seed) ^ mix64(node_id ^ 0x5851f42d4c957f2dull) ^
                 static_cast<std::uint64_t>(purpose));
}

// Deterministic random stream. mt19937_64 output is pinned by the standard;
// the distribution mappings below are fixed here instead of using
// std::uniform_*_distribution, whose draw sequences vary across library
// implementations.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform double in [0, 1), 53 bits of precision.
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n), n > 0. Multiply-shift; bias is O(n / 2^64).
    std::uint32_t next_below(std::uint32_t n) {
        return static_cast<std::uint32_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    // Exponential with the given mean, via inverse CDF.
    double next_exponential(double mean) {
        return -mean * std::log1p(-next_unit());
    }

  private:
    std::mt19937_64 gen_;
};

} // namespace gossim
