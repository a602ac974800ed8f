#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "gossim/rng.hpp"

namespace gossim {

// Per-peer reception bookkeeping for the current monitoring window. Counts
// every data copy delivered to the peer (duplicates included): the window
// rate is compared against the expected generation rate, and at healthy
// dissemination a peer sees several copies of each event, so copy counting
// is what keeps the low-rate test quiet when nothing is wrong.
//
// Storage is dense per source id; this sits on the per-delivery hot path.
class ReceptionStats {
  public:
    ReceptionStats() = default;
    explicit ReceptionStats(std::uint32_t n) : counts_(n, 0), forwarders_(n) {}

    void record(std::uint32_t source, std::uint32_t forwarder) {
        ++counts_[source];
        auto& fwd = forwarders_[source];
        auto it = std::lower_bound(fwd.begin(), fwd.end(), forwarder);
        if (it == fwd.end() || *it != forwarder) fwd.insert(it, forwarder);
    }

    std::uint32_t count(std::uint32_t source) const { return counts_[source]; }

    // Neighbors that delivered copies from this source in the window,
    // ascending.
    const std::vector<std::uint32_t>& forwarder_set(std::uint32_t source) const {
        return forwarders_[source];
    }

    std::uint32_t sources() const {
        return static_cast<std::uint32_t>(counts_.size());
    }

    std::uint64_t window_start() const { return window_start_; }

    bool window_empty() const {
        return std::all_of(counts_.begin(), counts_.end(),
                           [](std::uint32_t c) { return c == 0; });
    }

    void reset(std::uint64_t t) {
        std::fill(counts_.begin(), counts_.end(), 0);
        for (auto& fwd : forwarders_) fwd.clear();
        window_start_ = t;
    }

  private:
    std::vector<std::uint32_t> counts_;
    std::vector<std::vector<std::uint32_t>> forwarders_;
    std::uint64_t window_start_ = 0;
};

inline void record_reception(ReceptionStats& stats, std::uint32_t source,
                             std::uint32_t forwarder) {
    stats.record(source, forwarder);
}

// Sources i != self whose window count is strictly below alpha * omega_i *
// t_mon, in ascending id order. rates[i] is the expected event generation
// rate of node i (events per step).
inline std::vector<std::uint32_t> retrieve_peers_low_rate(
    const ReceptionStats& stats, std::span<const double> rates, double alpha,
    std::uint64_t t_mon, std::uint32_t self) {
    std::vector<std::uint32_t> flagged;
    for (std::uint32_t i = 0; i < rates.size(); ++i) {
        if (i == self) continue;
        if (double(stats.count(i)) < alpha * rates[i] * double(t_mon))
            flagged.push_back(i);
    }
    return flagged;
}

// Target for a stimulus about source j: the unique neighbor that has been
// delivering j's messages, or a uniform random neighbor when there is no
// known forwarder or more than one.
inline std::uint32_t select_forwarder(const ReceptionStats& stats,
                                      std::uint32_t source,
                                      std::span<const std::uint32_t> neighbors,
                                      Rng& rng) {
    const auto& fwd = stats.forwarder_set(source);
    if (fwd.size() == 1) return fwd.front();
    return neighbors[rng.next_below(static_cast<std::uint32_t>(neighbors.size()))];
}

} // namespace gossim
