#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <unordered_map>

namespace gossim {

// One decaying dissemination probability. A stimulus adds sigma to the
// current (possibly partially decayed) value, capped at 1; the value then
// decays linearly back to the base over delta steps from the last stimulus.
// With no stimulus ever received the value is exactly the base.
struct ThresholdState {
    double base = 0.0;               // resting probability
    double sigma = 0.0;              // stimulus increment
    std::uint64_t delta = 0;         // decay duration in steps
    double level_at_last_stim = 0.0; // value right after the last stimulus
    std::optional<std::uint64_t> last_stim_time;

    double value_at(std::uint64_t t) const {
        if (!last_stim_time || delta == 0) return base;
        std::uint64_t elapsed = t - *last_stim_time;
        if (elapsed >= delta) return base;
        double frac = static_cast<double>(elapsed) / static_cast<double>(delta);
        return base + (level_at_last_stim - base) * (1.0 - frac);
    }

    void stimulate(std::uint64_t t) {
        level_at_last_stim = std::min(1.0, value_at(t) + sigma);
        last_stim_time = t;
    }
};

// How stimuli and forwarding decisions are keyed:
//   receiver         — per neighbor the message would be sent to
//   source           — per generator of the message
//   source_receiver  — per (generator, neighbor) pair
enum class Keying { receiver, source, source_receiver };

// Lazy table of threshold states. Absent keys behave exactly like a fresh
// state at base; entries materialize on first stimulus.
class ThresholdTable {
  public:
    ThresholdTable(Keying keying, double base, double sigma, std::uint64_t delta)
        : keying_(keying), base_(base), sigma_(sigma), delta_(delta) {}

    static std::uint64_t pair_key(std::uint32_t source, std::uint32_t receiver) {
        return (static_cast<std::uint64_t>(source) << 32) | receiver;
    }

    double value(std::uint64_t key, std::uint64_t t) const {
        auto it = entries_.find(key);
        return it == entries_.end() ? base_ : it->second.value_at(t);
    }

    void stimulate(std::uint64_t key, std::uint64_t t) {
        auto [it, inserted] = entries_.try_emplace(key);
        if (inserted) {
            it->second.base = base_;
            it->second.sigma = sigma_;
            it->second.delta = delta_;
        }
        it->second.stimulate(t);
    }

    Keying keying() const { return keying_; }
    double base() const { return base_; }
    std::size_t materialized_entries() const { return entries_.size(); }

  private:
    Keying keying_;
    double base_;
    double sigma_;
    std::uint64_t delta_;
    std::unordered_map<std::uint64_t, ThresholdState> entries_;
};

} // namespace gossim
