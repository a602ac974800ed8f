#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "gossim/config.hpp"
#include "gossim/graph.hpp"
#include "gossim/lru_cache.hpp"
#include "gossim/message.hpp"
#include "gossim/monitoring.hpp"
#include "gossim/rng.hpp"
#include "gossim/threshold.hpp"

namespace gossim {

enum class Verdict { first_copy, duplicate };

// Per-node protocol state: dedup cache, threshold table, reception stats and
// the node's private random streams. Owned and mutated only by the
// simulation loop of its run.
class Peer {
  public:
    Peer(std::uint32_t id, const SimConfig& cfg)
        : id_(id),
          policy_(cfg.policy),
          cache_(cfg.cache_capacity),
          thresholds_(keying_for(cfg.policy), cfg.v0, cfg.sigma, cfg.delta),
          stats_(cfg.n),
          forward_rng_(derive_stream_seed(cfg.run_seed, id,
                                          StreamPurpose::forwarding)),
          select_rng_(derive_stream_seed(cfg.run_seed, id,
                                         StreamPurpose::forwarder_selection)),
          v0_(cfg.v0) {}

    std::uint32_t id() const { return id_; }
    Policy policy() const { return policy_; }
    double base_probability() const { return v0_; }
    LruCache& cache() { return cache_; }
    ThresholdTable& thresholds() { return thresholds_; }
    const ThresholdTable& thresholds() const { return thresholds_; }
    ReceptionStats& stats() { return stats_; }
    Rng& forward_rng() { return forward_rng_; }
    Rng& select_rng() { return select_rng_; }

    // First-copy / duplicate decision. The id is inserted or refreshed in
    // the LRU cache either way.
    Verdict accept_or_drop(const Message& msg) {
        return cache_.insert_or_touch(msg.msg_id) ? Verdict::first_copy
                                                  : Verdict::duplicate;
    }

    // Forwarding decision for a held first copy, dispatched by policy.
    // `from` is no_peer for locally generated events. The _into variant
    // appends to a caller-owned buffer (the engine reuses one).
    void forward_into(const Message& msg, std::uint32_t from, const Graph& g,
                      std::uint64_t t, std::vector<Transmission>& out);

    std::vector<Transmission> forward(const Message& msg, std::uint32_t from,
                                      const Graph& g, std::uint64_t t) {
        std::vector<Transmission> out;
        forward_into(msg, from, g, t, out);
        return out;
    }

    // Stimulus reception: bump the threshold entry selected by the policy's
    // keying scheme.
    void on_stimulus(const StimulusMessage& s, std::uint64_t t) {
        switch (thresholds_.keying()) {
            case Keying::receiver:
                thresholds_.stimulate(s.requester, t);
                break;
            case Keying::source:
                thresholds_.stimulate(s.about_source, t);
                break;
            case Keying::source_receiver:
                thresholds_.stimulate(
                    ThresholdTable::pair_key(s.about_source, s.requester), t);
                break;
        }
    }

    // Periodic monitoring pass: emit one stimulus per under-served source,
    // each targeted at a forwarder, then start a fresh window.
    std::vector<std::pair<std::uint32_t, StimulusMessage>> monitor_tick(
        std::uint64_t t, std::span<const double> rates, double alpha,
        std::uint64_t t_mon, const Graph& g) {
        std::vector<std::pair<std::uint32_t, StimulusMessage>> out;
        for (std::uint32_t j :
             retrieve_peers_low_rate(stats_, rates, alpha, t_mon, id_)) {
            std::uint32_t q =
                select_forwarder(stats_, j, g.neighbors(id_), select_rng_);
            out.emplace_back(q, StimulusMessage{id_, j, t});
        }
        stats_.reset(t);
        return out;
    }

  private:
    static Keying keying_for(Policy p) {
        switch (p) {
            case Policy::adaptive2: return Keying::source;
            case Policy::adaptive3: return Keying::source_receiver;
            default: return Keying::receiver;
        }
    }

    std::uint32_t id_;
    Policy policy_;
    LruCache cache_;
    ThresholdTable thresholds_;
    ReceptionStats stats_;
    Rng forward_rng_;
    Rng select_rng_;
    double v0_;
};

namespace detail {

inline Message forwarded_copy(const Message& msg) {
    Message copy = msg;
    --copy.ttl;
    ++copy.hops;
    return copy;
}

} // namespace detail

// Fixed Probability: one independent draw against v0 per neighbor except the
// one the message came from, in ascending neighbor-id order.
inline void fixed_probability_forward(Peer& p, const Message& msg,
                                      std::uint32_t from, const Graph& g,
                                      std::vector<Transmission>& out) {
    if (msg.ttl == 0) return;
    for (std::uint32_t n : g.neighbors(p.id())) {
        if (n == from) continue;
        if (p.forward_rng().next_unit() < p.base_probability())
            out.push_back({n, detail::forwarded_copy(msg)});
    }
}

inline std::vector<Transmission> fixed_probability_forward(Peer& p,
                                                           const Message& msg,
                                                           std::uint32_t from,
                                                           const Graph& g) {
    std::vector<Transmission> out;
    fixed_probability_forward(p, msg, from, g, out);
    return out;
}

// Probabilistic Broadcast: locally generated events always go to all
// neighbors; a relayed message is forwarded to all neighbors except `from`
// on a single draw, or not at all.
inline void probabilistic_broadcast_forward(Peer& p, const Message& msg,
                                            std::uint32_t from, const Graph& g,
                                            std::vector<Transmission>& out) {
    if (msg.ttl == 0) return;
    bool local = msg.source == p.id();
    if (!local && !(p.forward_rng().next_unit() < p.base_probability()))
        return;
    for (std::uint32_t n : g.neighbors(p.id())) {
        if (n == from) continue;
        out.push_back({n, detail::forwarded_copy(msg)});
    }
}

inline std::vector<Transmission> probabilistic_broadcast_forward(
    Peer& p, const Message& msg, std::uint32_t from, const Graph& g) {
    std::vector<Transmission> out;
    probabilistic_broadcast_forward(p, msg, from, g, out);
    return out;
}

// Adaptive #1: per-neighbor thresholds. Each candidate neighbor gets its own
// threshold lookup and its own draw.
inline void adaptive1_forward(Peer& p, const Message& msg, std::uint32_t from,
                              const Graph& g, std::uint64_t t,
                              std::vector<Transmission>& out) {
    if (msg.ttl == 0) return;
    for (std::uint32_t n : g.neighbors(p.id())) {
        if (n == from) continue;
        double threshold = p.thresholds().value(n, t);
        if (p.forward_rng().next_unit() < threshold)
            out.push_back({n, detail::forwarded_copy(msg)});
    }
}

inline std::vector<Transmission> adaptive1_forward(Peer& p, const Message& msg,
                                                   std::uint32_t from,
                                                   const Graph& g,
                                                   std::uint64_t t) {
    std::vector<Transmission> out;
    adaptive1_forward(p, msg, from, g, t, out);
    return out;
}

// Adaptive #2: one source-keyed threshold computed once per call; every
// candidate neighbor draws independently against it.
inline void adaptive2_forward(Peer& p, const Message& msg, std::uint32_t from,
                              const Graph& g, std::uint64_t t,
                              std::vector<Transmission>& out) {
    if (msg.ttl == 0) return;
    double threshold = p.thresholds().value(msg.source, t);
    for (std::uint32_t n : g.neighbors(p.id())) {
        if (n == from) continue;
        if (p.forward_rng().next_unit() < threshold)
            out.push_back({n, detail::forwarded_copy(msg)});
    }
}

inline std::vector<Transmission> adaptive2_forward(Peer& p, const Message& msg,
                                                   std::uint32_t from,
                                                   const Graph& g,
                                                   std::uint64_t t) {
    std::vector<Transmission> out;
    adaptive2_forward(p, msg, from, g, t, out);
    return out;
}

// Adaptive #3: thresholds keyed by the (source, receiver) pair.
inline void adaptive3_forward(Peer& p, const Message& msg, std::uint32_t from,
                              const Graph& g, std::uint64_t t,
                              std::vector<Transmission>& out) {
    if (msg.ttl == 0) return;
    for (std::uint32_t n : g.neighbors(p.id())) {
        if (n == from) continue;
        double threshold =
            p.thresholds().value(ThresholdTable::pair_key(msg.source, n), t);
        if (p.forward_rng().next_unit() < threshold)
            out.push_back({n, detail::forwarded_copy(msg)});
    }
}

inline std::vector<Transmission> adaptive3_forward(Peer& p, const Message& msg,
                                                   std::uint32_t from,
                                                   const Graph& g,
                                                   std::uint64_t t) {
    std::vector<Transmission> out;
    adaptive3_forward(p, msg, from, g, t, out);
    return out;
}

inline void Peer::forward_into(const Message& msg, std::uint32_t from,
                               const Graph& g, std::uint64_t t,
                               std::vector<Transmission>& out) {
    switch (policy_) {
        case Policy::fixed_prob:
            fixed_probability_forward(*this, msg, from, g, out);
            break;
        case Policy::prob_bcast:
            probabilistic_broadcast_forward(*this, msg, from, g, out);
            break;
        case Policy::adaptive1:
            adaptive1_forward(*this, msg, from, g, t, out);
            break;
        case Policy::adaptive2:
            adaptive2_forward(*this, msg, from, g, t, out);
            break;
        case Policy::adaptive3:
            adaptive3_forward(*this, msg, from, g, t, out);
            break;
    }
}

} // namespace gossim
