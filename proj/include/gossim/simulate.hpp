#pragma once

#include <charconv>
#include <cstdint>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gossim/config.hpp"
#include "gossim/graph.hpp"
#include "gossim/message.hpp"
#include "gossim/policy.hpp"
#include "gossim/rng.hpp"

namespace gossim {

struct GeneratedRecord {
    std::uint64_t msg_id;
    std::uint32_t source;
    std::uint64_t time;
};

struct ReceptionRecord {
    std::uint64_t msg_id;
    std::uint32_t source;
    std::uint32_t receiver;
    std::uint32_t hops;
    std::uint64_t time;
};

// Complete record of one run: every generated event, the first reception of
// each message at each node, and the transmission counters. data_tx counts
// data sends (duplicates included, at send time); control_tx counts
// stimulus sends.
struct Trace {
    std::vector<GeneratedRecord> generated;
    std::vector<ReceptionRecord> first_receptions;
    std::uint64_t data_tx = 0;
    std::uint64_t control_tx = 0;
};

// Line-oriented trace text, bit-exact for determinism checks:
//   G,msg_id,source,time
//   R,msg_id,source,receiver,hops,time
//   S,data_tx,control_tx
inline std::string serialize_trace(const Trace& trace) {
    std::string out;
    out.reserve(32 * (trace.generated.size() + trace.first_receptions.size()));
    char buf[128];
    for (const auto& g : trace.generated) {
        int len = std::snprintf(buf, sizeof buf, "G,%llu,%u,%llu\n",
                                static_cast<unsigned long long>(g.msg_id),
                                g.source,
                                static_cast<unsigned long long>(g.time));
        out.append(buf, len);
    }
    for (const auto& r : trace.first_receptions) {
        int len = std::snprintf(buf, sizeof buf, "R,%llu,%u,%u,%u,%llu\n",
                                static_cast<unsigned long long>(r.msg_id),
                                r.source, r.receiver, r.hops,
                                static_cast<unsigned long long>(r.time));
        out.append(buf, len);
    }
    int len = std::snprintf(buf, sizeof buf, "S,%llu,%llu\n",
                            static_cast<unsigned long long>(trace.data_tx),
                            static_cast<unsigned long long>(trace.control_tx));
    out.append(buf, len);
    return out;
}

namespace detail {

inline std::vector<std::uint64_t> split_fields(const std::string& line,
                                               std::size_t expect, int line_no) {
    std::vector<std::uint64_t> fields;
    std::size_t pos = 2; // skip "X,"
    while (pos <= line.size()) {
        std::size_t comma = line.find(',', pos);
        std::size_t end = comma == std::string::npos ? line.size() : comma;
        std::uint64_t value = 0;
        auto [ptr, ec] =
            std::from_chars(line.data() + pos, line.data() + end, value);
        if (ec != std::errc() || ptr != line.data() + end)
            throw std::runtime_error("trace parse error at line " +
                                     std::to_string(line_no));
        fields.push_back(value);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (fields.size() != expect)
        throw std::runtime_error("trace parse error at line " +
                                 std::to_string(line_no) +
                                 ": wrong field count");
    return fields;
}

} // namespace detail

inline Trace parse_trace(std::istream& in) {
    Trace trace;
    std::string line;
    int line_no = 0;
    bool saw_footer = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (saw_footer)
            throw std::runtime_error("trace parse error: data after footer");
        if (line.size() < 2 || line[1] != ',')
            throw std::runtime_error("trace parse error at line " +
                                     std::to_string(line_no));
        switch (line[0]) {
            case 'G': {
                auto f = detail::split_fields(line, 3, line_no);
                trace.generated.push_back(
                    {f[0], static_cast<std::uint32_t>(f[1]), f[2]});
                break;
            }
            case 'R': {
                auto f = detail::split_fields(line, 5, line_no);
                trace.first_receptions.push_back(
                    {f[0], static_cast<std::uint32_t>(f[1]),
                     static_cast<std::uint32_t>(f[2]),
                     static_cast<std::uint32_t>(f[3]), f[4]});
                break;
            }
            case 'S': {
                auto f = detail::split_fields(line, 2, line_no);
                trace.data_tx = f[0];
                trace.control_tx = f[1];
                saw_footer = true;
                break;
            }
            default:
                throw std::runtime_error("trace parse error at line " +
                                         std::to_string(line_no) +
                                         ": unknown record");
        }
    }
    if (!saw_footer)
        throw std::runtime_error("trace parse error: missing footer");
    return trace;
}

inline Trace parse_trace(const std::string& text) {
    std::istringstream in(text);
    return parse_trace(in);
}

// Next generation instant for a node: exponential inter-generation time with
// the configured mean, floored at one step.
inline std::uint64_t schedule_next_generation(std::uint64_t t,
                                              double mean_intergen, Rng& rng) {
    double x = rng.next_exponential(mean_intergen);
    auto interval = static_cast<std::uint64_t>(std::llround(x));
    return t + std::max<std::uint64_t>(1, interval);
}

namespace detail {

// Same-step events fire in kind order: data deliveries, stimulus
// deliveries, generations, monitor ticks; ties broken by scheduling order.
enum : std::uint8_t {
    ev_deliver = 0,
    ev_deliver_stimulus = 1,
    ev_generate = 2,
    ev_monitor = 3,
};

struct Event {
    std::uint8_t kind;
    std::uint32_t from = no_peer;
    std::uint32_t to = 0; // delivery target, or acting node
    Message msg;          // ev_deliver
    StimulusMessage stim; // ev_deliver_stimulus
};

// Per-step event buckets. Every push targets a strictly future step, so
// iterating steps in order and each bucket in kind-then-insertion order
// reproduces the (time, kind, seq) total order exactly.
class BucketQueue {
  public:
    explicit BucketQueue(std::uint64_t steps) : buckets_(steps + 2) {}

    void push(std::uint64_t t, const Event& ev) {
        if (t < buckets_.size()) buckets_[t].push_back(ev);
        // events past the end of the run are dropped undelivered
    }

    std::vector<Event>& bucket(std::uint64_t t) { return buckets_[t]; }

    void release(std::uint64_t t) {
        std::vector<Event>().swap(buckets_[t]);
    }

  private:
    std::vector<std::vector<Event>> buckets_;
};

// Tracks which (msg, node) pairs already produced a first-reception record,
// so trace records stay unique even if a dedup cache eviction lets a peer
// re-process an old message.
class SeenMatrix {
  public:
    explicit SeenMatrix(std::uint32_t n) : n_(n) {}

    void add_message() { bits_.resize(bits_.size() + n_, false); }

    bool test_and_set(std::uint64_t msg_id, std::uint32_t node) {
        std::size_t idx = msg_id * n_ + node;
        bool was = bits_[idx];
        bits_[idx] = true;
        return was;
    }

  private:
    std::uint32_t n_;
    std::vector<bool> bits_;
};

} // namespace detail

// One deterministic time-stepped run. Every transmission takes exactly one
// step; events at the same step fire in a fixed kind/seq order, so the trace
// is a pure function of (config, graph).
inline Trace run(const SimConfig& cfg, const Graph& g) {
    cfg.validate(g);

    Trace trace;
    detail::BucketQueue queue(cfg.steps);

    std::vector<Peer> peers;
    peers.reserve(cfg.n);
    std::vector<Rng> gen_rngs;
    gen_rngs.reserve(cfg.n);
    for (std::uint32_t v = 0; v < cfg.n; ++v) {
        peers.emplace_back(v, cfg);
        gen_rngs.emplace_back(
            derive_stream_seed(cfg.run_seed, v, StreamPurpose::generation));
    }

    const std::vector<double> rates(cfg.n, cfg.event_rate());
    const bool adaptive = policy_is_adaptive(cfg.policy);
    detail::SeenMatrix seen(cfg.n);
    std::uint64_t next_msg_id = 0;

    for (std::uint32_t v = 0; v < cfg.n; ++v) {
        std::uint64_t t0 =
            schedule_next_generation(0, cfg.mean_intergen, gen_rngs[v]);
        detail::Event ev{};
        ev.kind = detail::ev_generate;
        ev.to = v;
        queue.push(t0, ev);
        if (adaptive) {
            detail::Event mon{};
            mon.kind = detail::ev_monitor;
            mon.to = v;
            queue.push(cfg.t_mon, mon);
        }
    }

    std::vector<Transmission> txs; // reusable forwarding buffer
    auto emit_transmissions = [&](std::uint32_t sender, std::uint64_t t) {
        for (const auto& tx : txs) {
            ++trace.data_tx;
            detail::Event ev{};
            ev.kind = detail::ev_deliver;
            ev.msg = tx.msg;
            ev.from = sender;
            ev.to = tx.to;
            queue.push(t + 1, ev);
        }
    };

    auto handle = [&](const detail::Event& ev, std::uint64_t t) {
        switch (ev.kind) {
            case detail::ev_generate: {
                std::uint32_t v = ev.to;
                Message msg{next_msg_id++, v, t, cfg.ttl_init, 0};
                trace.generated.push_back({msg.msg_id, v, t});
                seen.add_message();
                peers[v].accept_or_drop(msg); // origin caches its own event
                txs.clear();
                peers[v].forward_into(msg, no_peer, g, t, txs);
                emit_transmissions(v, t);
                std::uint64_t tn =
                    schedule_next_generation(t, cfg.mean_intergen, gen_rngs[v]);
                detail::Event next{};
                next.kind = detail::ev_generate;
                next.to = v;
                queue.push(tn, next);
                break;
            }
            case detail::ev_deliver: {
                Peer& peer = peers[ev.to];
                if (adaptive) // baselines never read their reception stats
                    record_reception(peer.stats(), ev.msg.source, ev.from);
                if (peer.accept_or_drop(ev.msg) == Verdict::first_copy) {
                    // An echoed-back copy of the node's own event (possible
                    // after cache eviction) is not a reception.
                    if (ev.to != ev.msg.source &&
                        !seen.test_and_set(ev.msg.msg_id, ev.to))
                        trace.first_receptions.push_back({ev.msg.msg_id,
                                                          ev.msg.source, ev.to,
                                                          ev.msg.hops, t});
                    txs.clear();
                    peer.forward_into(ev.msg, ev.from, g, t, txs);
                    emit_transmissions(ev.to, t);
                }
                break;
            }
            case detail::ev_monitor: {
                Peer& peer = peers[ev.to];
                for (auto& [target, stim] :
                     peer.monitor_tick(t, rates, cfg.alpha, cfg.t_mon, g)) {
                    ++trace.control_tx;
                    detail::Event sev{};
                    sev.kind = detail::ev_deliver_stimulus;
                    sev.stim = stim;
                    sev.to = target;
                    queue.push(t + 1, sev);
                }
                detail::Event next{};
                next.kind = detail::ev_monitor;
                next.to = ev.to;
                queue.push(t + cfg.t_mon, next);
                break;
            }
            case detail::ev_deliver_stimulus:
                peers[ev.to].on_stimulus(ev.stim, t);
                break;
        }
    };

    for (std::uint64_t t = 0; t <= cfg.steps; ++t) {
        auto& bucket = queue.bucket(t);
        // deliveries dominate; scan once for them, then sweep the rare kinds
        for (std::size_t i = 0; i < bucket.size(); ++i)
            if (bucket[i].kind == detail::ev_deliver) handle(bucket[i], t);
        for (std::uint8_t kind = detail::ev_deliver_stimulus;
             kind <= detail::ev_monitor; ++kind)
            for (std::size_t i = 0; i < bucket.size(); ++i)
                if (bucket[i].kind == kind) handle(bucket[i], t);
        queue.release(t);
    }
    return trace;
}

} // namespace gossim
