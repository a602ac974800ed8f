#pragma once

#include <cstdint>

namespace gossim {

// Sentinel for "no upstream peer" (locally generated events).
inline constexpr std::uint32_t no_peer = 0xffffffffu;

// A game event copy in flight. hops + ttl stays equal to the initial TTL.
struct Message {
    std::uint64_t msg_id = 0;
    std::uint32_t source = 0;        // node that generated the event
    std::uint64_t creation_time = 0; // simulation step
    std::uint32_t ttl = 0;           // remaining hops
    std::uint32_t hops = 0;          // hops traversed so far
};

// Control message: requester asks a neighbor to raise its dissemination
// probability for events originated at about_source.
struct StimulusMessage {
    std::uint32_t requester = 0;
    std::uint32_t about_source = 0;
    std::uint64_t issue_time = 0;
};

struct Transmission {
    std::uint32_t to = 0;
    Message msg;
};

} // namespace gossim
