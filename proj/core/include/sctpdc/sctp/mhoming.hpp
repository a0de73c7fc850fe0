#pragma once

#include <cstdint>
#include <vector>

#include "sctpdc/sctp/tcb.hpp"

namespace sctpdc::sctp {

std::size_t select_path(const Tcb& tcb);

// Path for retransmitting a chunk last sent on `avoid`: any other active
// path (lowest id first), otherwise select_path().
std::size_t select_retransmit_path(const Tcb& tcb, std::size_t avoid);

struct PathErrorEffects {
    bool became_inactive = false;
    bool association_failed = false;
};

PathErrorEffects on_path_error(Tcb& tcb, std::size_t path);

struct Probe {
    std::size_t path = 0;
    wire::Packet packet;
};

// One HEARTBEAT per path idle for at least hb_interval. Also ages out probes
// older than the path's rto, charging a path error for each.
std::vector<Probe> heartbeat_tick(Tcb& tcb, Time now);

enum class HeartbeatAckResult { unknown_nonce, refreshed, reactivated };

HeartbeatAckResult on_heartbeat_ack(Tcb& tcb, const wire::HeartbeatAckChunk& ack, Time now);

}  // namespace sctpdc::sctp
