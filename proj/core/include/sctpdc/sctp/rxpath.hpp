#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sctpdc/sctp/tcb.hpp"

namespace sctpdc::sctp {

struct SackDecision {
    unsigned emit = 0;       // SACKs to send now
    bool arm_timer = false;  // delayed / flush timer should be running
    Duration timer_delay{};
};

// Called once per received DATA packet. `out_of_order` covers a gap in the
// TSN map, a GBN discard, or a duplicate TSN.
SackDecision sack_decision(const SackPolicy& policy, SackCounters& counters, bool out_of_order);

// Delayed-ack / flush timer expiry: 1 if unacknowledged data is pending.
unsigned sack_timer_expired(const SackPolicy& policy, SackCounters& counters);

// Drains dups. In GBN mode the SACK never carries gap blocks.
wire::SackChunk build_sack(TsnMap& map, std::size_t rwnd_free, bool gbn = false);

// Releases `msg` plus any now-contiguous successors, in SSN order.
std::vector<InboundMessage> deliver_ordered(StreamInbox& inbox, InboundMessage msg);

struct RxResult {
    std::vector<InboundMessage> delivered;
    std::vector<wire::Packet> sacks;
    bool arm_sack_timer = false;
    Duration sack_timer_delay{};
    std::size_t accepted = 0;
    std::size_t duplicates = 0;
    std::size_t discarded = 0;
};

// Processes the DATA chunks of an accepted packet.
RxResult on_data(Tcb& tcb, const wire::Packet& packet, Time now);

std::optional<wire::Packet> on_sack_timer(Tcb& tcb, Time now);

}  // namespace sctpdc::sctp
