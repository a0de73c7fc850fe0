#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sctpdc/sctp/tcb.hpp"

namespace sctpdc::sctp {

enum class SubmitStatus { ok, not_established, stream_out_of_range, send_buffer_full, empty_message };

std::string_view to_string(SubmitStatus s);

struct SubmitResult {
    SubmitStatus status = SubmitStatus::ok;
    std::uint64_t message_id = 0;
    std::size_t chunks = 0;

    explicit operator bool() const { return status == SubmitStatus::ok; }
};

// Fragments a message into DATA chunks with consecutive TSNs and queues them.
SubmitResult submit(Tcb& tcb, wire::StreamId stream, std::span<const std::uint8_t> payload, bool ordered, Time now);

struct OutboundPacket {
    std::size_t path = 0;
    wire::Packet packet;
    std::size_t data_chunks = 0;
    std::size_t retransmitted_chunks = 0;
};

// Builds at most `mbs` packets from to_retransmit entries (first) and queued
// entries, honoring cwnd, peer rwnd and the Nagle rule.
std::vector<OutboundPacket> bundle_and_send(Tcb& tcb, Time now);

struct SackEffects {
    bool stale = false;
    bool cum_advanced = false;
    std::size_t newly_acked_bytes = 0;
    std::size_t fast_retransmits = 0;
    bool go_back = false;
    bool rtt_sampled = false;
};

SackEffects on_sack(Tcb& tcb, const wire::SackChunk& sack, Time now);

struct RtoEffects {
    std::size_t marked = 0;
    bool association_failed = false;
};

RtoEffects on_rto(Tcb& tcb, std::size_t path, Time now);

// Bytes of new data that could be submitted without hitting send-buffer-full.
std::size_t send_space(const Tcb& tcb);

}  // namespace sctpdc::sctp
