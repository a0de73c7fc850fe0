#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "sctpdc/sctp/config.hpp"
#include "sctpdc/wire/chunk.hpp"

namespace sctpdc::sctp {

enum class ChunkState { queued, in_flight, acked, to_retransmit };

std::string_view to_string(ChunkState s);

struct OutboundChunkEntry {
    wire::DataChunk chunk;
    ChunkState state = ChunkState::queued;
    Time first_sent_at{};
    Time last_sent_at{};
    std::size_t path = 0;
    unsigned transmit_count = 0;
    unsigned missing_reports = 0;
    bool fast_retransmitted = false;
    // Set by a timeout: retransmit on a different active path if there is one.
    std::optional<std::size_t> avoid_path;
    std::uint64_t message_id = 0;

    std::size_t payload_bytes() const { return chunk.payload.size(); }
};

struct CopyLedger {
    CopyMode mode = CopyMode::optimized;
    std::uint64_t copy_events = 0;
    std::uint64_t copy_bytes = 0;

    static constexpr unsigned copies_per_message(CopyMode m) { return m == CopyMode::legacy ? 3 : 2; }
};

struct SendCounters {
    std::uint64_t messages_submitted = 0;
    std::uint64_t bytes_submitted = 0;
    std::uint64_t chunks_sent = 0;
    std::uint64_t chunks_retransmitted = 0;
    std::uint64_t packets_sent = 0;
    std::uint64_t fast_retransmits = 0;
    std::uint64_t go_backs = 0;
    std::uint64_t timeouts = 0;
    std::uint64_t sacks_received = 0;
    std::uint64_t stale_sacks = 0;
};

struct SendState {
    // Entries in TSN order; the front is the lowest TSN not yet cumulatively acked.
    std::deque<OutboundChunkEntry> queue;
    std::size_t unsent = 0;  // trailing entries still in `queued`
    std::size_t buffered_bytes = 0;
    std::vector<wire::Ssn> next_ssn;
    std::uint64_t next_message_id = 1;
    CopyLedger copies;

    bool in_fast_recovery = false;
    wire::Tsn fast_recovery_exit;
    unsigned gbn_dup_count = 0;
    // A go-back is allowed again once the cumulative point has moved.
    bool gbn_armed = true;

    SendCounters counters;

    OutboundChunkEntry* find(wire::Tsn tsn);
    std::size_t in_flight_bytes() const;
    bool has_outstanding() const;  // anything sent and not yet acked
};

}  // namespace sctpdc::sctp
