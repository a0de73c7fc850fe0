#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "sctpdc/sctp/config.hpp"
#include "sctpdc/wire/chunk.hpp"

namespace sctpdc::sctp {

struct TsnMap {
    wire::Tsn cum_tsn;
    std::set<wire::Tsn, wire::TsnLess> out_of_order;
    std::vector<wire::Tsn> dups;

    enum class Mark { fresh, duplicate };

    // Records an arriving TSN, advancing cum_tsn over any now-contiguous run.
    Mark mark(wire::Tsn tsn);
    bool seen(wire::Tsn tsn) const;
    bool has_gap() const { return !out_of_order.empty(); }
};

struct InboundMessage {
    wire::StreamId stream = 0;
    wire::Ssn ssn;
    bool unordered = false;
    wire::Tsn first_tsn;
    wire::Bytes payload;
};

struct StreamInbox {
    wire::Ssn next_ssn;
    std::map<wire::Ssn, InboundMessage, wire::SsnLess> pending;
};

// Counters consulted and updated by sack_decision().
struct SackCounters {
    unsigned packets_since_periodic = 0;
    bool unacked = false;  // data arrived since the last SACK of any kind
};

struct RecvCounters {
    std::uint64_t data_packets = 0;
    std::uint64_t chunks_received = 0;
    std::uint64_t duplicate_chunks = 0;
    std::uint64_t gbn_discards = 0;
    std::uint64_t rwnd_drops = 0;
    std::uint64_t messages_delivered = 0;
    std::uint64_t bytes_delivered = 0;
    std::uint64_t sacks_sent = 0;
};

struct RecvState {
    TsnMap map;
    // Buffered DATA chunks awaiting reassembly, keyed by TSN.
    std::map<wire::Tsn, wire::DataChunk, wire::TsnLess> fragments;
    std::vector<StreamInbox> inboxes;
    std::size_t capacity = 131072;
    std::size_t buffered_bytes = 0;
    SackPolicy policy;
    SackCounters sack_counters;
    bool gbn = false;
    RecvCounters counters;

    std::size_t rwnd_free() const { return buffered_bytes >= capacity ? 0 : capacity - buffered_bytes; }
};

}  // namespace sctpdc::sctp
