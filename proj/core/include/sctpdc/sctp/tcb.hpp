#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "sctpdc/sctp/config.hpp"
#include "sctpdc/sctp/path.hpp"
#include "sctpdc/sctp/recv_state.hpp"
#include "sctpdc/sctp/send_state.hpp"
#include "sctpdc/sim/cost_ledger.hpp"
#include "sctpdc/sim/rng.hpp"
#include "sctpdc/wire/codec.hpp"

namespace sctpdc::sctp {

enum class AssocState {
    closed,
    cookie_wait,
    cookie_echoed,
    established,
    shutdown_pending,
    shutdown_sent,
    shutdown_received,
    shutdown_ack_sent,
};

std::string_view to_string(AssocState s);

struct TcbCounters {
    std::uint64_t bad_vtag_discards = 0;
    std::uint64_t wrong_state_discards = 0;
    std::uint64_t unknown_nonce_acks = 0;
    std::uint64_t init_retransmits = 0;
    std::uint64_t cookie_retransmits = 0;
    std::uint64_t shutdown_retransmits = 0;
};

// Per-association transmission control block.
struct Tcb {
    AssocConfig config;
    AssocState state = AssocState::closed;
    std::uint32_t local_vtag = 0;
    std::uint32_t peer_vtag = 0;
    std::uint16_t local_port = 0;
    std::uint16_t peer_port = 0;

    wire::Tsn initial_tsn;
    wire::Tsn next_tsn;
    // Highest TSN the peer has cumulatively acknowledged.
    wire::Tsn peer_cum_tsn;
    std::uint16_t streams_out = 0;
    std::uint16_t streams_in = 0;
    std::uint32_t peer_rwnd = 0;
    std::size_t footprint_bytes = 0;

    std::vector<PathState> paths;
    SendState tx;
    RecvState rx;

    // Handshake bookkeeping for retransmission of INIT / COOKIE_ECHO.
    std::optional<wire::Packet> pending_handshake;
    unsigned handshake_attempts = 0;
    unsigned shutdown_attempts = 0;
    unsigned assoc_error_count = 0;
    Time established_at{};

    sim::Rng rng{0};
    sim::CostLedger* ledger = nullptr;
    std::uint32_t cost_key = 0;

    TcbCounters counters;

    wire::CodecOptions codec() const { return {config.max_packet_bytes(), config.checksum}; }
    std::size_t primary_path() const;
    std::size_t total_flight() const;
};

// Prepares paths, send and receive state for a newly created TCB.
void init_paths(Tcb& tcb, std::size_t n_paths);
void init_transfer_state(Tcb& tcb, wire::Tsn local_initial, wire::Tsn peer_initial, std::uint32_t peer_rwnd);

}  // namespace sctpdc::sctp
