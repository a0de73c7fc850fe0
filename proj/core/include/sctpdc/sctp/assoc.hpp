#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <utility>

#include "sctpdc/sctp/tcb.hpp"

namespace sctpdc::sctp {

class InvalidConfig : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Everything the listener needs to rebuild an association from a cookie.
struct Cookie {
    std::uint32_t peer_vtag = 0;   // the initiator's init_tag
    std::uint32_t local_vtag = 0;  // the tag the listener chose
    wire::Tsn peer_initial_tsn;
    wire::Tsn local_initial_tsn;
    std::uint32_t peer_rwnd = 0;
    std::uint16_t streams_out = 0;  // listener -> initiator
    std::uint16_t streams_in = 0;   // initiator -> listener
    std::uint16_t peer_port = 0;
    std::uint16_t local_port = 0;
    Time issued_at{};
    std::array<std::uint8_t, 8> mac{};

    static constexpr std::size_t kEncodedBytes = 36 + 8;

    wire::Bytes encode() const;
    static std::optional<Cookie> decode(std::span<const std::uint8_t> bytes);
    friend bool operator==(const Cookie&, const Cookie&) = default;
};

using CookieSecret = std::array<std::uint8_t, 16>;

// 8-byte keyed MAC over all cookie fields except the MAC itself.
std::array<std::uint8_t, 8> cookie_mac(const Cookie& c, const CookieSecret& secret);

// Stateless responder: holds only configuration and the cookie secret.
struct Listener {
    AssocConfig config;
    CookieSecret secret{};
    std::uint16_t port = 0;
    std::size_t n_paths = 1;
    sim::Rng rng{0};
};

// Initiator side: fresh TCB in COOKIE_WAIT and the INIT packet (vtag 0).
std::pair<Tcb, wire::Packet> assoc_init(const AssocConfig& config, std::size_t n_paths, std::uint16_t local_port,
                                        std::uint16_t peer_port, Time now, sim::Rng rng);

// Listener side. Allocates nothing; the association parameters travel in the cookie.
wire::Packet listener_on_init(Listener& listener, const wire::InitChunk& init, std::uint16_t peer_port, Time now);

// COOKIE_WAIT -> COOKIE_ECHOED. Returns the COOKIE_ECHO packet, or nullopt
// when the INIT_ACK arrives in any other state (discarded).
std::optional<wire::Packet> on_init_ack(Tcb& tcb, const wire::InitAckChunk& ack, Time now);

enum class CookieStatus { ok, bad_mac, stale, malformed };

struct CookieEchoResult {
    CookieStatus status = CookieStatus::malformed;
    std::optional<Cookie> cookie;
    std::optional<Tcb> tcb;
    std::optional<wire::Packet> cookie_ack;
};

// Verifies the cookie and materializes an ESTABLISHED TCB from its contents.
CookieEchoResult listener_on_cookie_echo(Listener& listener, const wire::CookieEchoChunk& echo, Time now);

// COOKIE_ECHOED -> ESTABLISHED. Returns false (no-op) in any other state.
bool on_cookie_ack(Tcb& tcb, Time now);

enum class Verdict { accept, discard };

Verdict verify_inbound(const Tcb& tcb, const wire::Packet& packet);

// How the dispatcher treats a chunk type in a given association state.
enum class ChunkAction {
    discard,
    handshake,       // INIT/INIT_ACK/COOKIE_* processing
    process_data,
    process_sack,
    reply_heartbeat,
    process_heartbeat_ack,
    shutdown_step,   // SHUTDOWN/SHUTDOWN_ACK/SHUTDOWN_COMPLETE processing
    abort,
};

std::string_view to_string(ChunkAction a);
ChunkAction dispatch_rule(AssocState state, wire::ChunkType type);

// Teardown. All return the packet to send, if any.
// ESTABLISHED -> SHUTDOWN_PENDING, or straight to SHUTDOWN_SENT when nothing is outstanding.
std::optional<wire::Packet> shutdown(Tcb& tcb);
// Called after SACK processing; sends the deferred SHUTDOWN / SHUTDOWN_ACK once the queue drains.
std::optional<wire::Packet> shutdown_progress(Tcb& tcb);
std::optional<wire::Packet> on_shutdown(Tcb& tcb, const wire::ShutdownChunk& chunk, Time now);
std::optional<wire::Packet> on_shutdown_ack(Tcb& tcb);
void on_shutdown_complete(Tcb& tcb);
// SHUTDOWN or SHUTDOWN_ACK to retransmit after T2 expiry; ABORT once attempts run out.
std::optional<wire::Packet> on_shutdown_timeout(Tcb& tcb);

wire::Packet make_packet(const Tcb& tcb, wire::Chunk chunk);

}  // namespace sctpdc::sctp
