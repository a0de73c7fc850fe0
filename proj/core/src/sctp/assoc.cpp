#include "sctpdc/sctp/assoc.hpp"

#include <sodium.h>

#include <algorithm>
#include <cstring>

namespace sctpdc::sctp {

namespace {

void put32(wire::Bytes& out, std::uint32_t v) {
    for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}
void put16(wire::Bytes& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}
void put64(wire::Bytes& out, std::uint64_t v) {
    put32(out, static_cast<std::uint32_t>(v >> 32));
    put32(out, static_cast<std::uint32_t>(v));
}

std::uint64_t get(std::span<const std::uint8_t> b, std::size_t& off, int n) {
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v = (v << 8) | b[off++];
    return v;
}

// Cookie fields without the MAC; what the MAC is computed over.
wire::Bytes cookie_body(const Cookie& c) {
    wire::Bytes out;
    out.reserve(Cookie::kEncodedBytes);
    put32(out, c.peer_vtag);
    put32(out, c.local_vtag);
    put32(out, c.peer_initial_tsn.value);
    put32(out, c.local_initial_tsn.value);
    put32(out, c.peer_rwnd);
    put16(out, c.streams_out);
    put16(out, c.streams_in);
    put16(out, c.peer_port);
    put16(out, c.local_port);
    put64(out, static_cast<std::uint64_t>(c.issued_at.count()));
    return out;
}

std::uint32_t nonzero_tag(sim::Rng& rng) {
    std::uint32_t v = 0;
    while (v == 0) v = rng.next_u32();
    return v;
}

void ensure_sodium() {
    static const bool ok = sodium_init() >= 0;
    if (!ok) throw std::runtime_error("libsodium initialization failed");
}

}  // namespace

wire::Bytes Cookie::encode() const {
    wire::Bytes out = cookie_body(*this);
    out.insert(out.end(), mac.begin(), mac.end());
    return out;
}

std::optional<Cookie> Cookie::decode(std::span<const std::uint8_t> b) {
    if (b.size() != kEncodedBytes) return std::nullopt;
    Cookie c;
    std::size_t off = 0;
    c.peer_vtag = static_cast<std::uint32_t>(get(b, off, 4));
    c.local_vtag = static_cast<std::uint32_t>(get(b, off, 4));
    c.peer_initial_tsn = wire::Tsn(static_cast<std::uint32_t>(get(b, off, 4)));
    c.local_initial_tsn = wire::Tsn(static_cast<std::uint32_t>(get(b, off, 4)));
    c.peer_rwnd = static_cast<std::uint32_t>(get(b, off, 4));
    c.streams_out = static_cast<std::uint16_t>(get(b, off, 2));
    c.streams_in = static_cast<std::uint16_t>(get(b, off, 2));
    c.peer_port = static_cast<std::uint16_t>(get(b, off, 2));
    c.local_port = static_cast<std::uint16_t>(get(b, off, 2));
    c.issued_at = Time(static_cast<std::int64_t>(get(b, off, 8)));
    std::copy(b.begin() + static_cast<std::ptrdiff_t>(off), b.end(), c.mac.begin());
    return c;
}

std::array<std::uint8_t, 8> cookie_mac(const Cookie& c, const CookieSecret& secret) {
    static_assert(crypto_shorthash_BYTES == 8 && crypto_shorthash_KEYBYTES == 16);
    ensure_sodium();
    const wire::Bytes body = cookie_body(c);
    std::array<std::uint8_t, 8> mac{};
    crypto_shorthash(mac.data(), body.data(), body.size(), secret.data());
    return mac;
}

wire::Packet make_packet(const Tcb& tcb, wire::Chunk chunk) {
    wire::Packet p;
    p.src_port = tcb.local_port;
    p.dst_port = tcb.peer_port;
    p.verification_tag = tcb.peer_vtag;
    p.chunks.push_back(std::move(chunk));
    return p;
}

std::pair<Tcb, wire::Packet> assoc_init(const AssocConfig& config, std::size_t n_paths, std::uint16_t local_port,
                                        std::uint16_t peer_port, Time now, sim::Rng rng) {
    if (config.streams_out == 0 || config.streams_in == 0) throw InvalidConfig("stream counts must be >= 1");
    if (n_paths == 0) throw InvalidConfig("an association needs at least one path");
    if (config.mtu <= AssocConfig::kFragmentOverhead) throw InvalidConfig("mtu too small");

    Tcb tcb;
    tcb.config = config;
    tcb.rng = rng;
    tcb.local_port = local_port;
    tcb.peer_port = peer_port;
    tcb.local_vtag = nonzero_tag(tcb.rng);
    tcb.initial_tsn = wire::Tsn(tcb.rng.next_u32());
    tcb.next_tsn = tcb.initial_tsn;
    tcb.state = AssocState::cookie_wait;
    init_paths(tcb, n_paths);

    wire::InitChunk init;
    init.init_tag = tcb.local_vtag;
    init.a_rwnd = config.rwnd;
    init.n_out_streams = config.streams_out;
    init.n_in_streams = config.streams_in;
    init.initial_tsn = tcb.initial_tsn;

    wire::Packet p;
    p.src_port = local_port;
    p.dst_port = peer_port;
    p.verification_tag = 0;
    p.chunks.push_back(init);
    tcb.pending_handshake = p;
    tcb.handshake_attempts = 1;
    tcb.established_at = now;  // overwritten on COOKIE_ACK; kept as the start mark until then
    return {std::move(tcb), std::move(p)};
}

wire::Packet listener_on_init(Listener& listener, const wire::InitChunk& init, std::uint16_t peer_port, Time now) {
    Cookie c;
    c.peer_vtag = init.init_tag;
    c.local_vtag = nonzero_tag(listener.rng);
    c.peer_initial_tsn = init.initial_tsn;
    c.local_initial_tsn = wire::Tsn(listener.rng.next_u32());
    c.peer_rwnd = init.a_rwnd;
    c.streams_out = std::min(listener.config.streams_out, init.n_in_streams);
    c.streams_in = std::min(listener.config.streams_in, init.n_out_streams);
    c.peer_port = peer_port;
    c.local_port = listener.port;
    c.issued_at = now;
    c.mac = cookie_mac(c, listener.secret);

    wire::InitAckChunk ack;
    ack.init_tag = c.local_vtag;
    ack.a_rwnd = listener.config.rwnd;
    ack.n_out_streams = c.streams_out;
    ack.n_in_streams = c.streams_in;
    ack.initial_tsn = c.local_initial_tsn;
    ack.cookie = c.encode();

    wire::Packet p;
    p.src_port = listener.port;
    p.dst_port = peer_port;
    p.verification_tag = init.init_tag;
    p.chunks.push_back(std::move(ack));
    return p;
}

std::optional<wire::Packet> on_init_ack(Tcb& tcb, const wire::InitAckChunk& ack, Time) {
    if (tcb.state != AssocState::cookie_wait || ack.init_tag == 0 || ack.n_in_streams == 0 ||
        ack.n_out_streams == 0) {
        ++tcb.counters.wrong_state_discards;
        return std::nullopt;
    }
    tcb.peer_vtag = ack.init_tag;
    tcb.streams_out = std::min(tcb.config.streams_out, ack.n_in_streams);
    tcb.streams_in = std::min(tcb.config.streams_in, ack.n_out_streams);
    init_transfer_state(tcb, tcb.initial_tsn, ack.initial_tsn, ack.a_rwnd);
    tcb.state = AssocState::cookie_echoed;

    wire::Packet p = make_packet(tcb, wire::CookieEchoChunk{ack.cookie});
    tcb.pending_handshake = p;
    tcb.handshake_attempts = 1;
    return p;
}

CookieEchoResult listener_on_cookie_echo(Listener& listener, const wire::CookieEchoChunk& echo, Time now) {
    CookieEchoResult r;
    auto cookie = Cookie::decode(echo.cookie);
    if (!cookie) return r;
    r.cookie = cookie;
    const auto expected = cookie_mac(*cookie, listener.secret);
    if (sodium_memcmp(expected.data(), cookie->mac.data(), expected.size()) != 0) {
        r.status = CookieStatus::bad_mac;
        return r;
    }
    if (now < cookie->issued_at || now - cookie->issued_at > listener.config.cookie_lifetime) {
        r.status = CookieStatus::stale;
        return r;
    }

    Tcb tcb;
    tcb.config = listener.config;
    tcb.rng = listener.rng.split(cookie->local_vtag);
    tcb.local_port = cookie->local_port;
    tcb.peer_port = cookie->peer_port;
    tcb.local_vtag = cookie->local_vtag;
    tcb.peer_vtag = cookie->peer_vtag;
    tcb.streams_out = cookie->streams_out;
    tcb.streams_in = cookie->streams_in;
    init_paths(tcb, listener.n_paths);
    init_transfer_state(tcb, cookie->local_initial_tsn, cookie->peer_initial_tsn, cookie->peer_rwnd);
    tcb.state = AssocState::established;
    tcb.established_at = now;

    r.status = CookieStatus::ok;
    r.cookie_ack = make_packet(tcb, wire::CookieAckChunk{});
    r.tcb = std::move(tcb);
    return r;
}

bool on_cookie_ack(Tcb& tcb, Time now) {
    if (tcb.state != AssocState::cookie_echoed) return false;
    tcb.state = AssocState::established;
    tcb.pending_handshake.reset();
    tcb.handshake_attempts = 0;
    tcb.established_at = now;
    return true;
}

Verdict verify_inbound(const Tcb& tcb, const wire::Packet& packet) {
    if (tcb.state == AssocState::closed) return Verdict::discard;
    const bool has_init = std::any_of(packet.chunks.begin(), packet.chunks.end(), [](const wire::Chunk& c) {
        return wire::chunk_type(c) == wire::ChunkType::init;
    });
    if (has_init) return packet.verification_tag == 0 ? Verdict::accept : Verdict::discard;
    return packet.verification_tag == tcb.local_vtag ? Verdict::accept : Verdict::discard;
}

std::string_view to_string(ChunkAction a) {
    switch (a) {
        case ChunkAction::discard: return "discard";
        case ChunkAction::handshake: return "handshake";
        case ChunkAction::process_data: return "process_data";
        case ChunkAction::process_sack: return "process_sack";
        case ChunkAction::reply_heartbeat: return "reply_heartbeat";
        case ChunkAction::process_heartbeat_ack: return "process_heartbeat_ack";
        case ChunkAction::shutdown_step: return "shutdown_step";
        case ChunkAction::abort: return "abort";
    }
    return "?";
}

ChunkAction dispatch_rule(AssocState state, wire::ChunkType type) {
    using S = AssocState;
    using T = wire::ChunkType;
    using A = ChunkAction;
    const auto in = [state](std::initializer_list<S> set) {
        return std::find(set.begin(), set.end(), state) != set.end();
    };
    const bool live = !in({S::closed, S::cookie_wait});

    switch (type) {
        case T::data:
            return in({S::established, S::shutdown_pending, S::shutdown_sent}) ? A::process_data : A::discard;
        case T::sack:
            return in({S::established, S::shutdown_pending, S::shutdown_sent, S::shutdown_received})
                       ? A::process_sack
                       : A::discard;
        case T::init: return in({S::closed}) ? A::handshake : A::discard;
        case T::init_ack: return in({S::cookie_wait}) ? A::handshake : A::discard;
        case T::cookie_echo: return in({S::closed, S::established}) ? A::handshake : A::discard;
        case T::cookie_ack: return in({S::cookie_echoed}) ? A::handshake : A::discard;
        case T::heartbeat: return live ? A::reply_heartbeat : A::discard;
        case T::heartbeat_ack: return live ? A::process_heartbeat_ack : A::discard;
        case T::shutdown:
            return in({S::established, S::shutdown_pending, S::shutdown_sent, S::shutdown_received,
                       S::shutdown_ack_sent})
                       ? A::shutdown_step
                       : A::discard;
        case T::shutdown_ack:
            return in({S::closed, S::shutdown_sent, S::shutdown_ack_sent}) ? A::shutdown_step : A::discard;
        case T::shutdown_complete: return in({S::shutdown_ack_sent}) ? A::shutdown_step : A::discard;
        case T::abort: return state == S::closed ? A::discard : A::abort;
    }
    return A::discard;
}

namespace {

bool send_queue_drained(const Tcb& tcb) { return tcb.tx.queue.empty(); }

wire::Packet shutdown_packet(Tcb& tcb) {
    return make_packet(tcb, wire::ShutdownChunk{tcb.rx.map.cum_tsn});
}

}  // namespace

std::optional<wire::Packet> shutdown(Tcb& tcb) {
    if (tcb.state != AssocState::established) return std::nullopt;
    tcb.state = AssocState::shutdown_pending;
    return shutdown_progress(tcb);
}

std::optional<wire::Packet> shutdown_progress(Tcb& tcb) {
    if (!send_queue_drained(tcb)) return std::nullopt;
    if (tcb.state == AssocState::shutdown_pending) {
        tcb.state = AssocState::shutdown_sent;
        tcb.shutdown_attempts = 1;
        return shutdown_packet(tcb);
    }
    if (tcb.state == AssocState::shutdown_received) {
        tcb.state = AssocState::shutdown_ack_sent;
        tcb.shutdown_attempts = 1;
        return make_packet(tcb, wire::ShutdownAckChunk{});
    }
    return std::nullopt;
}

std::optional<wire::Packet> on_shutdown(Tcb& tcb, const wire::ShutdownChunk&, Time) {
    switch (tcb.state) {
        case AssocState::established:
        case AssocState::shutdown_pending:
            tcb.state = AssocState::shutdown_received;
            return shutdown_progress(tcb);
        case AssocState::shutdown_sent:
            // Both sides closing at once: answer with SHUTDOWN_ACK.
            tcb.state = AssocState::shutdown_ack_sent;
            tcb.shutdown_attempts = 1;
            return make_packet(tcb, wire::ShutdownAckChunk{});
        case AssocState::shutdown_ack_sent:
            return make_packet(tcb, wire::ShutdownAckChunk{});
        default:
            return std::nullopt;
    }
}

std::optional<wire::Packet> on_shutdown_ack(Tcb& tcb) {
    if (tcb.state != AssocState::shutdown_sent && tcb.state != AssocState::shutdown_ack_sent &&
        tcb.state != AssocState::closed) {
        ++tcb.counters.wrong_state_discards;
        return std::nullopt;
    }
    tcb.state = AssocState::closed;
    return make_packet(tcb, wire::ShutdownCompleteChunk{});
}

void on_shutdown_complete(Tcb& tcb) {
    if (tcb.state == AssocState::shutdown_ack_sent) tcb.state = AssocState::closed;
}

std::optional<wire::Packet> on_shutdown_timeout(Tcb& tcb) {
    if (tcb.state != AssocState::shutdown_sent && tcb.state != AssocState::shutdown_ack_sent) return std::nullopt;
    if (tcb.shutdown_attempts > tcb.config.max_shutdown_retransmits) {
        tcb.state = AssocState::closed;
        return make_packet(tcb, wire::AbortChunk{});
    }
    ++tcb.shutdown_attempts;
    ++tcb.counters.shutdown_retransmits;
    if (tcb.state == AssocState::shutdown_sent) return shutdown_packet(tcb);
    return make_packet(tcb, wire::ShutdownAckChunk{});
}

}  // namespace sctpdc::sctp
