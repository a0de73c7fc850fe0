#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "sctpdc/sim/time.hpp"
#include "sctpdc/wire/tsn.hpp"

namespace sctpdc::tcp {

using sim::Duration;
using sim::Time;

// 32-bit sequence space with the same serial arithmetic as TSNs.
using Seq = wire::Tsn;

inline constexpr std::size_t kTcpHeaderBytes = 20;
inline constexpr std::size_t kTcbFootprintBytes = 1024;

struct TcpConfig {
    std::size_t mtu = 1500;
    std::uint32_t rwnd = 131072;
    std::size_t send_buffer = 262144;
    bool nagle = true;
    bool sack_enabled = false;
    unsigned dupthresh = 3;
    bool window_inflation = false;  // +3 MSS on entering fast recovery
    unsigned delayed_ack_segments = 2;
    Duration delayed_ack_timeout = sim::msec(200);
    Duration rto_initial = sim::msec(3);
    Duration rto_min = sim::msec(1);
    Duration rto_max = sim::sec(60);

    std::size_t mss() const { return mtu - 40; }
};

struct SackBlock {
    Seq start;  // first byte
    Seq end;    // one past the last byte
    friend bool operator==(const SackBlock&, const SackBlock&) = default;
};

struct Segment {
    std::uint16_t src_port = 0;
    std::uint16_t dst_port = 0;
    Seq seq;
    Seq ack;
    std::uint32_t window = 0;
    std::vector<SackBlock> sacks;
    std::vector<std::uint8_t> payload;

    friend bool operator==(const Segment&, const Segment&) = default;
};

// Byte layout: ports, seq, ack, window (4 bytes), nsack (2), pad (2), then
// 8 bytes per SACK block, then payload. Not RFC 793; just enough to move
// segments across the simulator as bytes.
std::vector<std::uint8_t> encode_segment(const Segment& s);
Segment decode_segment(std::span<const std::uint8_t> bytes);
// Bytes the link serializes for this segment: IP + TCP headers, options, payload.
std::size_t segment_wire_bytes(const Segment& s);

struct TcpCounters {
    std::uint64_t bytes_submitted = 0;
    std::uint64_t segments_sent = 0;
    std::uint64_t segments_retransmitted = 0;
    std::uint64_t fast_retransmits = 0;
    std::uint64_t timeouts = 0;
    std::uint64_t acks_received = 0;
    std::uint64_t dup_acks = 0;
    std::uint64_t acks_sent = 0;
    std::uint64_t bytes_delivered = 0;
    std::uint64_t ooo_segments = 0;
};

struct TcpConn {
    TcpConfig config;
    std::uint16_t local_port = 0;
    std::uint16_t peer_port = 0;

    // Sender.
    Seq snd_una;
    Seq snd_nxt;
    Seq snd_max;  // highest sequence ever sent; snd_nxt drops below it after a timeout
    std::deque<std::uint8_t> send_buf;  // bytes from snd_una onward
    std::uint32_t cwnd = 0;
    std::uint32_t ssthresh = 0;
    std::uint32_t peer_window = 0;
    unsigned dupacks = 0;
    bool in_recovery = false;
    Seq recover;
    bool retransmit_pending = false;
    // Receiver-reported blocks, kept for selective retransmit.
    std::vector<SackBlock> scoreboard;
    std::optional<Seq> retransmit_hint;

    Duration srtt{};
    Duration rttvar{};
    Duration rto{};
    bool has_rtt = false;
    std::optional<std::pair<Seq, Time>> timing;  // one segment timed per RTT

    // Receiver.
    Seq rcv_nxt;
    std::map<Seq, std::vector<std::uint8_t>, wire::TsnLess> ooo;
    std::size_t ooo_bytes = 0;
    unsigned unacked_segments = 0;

    std::size_t footprint_bytes = kTcbFootprintBytes;
    TcpCounters counters;

    std::size_t flight() const { return snd_nxt.distance_from(snd_una); }
    std::size_t unsent() const { return send_buf.size() - flight(); }
    std::uint32_t advertised_window() const;
};

TcpConn make_conn(const TcpConfig& config, std::uint16_t local_port, std::uint16_t peer_port, Seq local_isn,
                  Seq peer_isn);

enum class TcpSubmitStatus { ok, buffer_full };

TcpSubmitStatus tcp_submit(TcpConn& conn, std::span<const std::uint8_t> bytes);

std::vector<Segment> tcp_send(TcpConn& conn, Time now);

struct AckEffects {
    bool ignored = false;
    std::size_t newly_acked = 0;
    bool duplicate = false;
    bool fast_retransmit = false;
};

AckEffects tcp_on_ack(TcpConn& conn, const Segment& ack, Time now);

// Retransmission timer expiry.
void tcp_on_rto(TcpConn& conn, Time now);

struct ReceiveResult {
    std::vector<std::uint8_t> delivered;
    std::optional<Segment> ack;
    bool arm_delayed_ack = false;
};

ReceiveResult tcp_receiver(TcpConn& conn, const Segment& seg, Time now);

// Delayed-ack timer expiry.
std::optional<Segment> tcp_delayed_ack(TcpConn& conn);

}  // namespace sctpdc::tcp
