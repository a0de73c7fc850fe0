#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "sctpdc/sim/time.hpp"
#include "sctpdc/wire/chunk.hpp"

namespace sctpdc::sctp {

using sim::Duration;
using sim::Time;

enum class SackMode { every_packet, lk_double, every_k, delayed };

struct SackPolicy {
    SackMode mode = SackMode::every_packet;
    unsigned k = 7;                            // every_k
    Duration delay = sim::msec(200);           // delayed
    // Fallback flush for every_k so a sender stuck below k packets of
    // window still gets acknowledged.
    Duration flush_timeout = sim::usec(200);
    bool immediate_on_gap = true;

    static SackPolicy per_packet() { return {}; }
    static SackPolicy lk_double() { return {SackMode::lk_double}; }
    static SackPolicy per_k(unsigned k) {
        SackPolicy p{SackMode::every_k};
        p.k = k;
        return p;
    }
    static SackPolicy delayed(Duration t) {
        SackPolicy p{SackMode::delayed};
        p.delay = t;
        return p;
    }
};

// Parses "per-packet", "lk-double", "per-k:<k>", "delayed:<ms>".
SackPolicy parse_sack_policy(std::string_view text);
std::string to_string(const SackPolicy& p);

enum class AckMode { sack, gbn };
enum class CopyMode { legacy, optimized };
enum class FootprintMode { baseline, compact };

std::string_view to_string(AckMode m);
std::string_view to_string(CopyMode m);

inline constexpr std::size_t kBaselineTcbBytes = 10240;
inline constexpr std::size_t kCompactTcbBytes = 1024;
// Messages above this size take the zero-copy bundling path in optimized mode.
inline constexpr std::size_t kShortPathMaxBytes = 1024;

struct AssocConfig {
    std::uint16_t streams_out = 1;
    std::uint16_t streams_in = 1;
    std::uint32_t rwnd = 131072;
    std::size_t mtu = 1500;
    std::size_t send_buffer = 262144;

    SackPolicy sack;
    AckMode ack_mode = AckMode::sack;
    bool no_delay = false;  // Nagle-style hold on by default
    CopyMode copy_mode = CopyMode::optimized;
    unsigned mbs = 4;
    bool checksum = false;
    FootprintMode footprint = FootprintMode::baseline;
    bool bundle_data_with_cookie_echo = false;

    unsigned fast_retransmit_threshold = 4;
    // Consecutive non-advancing cumulative SACKs that trigger a go-back in GBN mode.
    unsigned gbn_dup_threshold = 1;

    Duration rto_initial = sim::msec(3);
    Duration rto_min = sim::msec(1);
    Duration rto_max = sim::sec(60);
    Duration cookie_lifetime = sim::sec(60);
    unsigned max_init_retransmits = 8;
    unsigned assoc_max_retrans = 10;
    unsigned max_shutdown_retransmits = 5;

    unsigned path_error_threshold = 5;
    Duration hb_interval = sim::msec(500);
    bool heartbeats = true;

    // Per-packet budget spent on network + common + DATA headers.
    static constexpr std::size_t kFragmentOverhead =
        wire::kNetworkHeaderBytes + wire::kCommonHeaderBytes + wire::kDataHeaderBytes;

    std::size_t fragment_payload() const { return mtu - kFragmentOverhead; }
    std::size_t max_packet_bytes() const { return mtu - wire::kNetworkHeaderBytes; }
    std::size_t footprint_bytes() const {
        return footprint == FootprintMode::baseline ? kBaselineTcbBytes : kCompactTcbBytes;
    }
};

}  // namespace sctpdc::sctp
