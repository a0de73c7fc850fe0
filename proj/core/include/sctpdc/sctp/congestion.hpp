#pragma once

#include <cstdint>

#include "sctpdc/sctp/config.hpp"

namespace sctpdc::sctp {

struct CongestionState {
    std::uint32_t cwnd = 0;
    std::uint32_t ssthresh = 0;
    std::uint32_t partial_bytes_acked = 0;
    std::uint32_t flight_size = 0;
    Duration srtt{};
    Duration rttvar{};
    Duration rto{};
    bool has_rtt_sample = false;
    unsigned mbs = 4;

    bool in_slow_start() const { return cwnd <= ssthresh; }
};

struct RtoBounds {
    Duration min = sim::msec(1);
    Duration max = sim::sec(60);

    static RtoBounds from(const AssocConfig& c) { return {c.rto_min, c.rto_max}; }
};

CongestionState initial_congestion_state(const AssocConfig& cfg, std::uint32_t peer_rwnd);

// Standard smoothed estimator (alpha 1/8, beta 1/4), rto = srtt + 4 rttvar,
// clamped. Samples must come from chunks that were sent exactly once.
CongestionState rtt_update(CongestionState cs, Duration sample, RtoBounds bounds);

Duration clamp_rto(Duration rto, RtoBounds bounds);

}  // namespace sctpdc::sctp
