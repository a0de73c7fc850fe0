#include "sctpdc/sctp/congestion.hpp"

#include <algorithm>

namespace sctpdc::sctp {

CongestionState initial_congestion_state(const AssocConfig& cfg, std::uint32_t peer_rwnd) {
    CongestionState cs;
    cs.cwnd = static_cast<std::uint32_t>(2 * cfg.mtu);
    cs.ssthresh = peer_rwnd;
    cs.rto = clamp_rto(cfg.rto_initial, RtoBounds::from(cfg));
    cs.mbs = cfg.mbs;
    return cs;
}

Duration clamp_rto(Duration rto, RtoBounds bounds) { return std::clamp(rto, bounds.min, bounds.max); }

CongestionState rtt_update(CongestionState cs, Duration sample, RtoBounds bounds) {
    if (!cs.has_rtt_sample) {
        cs.srtt = sample;
        cs.rttvar = sample / 2;
        cs.has_rtt_sample = true;
    } else {
        // rttvar uses the old srtt, so update it first.
        const Duration err = cs.srtt > sample ? cs.srtt - sample : sample - cs.srtt;
        cs.rttvar = (3 * cs.rttvar + err) / 4;
        cs.srtt = (7 * cs.srtt + sample) / 8;
    }
    cs.rto = clamp_rto(cs.srtt + 4 * cs.rttvar, bounds);
    return cs;
}

}  // namespace sctpdc::sctp
