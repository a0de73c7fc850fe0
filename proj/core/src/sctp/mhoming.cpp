#include "sctpdc/sctp/mhoming.hpp"

#include <algorithm>

namespace sctpdc::sctp {

std::size_t select_path(const Tcb& tcb) {
    const std::size_t primary = tcb.primary_path();
    if (tcb.paths[primary].active()) return primary;
    for (const auto& p : tcb.paths) {
        if (p.active()) return p.id;
    }
    return primary;
}

std::size_t select_retransmit_path(const Tcb& tcb, std::size_t avoid) {
    const std::size_t primary = tcb.primary_path();
    if (primary != avoid && tcb.paths[primary].active()) return primary;
    for (const auto& p : tcb.paths) {
        if (p.id != avoid && p.active()) return p.id;
    }
    return select_path(tcb);
}

PathErrorEffects on_path_error(Tcb& tcb, std::size_t path) {
    PathErrorEffects fx;
    auto& p = tcb.paths[path];
    ++p.error_count;
    if (p.active() && p.error_count >= p.error_threshold) {
        p.status = PathStatus::inactive;
        fx.became_inactive = true;
    }
    const bool all_down = std::none_of(tcb.paths.begin(), tcb.paths.end(), [](const PathState& s) { return s.active(); });
    fx.association_failed = all_down && tcb.assoc_error_count > tcb.config.assoc_max_retrans;
    return fx;
}

std::vector<Probe> heartbeat_tick(Tcb& tcb, Time now) {
    std::vector<Probe> out;
    if (!tcb.config.heartbeats) return out;
    for (auto& p : tcb.paths) {
        for (auto it = p.outstanding_probes.begin(); it != p.outstanding_probes.end();) {
            if (now - it->second >= p.cc.rto) {
                it = p.outstanding_probes.erase(it);
                p.cc.rto = std::min(p.cc.rto * 2, tcb.config.rto_max);
                on_path_error(tcb, p.id);
            } else {
                ++it;
            }
        }
        const Time idle_since = std::max(p.last_activity, p.last_probe);
        if (now - idle_since < p.hb_interval) continue;
        wire::HeartbeatChunk hb{tcb.rng.next_u64(), static_cast<std::uint32_t>(p.id)};
        p.outstanding_probes[hb.nonce] = now;
        p.last_probe = now;
        ++p.heartbeats_sent;
        wire::Packet pkt;
        pkt.src_port = tcb.local_port;
        pkt.dst_port = tcb.peer_port;
        pkt.verification_tag = tcb.peer_vtag;
        pkt.chunks.push_back(hb);
        out.push_back({p.id, std::move(pkt)});
    }
    return out;
}

HeartbeatAckResult on_heartbeat_ack(Tcb& tcb, const wire::HeartbeatAckChunk& ack, Time now) {
    if (ack.path_id >= tcb.paths.size()) {
        ++tcb.counters.unknown_nonce_acks;
        return HeartbeatAckResult::unknown_nonce;
    }
    auto& p = tcb.paths[ack.path_id];
    auto it = p.outstanding_probes.find(ack.nonce);
    if (it == p.outstanding_probes.end()) {
        ++tcb.counters.unknown_nonce_acks;
        return HeartbeatAckResult::unknown_nonce;
    }
    p.cc = rtt_update(p.cc, now - it->second, RtoBounds::from(tcb.config));
    p.outstanding_probes.erase(it);
    p.error_count = 0;
    tcb.assoc_error_count = 0;
    if (p.active()) return HeartbeatAckResult::refreshed;
    p.status = PathStatus::active;
    p.cc.cwnd = static_cast<std::uint32_t>(2 * tcb.config.mtu);
    p.cc.partial_bytes_acked = 0;
    return HeartbeatAckResult::reactivated;
}

}  // namespace sctpdc::sctp
