#include "sctpdc/sctp/tcb.hpp"

#include <algorithm>

namespace sctpdc::sctp {

std::string_view to_string(AssocState s) {
    switch (s) {
        case AssocState::closed: return "CLOSED";
        case AssocState::cookie_wait: return "COOKIE_WAIT";
        case AssocState::cookie_echoed: return "COOKIE_ECHOED";
        case AssocState::established: return "ESTABLISHED";
        case AssocState::shutdown_pending: return "SHUTDOWN_PENDING";
        case AssocState::shutdown_sent: return "SHUTDOWN_SENT";
        case AssocState::shutdown_received: return "SHUTDOWN_RECEIVED";
        case AssocState::shutdown_ack_sent: return "SHUTDOWN_ACK_SENT";
    }
    return "?";
}

std::string_view to_string(ChunkState s) {
    switch (s) {
        case ChunkState::queued: return "queued";
        case ChunkState::in_flight: return "in_flight";
        case ChunkState::acked: return "acked";
        case ChunkState::to_retransmit: return "to_retransmit";
    }
    return "?";
}

std::size_t Tcb::primary_path() const {
    for (const auto& p : paths) {
        if (p.is_primary) return p.id;
    }
    return 0;
}

std::size_t Tcb::total_flight() const {
    std::size_t sum = 0;
    for (const auto& p : paths) sum += p.cc.flight_size;
    return sum;
}

void init_paths(Tcb& tcb, std::size_t n_paths) {
    tcb.paths.clear();
    for (std::size_t i = 0; i < n_paths; ++i) {
        PathState p;
        p.id = i;
        p.is_primary = i == 0;
        p.error_threshold = tcb.config.path_error_threshold;
        p.hb_interval = tcb.config.hb_interval;
        p.cc = initial_congestion_state(tcb.config, tcb.config.rwnd);
        tcb.paths.push_back(p);
    }
    tcb.footprint_bytes = tcb.config.footprint_bytes();
}

void init_transfer_state(Tcb& tcb, wire::Tsn local_initial, wire::Tsn peer_initial, std::uint32_t peer_rwnd) {
    tcb.initial_tsn = local_initial;
    tcb.next_tsn = local_initial;
    tcb.peer_cum_tsn = local_initial - 1;
    tcb.peer_rwnd = peer_rwnd;
    for (auto& p : tcb.paths) p.cc = initial_congestion_state(tcb.config, peer_rwnd);

    tcb.tx = SendState{};
    tcb.tx.next_ssn.assign(tcb.streams_out, wire::Ssn{});
    tcb.tx.copies.mode = tcb.config.copy_mode;

    tcb.rx = RecvState{};
    tcb.rx.map.cum_tsn = peer_initial - 1;
    tcb.rx.inboxes.assign(tcb.streams_in, StreamInbox{});
    tcb.rx.capacity = tcb.config.rwnd;
    tcb.rx.policy = tcb.config.sack;
    tcb.rx.gbn = tcb.config.ack_mode == AckMode::gbn;
}

OutboundChunkEntry* SendState::find(wire::Tsn tsn) {
    if (queue.empty()) return nullptr;
    const std::uint32_t idx = tsn.distance_from(queue.front().chunk.tsn);
    if (idx >= queue.size()) return nullptr;
    return &queue[idx];
}

std::size_t SendState::in_flight_bytes() const {
    std::size_t sum = 0;
    for (const auto& e : queue) {
        if (e.state == ChunkState::in_flight) sum += e.payload_bytes();
    }
    return sum;
}

bool SendState::has_outstanding() const {
    return std::any_of(queue.begin(), queue.end(), [](const OutboundChunkEntry& e) {
        return e.state == ChunkState::in_flight || e.state == ChunkState::to_retransmit;
    });
}

TsnMap::Mark TsnMap::mark(wire::Tsn tsn) {
    if (tsn <= cum_tsn || out_of_order.contains(tsn)) {
        dups.push_back(tsn);
        return Mark::duplicate;
    }
    if (tsn == cum_tsn.next()) {
        cum_tsn = tsn;
        while (!out_of_order.empty() && *out_of_order.begin() == cum_tsn.next()) {
            cum_tsn = *out_of_order.begin();
            out_of_order.erase(out_of_order.begin());
        }
    } else {
        out_of_order.insert(tsn);
    }
    return Mark::fresh;
}

bool TsnMap::seen(wire::Tsn tsn) const { return tsn <= cum_tsn || out_of_order.contains(tsn); }

}  // namespace sctpdc::sctp
