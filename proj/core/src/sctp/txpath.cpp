#include "sctpdc/sctp/txpath.hpp"

#include <algorithm>

#include "sctpdc/sctp/assoc.hpp"
#include "sctpdc/sctp/mhoming.hpp"

namespace sctpdc::sctp {

std::string_view to_string(SubmitStatus s) {
    switch (s) {
        case SubmitStatus::ok: return "ok";
        case SubmitStatus::not_established: return "not-established";
        case SubmitStatus::stream_out_of_range: return "stream-out-of-range";
        case SubmitStatus::send_buffer_full: return "send-buffer-full";
        case SubmitStatus::empty_message: return "empty-message";
    }
    return "?";
}

std::size_t send_space(const Tcb& tcb) {
    const std::size_t cap = tcb.config.send_buffer;
    return tcb.tx.buffered_bytes >= cap ? 0 : cap - tcb.tx.buffered_bytes;
}

SubmitResult submit(Tcb& tcb, wire::StreamId stream, std::span<const std::uint8_t> payload, bool ordered, Time) {
    SubmitResult r;
    const bool early_data = tcb.state == AssocState::cookie_echoed && tcb.config.bundle_data_with_cookie_echo;
    if (tcb.state != AssocState::established && !early_data) {
        r.status = SubmitStatus::not_established;
        return r;
    }
    if (stream >= tcb.streams_out) {
        r.status = SubmitStatus::stream_out_of_range;
        return r;
    }
    if (payload.empty()) {
        r.status = SubmitStatus::empty_message;
        return r;
    }
    // An oversized message is still accepted into an empty buffer.
    if (tcb.tx.buffered_bytes > 0 && tcb.tx.buffered_bytes + payload.size() > tcb.config.send_buffer) {
        r.status = SubmitStatus::send_buffer_full;
        return r;
    }

    auto& tx = tcb.tx;
    const std::size_t frag = tcb.config.fragment_payload();
    const std::size_t n = (payload.size() + frag - 1) / frag;
    wire::Ssn ssn{};
    if (ordered) {
        ssn = tx.next_ssn[stream];
        tx.next_ssn[stream] = ssn.next();
    }
    r.message_id = tx.next_message_id++;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t off = i * frag;
        const std::size_t len = std::min(frag, payload.size() - off);
        OutboundChunkEntry e;
        e.chunk.tsn = tcb.next_tsn;
        e.chunk.stream = stream;
        e.chunk.ssn = ssn;
        e.chunk.flags = {!ordered, i == 0, i + 1 == n};
        e.chunk.payload.assign(payload.begin() + static_cast<std::ptrdiff_t>(off),
                               payload.begin() + static_cast<std::ptrdiff_t>(off + len));
        e.message_id = r.message_id;
        tx.queue.push_back(std::move(e));
        tcb.next_tsn = tcb.next_tsn.next();
    }
    tx.unsent += n;
    tx.buffered_bytes += payload.size();
    r.chunks = n;

    const unsigned copies = CopyLedger::copies_per_message(tx.copies.mode);
    const std::uint64_t copied = std::uint64_t{copies} * payload.size();
    tx.copies.copy_events += copies;
    tx.copies.copy_bytes += copied;
    if (tcb.ledger) {
        const bool short_path = tx.copies.mode == CopyMode::optimized && payload.size() <= kShortPathMaxBytes;
        tcb.ledger->charge_stream(tcb.cost_key, stream,
                                  short_path ? sim::CostKind::short_copy_bytes : sim::CostKind::copy_bytes, copied);
    }
    ++tx.counters.messages_submitted;
    tx.counters.bytes_submitted += payload.size();
    return r;
}

namespace {

bool may_send_data(const Tcb& tcb) {
    const auto s = tcb.state;
    if (s == AssocState::cookie_echoed) return tcb.config.bundle_data_with_cookie_echo;
    return s == AssocState::established || s == AssocState::shutdown_pending || s == AssocState::shutdown_received;
}

// Flight/window gate for adding `chunk` bytes to a packet already holding `bundled` bytes.
bool window_allows(const Tcb& tcb, const PathState& path, std::size_t bundled, std::size_t chunk) {
    const std::size_t flight = path.cc.flight_size;
    const bool cwnd_ok = flight + bundled + chunk <= path.cc.cwnd || (flight == 0 && bundled == 0);
    const std::size_t outstanding = tcb.total_flight();
    const bool rwnd_ok = outstanding + bundled + chunk <= tcb.peer_rwnd || (outstanding == 0 && bundled == 0);
    return cwnd_ok && rwnd_ok;
}

std::size_t unsent_bytes(const SendState& tx) {
    std::size_t sum = 0;
    for (std::size_t i = tx.queue.size() - tx.unsent; i < tx.queue.size(); ++i) sum += tx.queue[i].payload_bytes();
    return sum;
}

void mark_sent(Tcb& tcb, OutboundChunkEntry& e, std::size_t path, Time now) {
    if (e.transmit_count == 0) {
        e.first_sent_at = now;
    } else {
        ++tcb.tx.counters.chunks_retransmitted;
    }
    ++e.transmit_count;
    e.last_sent_at = now;
    e.state = ChunkState::in_flight;
    e.path = path;
    e.missing_reports = 0;
    e.avoid_path.reset();
    tcb.paths[path].cc.flight_size += static_cast<std::uint32_t>(e.payload_bytes());
    ++tcb.tx.counters.chunks_sent;
    if (tcb.ledger) tcb.ledger->charge_stream(tcb.cost_key, e.chunk.stream, sim::CostKind::chunks_processed, 1);
}

}  // namespace

std::vector<OutboundPacket> bundle_and_send(Tcb& tcb, Time now) {
    std::vector<OutboundPacket> out;
    if (!may_send_data(tcb)) return out;
    auto& tx = tcb.tx;
    const std::size_t budget = tcb.config.max_packet_bytes();

    while (out.size() < tcb.config.mbs) {
        auto first_rtx = std::find_if(tx.queue.begin(), tx.queue.end(), [](const OutboundChunkEntry& e) {
            return e.state == ChunkState::to_retransmit;
        });
        const bool retransmit = first_rtx != tx.queue.end();
        if (!retransmit && tx.unsent == 0) break;

        std::size_t path_id = 0;
        std::size_t begin = 0;
        if (retransmit) {
            path_id = first_rtx->avoid_path ? select_retransmit_path(tcb, *first_rtx->avoid_path) : select_path(tcb);
            begin = static_cast<std::size_t>(first_rtx - tx.queue.begin());
        } else {
            if (!tcb.config.no_delay && tx.has_outstanding() && unsent_bytes(tx) < tcb.config.fragment_payload()) {
                break;  // Nagle: wait for the outstanding data to be acked
            }
            path_id = select_path(tcb);
            begin = tx.queue.size() - tx.unsent;
        }
        PathState& path = tcb.paths[path_id];

        OutboundPacket op;
        op.path = path_id;
        std::size_t size = wire::kCommonHeaderBytes;
        std::size_t bundled = 0;
        std::vector<std::size_t> picked;
        for (std::size_t i = begin; i < tx.queue.size(); ++i) {
            auto& e = tx.queue[i];
            if (retransmit && e.state != ChunkState::to_retransmit) continue;
            const std::size_t wire_size = wire::pad4(wire::kDataHeaderBytes + e.payload_bytes());
            if (size + wire_size > budget) break;
            if (!window_allows(tcb, path, bundled, e.payload_bytes())) break;
            size += wire_size;
            bundled += e.payload_bytes();
            picked.push_back(i);
        }
        if (picked.empty()) break;  // gated by cwnd or rwnd

        op.packet.src_port = tcb.local_port;
        op.packet.dst_port = tcb.peer_port;
        op.packet.verification_tag = tcb.peer_vtag;
        for (std::size_t i : picked) {
            auto& e = tx.queue[i];
            if (e.transmit_count > 0) ++op.retransmitted_chunks;
            mark_sent(tcb, e, path_id, now);
            op.packet.chunks.push_back(e.chunk);
        }
        if (!retransmit) tx.unsent -= picked.size();
        op.data_chunks = picked.size();
        path.last_activity = now;
        ++path.data_packets_sent;
        ++tx.counters.packets_sent;
        out.push_back(std::move(op));
    }
    return out;
}

namespace {

void enter_fast_recovery(Tcb& tcb, std::size_t path) {
    auto& tx = tcb.tx;
    if (tx.in_fast_recovery) return;
    auto& cc = tcb.paths[path].cc;
    const auto mtu = static_cast<std::uint32_t>(tcb.config.mtu);
    cc.ssthresh = std::max(cc.cwnd / 2, 4 * mtu);
    cc.cwnd = cc.ssthresh;
    cc.partial_bytes_acked = 0;
    tx.in_fast_recovery = true;
    tx.fast_recovery_exit = tcb.next_tsn - 1;
}

void mark_for_retransmit(Tcb& tcb, OutboundChunkEntry& e) {
    tcb.paths[e.path].cc.flight_size -= static_cast<std::uint32_t>(e.payload_bytes());
    e.state = ChunkState::to_retransmit;
}

unsigned effective_gbn_threshold(const AssocConfig& cfg) {
    // lk-double acknowledges every packet twice, so one repeat is expected.
    const unsigned per_packet = cfg.sack.mode == SackMode::lk_double ? 2 : 1;
    return std::max(1u, cfg.gbn_dup_threshold) * per_packet;
}

}  // namespace

SackEffects on_sack(Tcb& tcb, const wire::SackChunk& sack, Time now) {
    SackEffects fx;
    auto& tx = tcb.tx;
    if (!(tcb.state == AssocState::established || tcb.state == AssocState::shutdown_pending ||
          tcb.state == AssocState::shutdown_sent || tcb.state == AssocState::shutdown_received)) {
        return fx;
    }
    const wire::Tsn highest_sent = tcb.next_tsn - 1;
    if (sack.cum_tsn < tcb.peer_cum_tsn || sack.cum_tsn > highest_sent) {
        fx.stale = true;
        ++tx.counters.stale_sacks;
        return fx;
    }
    ++tx.counters.sacks_received;
    if (tcb.ledger) tcb.ledger->charge_shared(tcb.cost_key, sim::CostKind::sacks_processed, 1);

    const std::size_t n_paths = tcb.paths.size();
    std::vector<std::uint32_t> flight_before(n_paths);
    for (std::size_t p = 0; p < n_paths; ++p) flight_before[p] = tcb.paths[p].cc.flight_size;
    std::vector<std::size_t> acked(n_paths, 0);
    std::vector<std::size_t> cum_acked(n_paths, 0);
    const bool was_in_recovery = tx.in_fast_recovery;

    bool has_sample = false;
    Time sample_sent{};
    std::size_t sample_path = 0;

    auto ack_entry = [&](OutboundChunkEntry& e, bool by_cum) {
        if (e.state == ChunkState::acked || e.state == ChunkState::queued) return;
        if (e.state == ChunkState::in_flight) {
            tcb.paths[e.path].cc.flight_size -= static_cast<std::uint32_t>(e.payload_bytes());
            if (e.transmit_count == 1 && (!has_sample || e.last_sent_at > sample_sent)) {
                has_sample = true;
                sample_sent = e.last_sent_at;
                sample_path = e.path;
            }
        }
        acked[e.path] += e.payload_bytes();
        if (by_cum) cum_acked[e.path] += e.payload_bytes();
        fx.newly_acked_bytes += e.payload_bytes();
        e.state = ChunkState::acked;
    };

    fx.cum_advanced = sack.cum_tsn > tcb.peer_cum_tsn;
    while (!tx.queue.empty() && tx.queue.front().chunk.tsn <= sack.cum_tsn) {
        auto& e = tx.queue.front();
        ack_entry(e, true);
        tx.buffered_bytes -= e.payload_bytes();
        tx.queue.pop_front();
    }
    tcb.peer_cum_tsn = sack.cum_tsn;

    if (tcb.config.ack_mode == AckMode::sack && !sack.gaps.empty() && wire::gaps_well_formed(sack.gaps)) {
        for (const auto& g : sack.gaps) {
            for (std::uint32_t off = g.start; off <= g.end; ++off) {
                if (auto* e = tx.find(sack.cum_tsn + off)) ack_entry(*e, false);
            }
        }
        const wire::Tsn highest_gap = sack.cum_tsn + sack.gaps.back().end;
        for (auto& e : tx.queue) {
            if (e.chunk.tsn >= highest_gap) break;
            if (e.state != ChunkState::in_flight) continue;
            ++e.missing_reports;
            if (e.missing_reports >= tcb.config.fast_retransmit_threshold && !e.fast_retransmitted) {
                const std::size_t p = e.path;
                mark_for_retransmit(tcb, e);
                e.fast_retransmitted = true;
                ++fx.fast_retransmits;
                ++tx.counters.fast_retransmits;
                enter_fast_recovery(tcb, p);
            }
        }
    } else if (tcb.config.ack_mode == AckMode::gbn) {
        if (fx.cum_advanced) {
            tx.gbn_dup_count = 0;
            tx.gbn_armed = true;
        } else if (tcb.total_flight() > 0) {
            ++tx.gbn_dup_count;
            if (tx.gbn_armed && tx.gbn_dup_count >= effective_gbn_threshold(tcb.config)) {
                std::optional<std::size_t> first_path;
                for (auto& e : tx.queue) {
                    if (e.state != ChunkState::in_flight) continue;
                    if (!first_path) first_path = e.path;
                    mark_for_retransmit(tcb, e);
                }
                if (first_path) enter_fast_recovery(tcb, *first_path);
                fx.go_back = true;
                tx.gbn_armed = false;
                tx.gbn_dup_count = 0;
                ++tx.counters.go_backs;
            }
        }
    }

    const auto mtu = static_cast<std::uint32_t>(tcb.config.mtu);
    const auto frag = static_cast<std::uint32_t>(tcb.config.fragment_payload());
    for (std::size_t p = 0; p < n_paths; ++p) {
        if (acked[p] == 0) continue;
        auto& path = tcb.paths[p];
        path.error_count = 0;
        auto& cc = path.cc;
        if (was_in_recovery) continue;
        if (cc.in_slow_start()) {
            if (fx.cum_advanced && cum_acked[p] > 0) {
                cc.cwnd += std::min(static_cast<std::uint32_t>(cum_acked[p]), mtu);
            }
        } else {
            cc.partial_bytes_acked += static_cast<std::uint32_t>(acked[p]);
            // "Window full" means there was no room left for another full chunk.
            const bool window_full = flight_before[p] + frag > cc.cwnd;
            if (cc.partial_bytes_acked >= cc.cwnd && window_full) {
                const std::uint32_t before = cc.cwnd;
                cc.cwnd += mtu;
                cc.partial_bytes_acked -= before;
            }
        }
        if (cc.flight_size == 0) cc.partial_bytes_acked = 0;
    }

    if (has_sample) {
        auto& cc = tcb.paths[sample_path].cc;
        cc = rtt_update(cc, now - sample_sent, RtoBounds::from(tcb.config));
        fx.rtt_sampled = true;
    }
    if (fx.newly_acked_bytes > 0) tcb.assoc_error_count = 0;
    if (tx.in_fast_recovery && tcb.peer_cum_tsn >= tx.fast_recovery_exit) tx.in_fast_recovery = false;
    tcb.peer_rwnd = sack.a_rwnd;
    return fx;
}

RtoEffects on_rto(Tcb& tcb, std::size_t path, Time) {
    RtoEffects fx;
    auto& tx = tcb.tx;
    auto& cc = tcb.paths[path].cc;
    const auto mtu = static_cast<std::uint32_t>(tcb.config.mtu);
    cc.ssthresh = std::max(cc.cwnd / 2, 4 * mtu);
    cc.cwnd = mtu;
    cc.partial_bytes_acked = 0;
    cc.rto = std::min(cc.rto * 2, tcb.config.rto_max);

    const bool gbn = tcb.config.ack_mode == AckMode::gbn;
    for (auto& e : tx.queue) {
        if (e.state != ChunkState::in_flight) continue;
        if (!gbn && e.path != path) continue;
        if (e.path == path) e.avoid_path = path;
        mark_for_retransmit(tcb, e);
        ++fx.marked;
    }
    tx.in_fast_recovery = false;
    tx.gbn_armed = true;
    tx.gbn_dup_count = 0;
    ++tx.counters.timeouts;
    ++tcb.assoc_error_count;
    fx.association_failed = tcb.assoc_error_count > tcb.config.assoc_max_retrans;
    return fx;
}

}  // namespace sctpdc::sctp
