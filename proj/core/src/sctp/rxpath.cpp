#include "sctpdc/sctp/rxpath.hpp"

#include <algorithm>

#include "sctpdc/sctp/assoc.hpp"

namespace sctpdc::sctp {

namespace {

// Keeps a worst-case SACK inside one packet.
constexpr std::size_t kMaxGapBlocks = 128;
constexpr std::size_t kMaxDupReports = 128;

}  // namespace

SackDecision sack_decision(const SackPolicy& policy, SackCounters& counters, bool out_of_order) {
    SackDecision d;
    counters.unacked = true;
    switch (policy.mode) {
        case SackMode::every_packet: d.emit = 1; break;
        case SackMode::lk_double: d.emit = 2; break;
        case SackMode::every_k:
            if (++counters.packets_since_periodic >= policy.k) {
                counters.packets_since_periodic = 0;
                d.emit = 1;
            }
            break;
        case SackMode::delayed: break;
    }
    // A gap-triggered SACK leaves the per-k count alone.
    if (out_of_order && policy.immediate_on_gap) d.emit = std::max(d.emit, 1u);
    if (d.emit > 0) {
        counters.unacked = false;
    } else {
        d.arm_timer = true;
        d.timer_delay = policy.mode == SackMode::delayed ? policy.delay : policy.flush_timeout;
    }
    return d;
}

unsigned sack_timer_expired(const SackPolicy&, SackCounters& counters) {
    if (!counters.unacked) return 0;
    counters.unacked = false;
    counters.packets_since_periodic = 0;
    return 1;
}

wire::SackChunk build_sack(TsnMap& map, std::size_t rwnd_free, bool gbn) {
    wire::SackChunk s;
    s.cum_tsn = map.cum_tsn;
    s.a_rwnd = static_cast<std::uint32_t>(std::min<std::size_t>(rwnd_free, UINT32_MAX));
    if (!gbn) {
        for (auto it = map.out_of_order.begin(); it != map.out_of_order.end() && s.gaps.size() < kMaxGapBlocks;) {
            const std::uint32_t start = it->distance_from(map.cum_tsn);
            if (start > UINT16_MAX) break;
            wire::Tsn last = *it;
            ++it;
            while (it != map.out_of_order.end() && *it == last.next()) {
                last = *it;
                ++it;
            }
            const std::uint32_t end = std::min<std::uint32_t>(last.distance_from(map.cum_tsn), UINT16_MAX);
            s.gaps.push_back({static_cast<std::uint16_t>(start), static_cast<std::uint16_t>(end)});
        }
    }
    const std::size_t n_dups = std::min(map.dups.size(), kMaxDupReports);
    s.dups.assign(map.dups.begin(), map.dups.begin() + static_cast<std::ptrdiff_t>(n_dups));
    map.dups.clear();
    return s;
}

std::vector<InboundMessage> deliver_ordered(StreamInbox& inbox, InboundMessage msg) {
    std::vector<InboundMessage> out;
    if (msg.ssn != inbox.next_ssn) {
        if (msg.ssn > inbox.next_ssn) inbox.pending.emplace(msg.ssn, std::move(msg));
        return out;
    }
    out.push_back(std::move(msg));
    inbox.next_ssn = inbox.next_ssn.next();
    for (auto it = inbox.pending.find(inbox.next_ssn); it != inbox.pending.end();
         it = inbox.pending.find(inbox.next_ssn)) {
        out.push_back(std::move(it->second));
        inbox.pending.erase(it);
        inbox.next_ssn = inbox.next_ssn.next();
    }
    return out;
}

namespace {

wire::Packet sack_packet(Tcb& tcb) {
    auto& rx = tcb.rx;
    ++rx.counters.sacks_sent;
    if (tcb.ledger) tcb.ledger->charge_shared(tcb.cost_key, sim::CostKind::sacks_processed, 1);
    return make_packet(tcb, build_sack(rx.map, rx.rwnd_free(), rx.gbn));
}

// Assembles the message containing `tsn` if all of its fragments are buffered.
std::optional<InboundMessage> try_assemble(RecvState& rx, wire::Tsn tsn) {
    auto it = rx.fragments.find(tsn);
    if (it == rx.fragments.end()) return std::nullopt;
    auto first = it;
    while (!first->second.flags.begin_fragment) {
        if (first == rx.fragments.begin()) return std::nullopt;
        auto prev = std::prev(first);
        if (prev->first.next() != first->first) return std::nullopt;
        first = prev;
    }
    auto last = it;
    while (!last->second.flags.end_fragment) {
        auto next = std::next(last);
        if (next == rx.fragments.end() || last->first.next() != next->first) return std::nullopt;
        last = next;
    }
    InboundMessage m;
    m.stream = first->second.stream;
    m.ssn = first->second.ssn;
    m.unordered = first->second.flags.unordered;
    m.first_tsn = first->first;
    auto stop = std::next(last);
    for (auto f = first; f != stop; ++f) m.payload.insert(m.payload.end(), f->second.payload.begin(), f->second.payload.end());
    rx.fragments.erase(first, stop);
    return m;
}

}  // namespace

RxResult on_data(Tcb& tcb, const wire::Packet& packet, Time) {
    RxResult r;
    auto& rx = tcb.rx;
    ++rx.counters.data_packets;

    // Receipt: TSN bookkeeping and buffering.
    bool out_of_order = false;
    std::vector<wire::Tsn> accepted;
    for (const auto& c : packet.chunks) {
        const auto* d = std::get_if<wire::DataChunk>(&c);
        if (!d) continue;
        ++rx.counters.chunks_received;
        if (d->stream >= rx.inboxes.size() || d->payload.empty()) {
            ++r.discarded;
            continue;
        }
        if (rx.map.seen(d->tsn)) {
            rx.map.mark(d->tsn);  // records the duplicate
            ++rx.counters.duplicate_chunks;
            ++r.duplicates;
            out_of_order = true;
            continue;
        }
        if (rx.gbn && d->tsn != rx.map.cum_tsn.next()) {
            ++rx.counters.gbn_discards;
            ++r.discarded;
            out_of_order = true;
            continue;
        }
        if (d->payload.size() > rx.rwnd_free()) {
            ++rx.counters.rwnd_drops;
            ++r.discarded;
            continue;
        }
        rx.map.mark(d->tsn);
        rx.fragments.emplace(d->tsn, *d);
        rx.buffered_bytes += d->payload.size();
        accepted.push_back(d->tsn);
        ++r.accepted;
        if (tcb.ledger) tcb.ledger->charge_stream(tcb.cost_key, d->stream, sim::CostKind::chunks_processed, 1);
    }
    if (rx.map.has_gap()) out_of_order = true;

    const SackDecision decision = sack_decision(rx.policy, rx.sack_counters, out_of_order);
    const bool lk_double = rx.policy.mode == SackMode::lk_double && decision.emit >= 2;
    if (lk_double) r.sacks.push_back(sack_packet(tcb));  // at receipt

    // Delivery: reassembly and per-stream ordering.
    for (wire::Tsn tsn : accepted) {
        auto msg = try_assemble(rx, tsn);
        if (!msg) continue;
        std::vector<InboundMessage> released;
        if (msg->unordered) {
            released.push_back(std::move(*msg));
        } else {
            released = deliver_ordered(rx.inboxes[msg->stream], std::move(*msg));
        }
        for (auto& m : released) {
            rx.buffered_bytes -= m.payload.size();
            ++rx.counters.messages_delivered;
            rx.counters.bytes_delivered += m.payload.size();
            r.delivered.push_back(std::move(m));
        }
    }

    const unsigned remaining = lk_double ? decision.emit - 1 : decision.emit;
    for (unsigned i = 0; i < remaining; ++i) r.sacks.push_back(sack_packet(tcb));
    r.arm_sack_timer = decision.arm_timer;
    r.sack_timer_delay = decision.timer_delay;
    return r;
}

std::optional<wire::Packet> on_sack_timer(Tcb& tcb, Time) {
    if (sack_timer_expired(tcb.rx.policy, tcb.rx.sack_counters) == 0) return std::nullopt;
    return sack_packet(tcb);
}

}  // namespace sctpdc::sctp
