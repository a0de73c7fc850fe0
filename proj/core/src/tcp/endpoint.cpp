#include "sctpdc/tcp/endpoint.hpp"

#include <algorithm>
#include <stdexcept>

namespace sctpdc::tcp {

TcpEndpoint::TcpEndpoint(TcpHost& host, TcpConn conn, TcpEvents events)
    : host_(&host),
      conn_(std::move(conn)),
      events_(std::move(events)),
      rto_timer_(host.simulator()),
      dack_timer_(host.simulator()),
      pump_timer_(host.simulator()) {
    // Same key on both ends so a connection's cost lands in one bucket.
    const auto lo = std::min(conn_.local_port, conn_.peer_port);
    const auto hi = std::max(conn_.local_port, conn_.peer_port);
    cost_key_ = 0x80000000u | (std::uint32_t{lo} << 16) | hi;
}

void TcpEndpoint::charge(bool data) {
    if (auto* l = host_->ledger()) {
        l->charge_stream(cost_key_, 0, data ? sim::CostKind::chunks_processed : sim::CostKind::sacks_processed, 1);
    }
}

void TcpEndpoint::request_pump() {
    const Time at = std::max(host_->simulator().now(), host_->budget_release_time());
    if (pump_timer_.armed() && pump_timer_.due() <= at) return;
    pump_timer_.arm(at - host_->simulator().now(), [this] { pump(); });
}

TcpSubmitStatus TcpEndpoint::send(std::span<const std::uint8_t> bytes) {
    const auto st = tcp_submit(conn_, bytes);
    if (st == TcpSubmitStatus::ok) {
        // Two copies: user to socket buffer, socket buffer to user on the far side.
        if (auto* l = host_->ledger()) l->charge_stream(cost_key_, 0, sim::CostKind::copy_bytes, 2 * bytes.size());
        if (established_) request_pump();
    }
    return st;
}

void TcpEndpoint::establish() {
    established_ = true;
    if (events_.on_established) events_.on_established(*this);
    pump();
}

void TcpEndpoint::transmit(const Segment& s) {
    charge(!s.payload.empty());
    sim::Frame f;
    f.wire_bytes = segment_wire_bytes(s);
    f.bytes = encode_segment(s);
    host_->link().transmit(std::move(f));
}

void TcpEndpoint::update_rto_timer(bool restart) {
    if (conn_.flight() == 0) {
        rto_timer_.cancel();
        return;
    }
    if (restart || !rto_timer_.armed()) {
        rto_timer_.arm(conn_.rto, [this] {
            tcp_on_rto(conn_, host_->simulator().now());
            request_pump();
        });
    }
}

void TcpEndpoint::pump() {
    if (!established_) return;
    auto& sim = host_->simulator();
    if (host_->budget_release_time() > sim.now()) {
        request_pump();
        return;
    }
    const auto segs = tcp_send(conn_, sim.now());
    for (const auto& s : segs) transmit(s);
    if (!segs.empty()) {
        // Data carries the current ack, so a pending delayed ack is covered.
        conn_.unacked_segments = 0;
        dack_timer_.cancel();
    }
    update_rto_timer(false);
}

void TcpEndpoint::handle(const Segment& s) {
    auto& sim = host_->simulator();
    charge(!s.payload.empty());
    const std::size_t before = conn_.send_buf.size();
    const auto fx = tcp_on_ack(conn_, s, sim.now());
    if (fx.newly_acked > 0) {
        update_rto_timer(true);
        if (events_.on_writable && conn_.send_buf.size() < before) events_.on_writable(*this);
    }

    auto rx = tcp_receiver(conn_, s, sim.now());
    if (!rx.delivered.empty() && events_.on_data) events_.on_data(*this, rx.delivered);
    if (rx.ack) {
        dack_timer_.cancel();
        transmit(*rx.ack);
    } else if (rx.arm_delayed_ack && !dack_timer_.armed()) {
        dack_timer_.arm(conn_.config.delayed_ack_timeout, [this] {
            if (auto a = tcp_delayed_ack(conn_)) transmit(*a);
        });
    }
    if (conn_.unsent() > 0 || conn_.retransmit_pending) request_pump();
}

TcpHost::TcpHost(sim::Simulator& sim, std::string name, sim::CostLedger* ledger)
    : sim_(&sim), name_(std::move(name)), ledger_(ledger) {}

Time TcpHost::budget_release_time() const {
    if (cpu_budget_ <= 0.0 || !ledger_) return sim_->now();
    const Time release{static_cast<std::int64_t>(ledger_->cpu_proxy() / cpu_budget_ * 1e9)};
    return std::max(release, sim_->now());
}

TcpEndpoint& TcpHost::open(std::uint16_t local_port, std::uint16_t peer_port, const TcpConfig& config,
                           Seq local_isn, Seq peer_isn, TcpEvents events) {
    if (!link_) throw std::logic_error("TcpHost::open before set_link");
    auto& slot = conns_[{local_port, peer_port}];
    if (slot) throw std::logic_error("port pair already in use");
    slot = std::make_unique<TcpEndpoint>(*this, make_conn(config, local_port, peer_port, local_isn, peer_isn),
                                         std::move(events));
    return *slot;
}

void TcpHost::receive(sim::Frame frame) {
    Segment s;
    try {
        s = decode_segment(frame.bytes);
    } catch (const std::runtime_error&) {
        ++decode_errors_;
        return;
    }
    auto it = conns_.find({s.dst_port, s.src_port});
    if (it == conns_.end()) return;
    it->second->handle(s);
}

std::pair<TcpEndpoint*, TcpEndpoint*> connect_pair(TcpHost& a, TcpHost& b, std::uint16_t a_port,
                                                   std::uint16_t b_port, const TcpConfig& config,
                                                   TcpEvents a_events, TcpEvents b_events) {
    const Seq a_isn(0x1000);
    const Seq b_isn(0x2000);
    auto& ea = a.open(a_port, b_port, config, a_isn, b_isn, std::move(a_events));
    auto& eb = b.open(b_port, a_port, config, b_isn, a_isn, std::move(b_events));
    // SYN + SYN/ACK: one round trip for the active side; the passive side is
    // established when the final ACK lands half a round trip later.
    const Duration one_way = a.link().params().prop_delay + a.link().serialization_time(40);
    auto& sim = a.simulator();
    sim.schedule(2 * one_way, [&ea] { ea.establish(); });
    sim.schedule(3 * one_way, [&eb] { eb.establish(); });
    return {&ea, &eb};
}

}  // namespace sctpdc::tcp
