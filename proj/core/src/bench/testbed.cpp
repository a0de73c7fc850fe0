#include "testbed.hpp"

#include <algorithm>

namespace sctpdc::bench::detail {

sim::LinkParams link_params(const ScenarioConfig& cfg) {
    sim::LinkParams p;
    p.bandwidth_bps = cfg.bandwidth_bps;
    p.prop_delay = Duration{cfg.rtt_us * 1000 / 2};
    p.drop_prob = cfg.drop_prob;
    p.queue_capacity = cfg.queue_capacity;
    return p;
}

sctp::AssocConfig assoc_config(const ScenarioConfig& cfg, unsigned streams) {
    sctp::AssocConfig a;
    a.streams_out = a.streams_in = static_cast<std::uint16_t>(std::max(1u, streams));
    a.rwnd = cfg.rwnd;
    a.sack = cfg.sack_policy;
    a.ack_mode = cfg.gbn ? sctp::AckMode::gbn : sctp::AckMode::sack;
    a.no_delay = cfg.no_delay;
    a.copy_mode = cfg.copy_mode;
    a.mbs = cfg.mbs;
    a.checksum = cfg.checksum;
    if (cfg.hb_interval_ms > 0) a.hb_interval = Duration{static_cast<std::int64_t>(cfg.hb_interval_ms * 1e6)};
    return a;
}

tcp::TcpConfig tcp_config(const ScenarioConfig& cfg) {
    tcp::TcpConfig t;
    t.rwnd = cfg.rwnd;
    t.nagle = cfg.nagle;
    t.sack_enabled = cfg.tcp_sack;
    return t;
}

Bed::Bed(const ScenarioConfig& cfg, Topology topo, Workload w, std::uint64_t seed)
    : cfg_(cfg), topo_(topo), w_(w), seed_(seed), rng_(seed) {
    const auto params = link_params(cfg);
    fwd_.resize(topo.host_pairs);
    rev_.resize(topo.host_pairs);
    for (unsigned p = 0; p < topo.host_pairs; ++p) {
        for (unsigned q = 0; q < topo.paths; ++q) {
            const std::string tag = std::to_string(p) + "." + std::to_string(q);
            fwd_[p].push_back(std::make_unique<sim::Link>(sim_, params, rng_.split("link:fwd:" + tag), "fwd" + tag));
            rev_[p].push_back(std::make_unique<sim::Link>(sim_, params, rng_.split("link:rev:" + tag), "rev" + tag));
        }
    }
    conns_.resize(topo.connections);
    for (auto& c : conns_) c.pending.resize(w.shared_stream ? 1 : std::max(1u, w.streams));
    for (unsigned f = 0; f < w.flows; ++f) payloads_.emplace_back(w.message_size, static_cast<std::uint8_t>(f));
    for (unsigned c = 0; c < topo.connections; ++c) {
        for (unsigned f = 0; f < w.flows; ++f) {
            FlowLatency fl;
            fl.connection = c;
            fl.flow = f;
            fl.stream = w.stream_of(f);
            latency_.push_back(std::move(fl));
        }
    }
}

sim::Link& Bed::link(unsigned pair, unsigned path, bool forward) {
    return forward ? *fwd_.at(pair).at(path) : *rev_.at(pair).at(path);
}

void Bed::on_established(unsigned c) {
    auto& conn = conns_[c];
    if (conn.established) return;
    conn.established = true;
    conn.established_time = sim_.now();
    if (w_.pace.count() == 0) {
        conn.released = w_.messages_per_conn;
        pump(c);
        return;
    }
    const std::int64_t slots = static_cast<std::int64_t>(topo_.connections) * w_.flows;
    for (std::size_t m = 0; m < w_.messages_per_conn; ++m) {
        const unsigned flow = static_cast<unsigned>(m % w_.flows);
        const std::size_t k = m / w_.flows;
        const Duration offset{w_.pace.count() * (static_cast<std::int64_t>(c) * w_.flows + flow) / slots};
        sim_.schedule(offset + w_.pace * static_cast<std::int64_t>(k), [this, c, flow, k] { release(c, flow, k); });
    }
}

void Bed::release(unsigned c, unsigned flow, std::size_t) {
    auto& conn = conns_[c];
    conn.backlog.push_back(flow);
    ++conn.released;
    pump(c);
}

void Bed::pump(unsigned c) {
    auto& conn = conns_[c];
    const bool paced = w_.pace.count() != 0;
    while (conn.submitted < conn.released) {
        const unsigned flow = paced ? conn.backlog.front() : static_cast<unsigned>(conn.submitted % w_.flows);
        const unsigned stream = w_.stream_of(flow);
        if (!submit(c, stream, payloads_[flow])) break;
        conn.pending[stream].emplace_back(sim_.now(), flow);
        if (paced) conn.backlog.pop_front();
        ++conn.submitted;
        first_submit_ = std::min(first_submit_, sim_.now());
    }
}

void Bed::record(unsigned c, std::pair<Time, unsigned> sent) {
    latency_[c * w_.flows + sent.second].samples.push_back(sim_.now() - sent.first);
}

void Bed::on_message(unsigned c, unsigned stream, std::size_t bytes) {
    auto& conn = conns_[c];
    auto& q = conn.pending.at(stream);
    if (!q.empty()) {
        record(c, q.front());
        q.pop_front();
    }
    bytes_delivered_ += bytes;
    ++messages_delivered_;
    ++conn.delivered;
    last_delivery_ = sim_.now();
    finish_check(c);
}

void Bed::on_bytes(unsigned c, std::size_t bytes) {
    auto& conn = conns_[c];
    conn.partial_bytes += bytes;
    bytes_delivered_ += bytes;
    last_delivery_ = sim_.now();
    auto& q = conn.pending[0];
    while (!q.empty() && conn.partial_bytes >= w_.message_size) {
        conn.partial_bytes -= w_.message_size;
        record(c, q.front());
        q.pop_front();
        ++messages_delivered_;
        ++conn.delivered;
        finish_check(c);
    }
}

void Bed::finish_check(unsigned c) {
    if (conns_[c].delivered != w_.messages_per_conn) return;
    if (++conns_done_ == topo_.connections) sim_.stop();
}

MetricsReport Bed::run(const std::string& label) {
    start();
    sim_.run_until(Time{static_cast<std::int64_t>(cfg_.duration_ms * 1e6)});

    MetricsReport r;
    r.label = label;
    r.scenario = cfg_.scenario;
    r.drop_prob = cfg_.drop_prob;
    r.seed = seed_;
    r.connections = topo_.connections;
    r.streams = w_.shared_stream ? 1 : w_.streams;
    r.completed = conns_done_ == topo_.connections;
    r.messages_delivered = messages_delivered_;
    r.bytes_delivered = bytes_delivered_;
    if (messages_delivered_ > 0 && last_delivery_ > first_submit_) {
        r.duration_s = sim::to_seconds(last_delivery_ - first_submit_);
        r.goodput_mbps = static_cast<double>(bytes_delivered_) * 8.0 / r.duration_s / 1e6;
    }
    for (const auto* side : {&fwd_, &rev_}) {
        for (const auto& pair : *side) {
            for (const auto& l : pair) {
                r.packets_sent += l->stats().sent;
                r.packets_delivered += l->stats().delivered;
                r.packets_dropped += l->stats().dropped();
            }
        }
    }
    r.copy_bytes = ledger_.total_copy_bytes();
    r.cpu_proxy = ledger_.cpu_proxy();
    r.elapsed_coarse = ledger_.elapsed_proxy(sim::LockModel::coarse);
    r.elapsed_fine = ledger_.elapsed_proxy(sim::LockModel::fine);
    double hs = 0;
    unsigned n = 0;
    for (const auto& c : conns_) {
        if (!c.established) continue;
        hs += sim::to_micros(c.established_time - c.connect_time);
        ++n;
    }
    r.handshake_us = n ? hs / n : 0;
    r.latency = latency_;
    collect(r);
    return r;
}

SctpBed::SctpBed(const ScenarioConfig& cfg, Topology topo, Workload w, std::uint64_t seed)
    : Bed(cfg, topo, w, seed), acfg_(assoc_config(cfg, w.shared_stream ? 1 : w.streams)) {
    for (unsigned p = 0; p < topo.host_pairs; ++p) {
        const std::string id = std::to_string(p);
        clients_.push_back(std::make_unique<sctp::Host>(sim_, "a" + id, rng_.split("host:a" + id), &ledger_));
        servers_.push_back(std::make_unique<sctp::Host>(sim_, "b" + id, rng_.split("host:b" + id), &ledger_));
        auto* cl = clients_.back().get();
        auto* sv = servers_.back().get();
        for (unsigned q = 0; q < topo.paths; ++q) {
            cl->add_path(*fwd_[p][q]);
            sv->add_path(*rev_[p][q]);
            fwd_[p][q]->set_sink([sv, q](sim::Frame f) { sv->receive(q, std::move(f)); });
            rev_[p][q]->set_sink([cl, q](sim::Frame f) { cl->receive(q, std::move(f)); });
        }
    }
    assocs_.resize(topo.connections, nullptr);
}

void SctpBed::set_cpu_budget(double units_per_second) {
    for (auto& h : clients_) h->set_cpu_budget(units_per_second);
    for (auto& h : servers_) h->set_cpu_budget(units_per_second);
}

void SctpBed::start() {
    for (unsigned c = 0; c < topo_.connections; ++c) {
        const unsigned pair = c % topo_.host_pairs;
        const auto cport = static_cast<std::uint16_t>(4000 + c);
        const auto sport = static_cast<std::uint16_t>(5000 + c);
        sctp::AssocEvents se;
        se.on_message = [this, c](sctp::Association&, const sctp::InboundMessage& m) {
            on_message(c, m.stream, m.payload.size());
        };
        servers_[pair]->listen(sport, acfg_, std::move(se));
        sctp::AssocEvents ce;
        ce.on_established = [this, c](sctp::Association&) { on_established(c); };
        ce.on_writable = [this, c](sctp::Association&) { pump(c); };
        conns_[c].connect_time = sim_.now();
        assocs_[c] = &clients_[pair]->connect(cport, sport, acfg_, std::move(ce));
    }
}

bool SctpBed::submit(unsigned c, unsigned stream, std::span<const std::uint8_t> payload) {
    return static_cast<bool>(assocs_[c]->send(static_cast<wire::StreamId>(stream), payload));
}

void SctpBed::collect(MetricsReport& r) {
    r.mode = acfg_.ack_mode == sctp::AckMode::gbn ? Mode::sctp_gbn : Mode::sctp_sack;
    r.tcb_footprint = acfg_.footprint_bytes();
    for (auto* a : assocs_) r.retransmits += a->tcb().tx.counters.chunks_retransmitted;
    for (auto& h : servers_) {
        for (auto* a : h->associations()) r.sacks += a->tcb().rx.counters.sacks_sent;
    }
}

TcpBed::TcpBed(const ScenarioConfig& cfg, Topology topo, Workload w, std::uint64_t seed)
    : Bed(cfg, topo, w, seed), tcfg_(tcp_config(cfg)) {
    for (unsigned p = 0; p < topo.host_pairs; ++p) {
        const std::string id = std::to_string(p);
        clients_.push_back(std::make_unique<tcp::TcpHost>(sim_, "a" + id, &ledger_));
        servers_.push_back(std::make_unique<tcp::TcpHost>(sim_, "b" + id, &ledger_));
        auto* cl = clients_.back().get();
        auto* sv = servers_.back().get();
        cl->set_link(*fwd_[p][0]);
        sv->set_link(*rev_[p][0]);
        fwd_[p][0]->set_sink([sv](sim::Frame f) { sv->receive(std::move(f)); });
        rev_[p][0]->set_sink([cl](sim::Frame f) { cl->receive(std::move(f)); });
    }
}

void TcpBed::set_cpu_budget(double units_per_second) {
    for (auto& h : clients_) h->set_cpu_budget(units_per_second);
    for (auto& h : servers_) h->set_cpu_budget(units_per_second);
}

void TcpBed::start() {
    for (unsigned c = 0; c < topo_.connections; ++c) {
        const unsigned pair = c % topo_.host_pairs;
        tcp::TcpEvents ae, be;
        ae.on_established = [this, c](tcp::TcpEndpoint&) { on_established(c); };
        ae.on_writable = [this, c](tcp::TcpEndpoint&) { pump(c); };
        be.on_data = [this, c](tcp::TcpEndpoint&, std::span<const std::uint8_t> d) { on_bytes(c, d.size()); };
        conns_[c].connect_time = sim_.now();
        auto [a, b] = tcp::connect_pair(*clients_[pair], *servers_[pair], static_cast<std::uint16_t>(4000 + c),
                                        static_cast<std::uint16_t>(5000 + c), tcfg_, std::move(ae), std::move(be));
        eps_.push_back(a);
        eps_.push_back(b);
    }
}

bool TcpBed::submit(unsigned c, unsigned, std::span<const std::uint8_t> payload) {
    return eps_[2 * c]->send(payload) == tcp::TcpSubmitStatus::ok;
}

void TcpBed::collect(MetricsReport& r) {
    r.mode = Mode::tcp;
    r.tcb_footprint = tcp::kTcbFootprintBytes;
    for (std::size_t i = 0; i < eps_.size(); i += 2) {
        r.retransmits += eps_[i]->conn().counters.segments_retransmitted;
        r.sacks += eps_[i + 1]->conn().counters.acks_sent;
    }
}

}  // namespace sctpdc::bench::detail
