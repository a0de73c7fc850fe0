#include "sctpdc/sctp/endpoint.hpp"

#include <algorithm>

#include "sctpdc/sctp/mhoming.hpp"
#include "sctpdc/wire/codec.hpp"

namespace sctpdc::sctp {

namespace {

std::uint32_t symmetric_key(const Tcb& tcb) { return tcb.local_vtag ^ tcb.peer_vtag; }

}  // namespace

Association::Association(Host& host, Tcb tcb, AssocEvents events)
    : host_(&host),
      tcb_(std::move(tcb)),
      events_(std::move(events)),
      t1_(host.simulator()),
      t2_(host.simulator()),
      sack_timer_(host.simulator()),
      hb_timer_(host.simulator()),
      pump_timer_(host.simulator()) {
    tcb_.ledger = host.ledger();
    handshake_rto_ = clamp_rto(tcb_.config.rto_initial, RtoBounds::from(tcb_.config));
}

SubmitResult Association::send(wire::StreamId stream, std::span<const std::uint8_t> payload, bool ordered) {
    auto r = submit(tcb_, stream, payload, ordered, host_->simulator().now());
    if (r) request_pump(host_->simulator().now());
    return r;
}

void Association::shutdown() {
    if (auto p = sctp::shutdown(tcb_)) {
        send_packet(select_path(tcb_), *p);
        arm_shutdown_timer();
    }
}

void Association::abort() {
    if (closed()) return;
    send_packet(select_path(tcb_), make_packet(tcb_, wire::AbortChunk{}));
    close();
}

void Association::start_timers() {
    tcb_.cost_key = symmetric_key(tcb_);
    t3_.clear();
    for (std::size_t i = 0; i < tcb_.paths.size(); ++i) t3_.push_back(std::make_unique<sim::Timer>(host_->simulator()));
    if (tcb_.config.heartbeats) {
        hb_timer_.arm(tcb_.config.hb_interval / 5, [this] { heartbeat_loop(); });
    }
}

void Association::stop_timers() {
    t1_.cancel();
    t2_.cancel();
    sack_timer_.cancel();
    hb_timer_.cancel();
    pump_timer_.cancel();
    for (auto& t : t3_) t->cancel();
}

void Association::close() {
    tcb_.state = AssocState::closed;
    stop_timers();
    if (!closed_notified_) {
        closed_notified_ = true;
        if (events_.on_closed) events_.on_closed(*this);
    }
}

void Association::arm_handshake_timer() {
    t1_.arm(handshake_rto_, [this] {
        if (!tcb_.pending_handshake) return;
        if (tcb_.handshake_attempts > tcb_.config.max_init_retransmits) {
            close();
            return;
        }
        ++tcb_.handshake_attempts;
        if (tcb_.state == AssocState::cookie_wait) {
            ++tcb_.counters.init_retransmits;
        } else {
            ++tcb_.counters.cookie_retransmits;
        }
        handshake_rto_ = std::min(handshake_rto_ * 2, tcb_.config.rto_max);
        send_packet(tcb_.primary_path(), *tcb_.pending_handshake);
        arm_handshake_timer();
    });
}

void Association::arm_shutdown_timer() {
    const Duration rto = tcb_.paths[select_path(tcb_)].cc.rto;
    t2_.arm(rto, [this] {
        auto p = on_shutdown_timeout(tcb_);
        if (!p) return;
        const std::size_t path = select_path(tcb_);
        auto& cc = tcb_.paths[path].cc;
        cc.rto = std::min(cc.rto * 2, tcb_.config.rto_max);
        send_packet(path, *p);
        if (tcb_.state == AssocState::closed) {
            close();
        } else {
            arm_shutdown_timer();
        }
    });
}

void Association::update_t3(bool restart) {
    for (std::size_t p = 0; p < t3_.size(); ++p) {
        auto& timer = *t3_[p];
        if (tcb_.paths[p].cc.flight_size == 0) {
            timer.cancel();
            continue;
        }
        if (timer.armed() && !restart) continue;
        timer.arm(tcb_.paths[p].cc.rto, [this, p] {
            const Time now = host_->simulator().now();
            auto fx = on_rto(tcb_, p, now);
            auto pe = on_path_error(tcb_, p);
            if (fx.association_failed || pe.association_failed) {
                abort();
                return;
            }
            pump();
        });
    }
}

void Association::heartbeat_loop() {
    for (auto& probe : heartbeat_tick(tcb_, host_->simulator().now())) send_packet(probe.path, probe.packet);
    hb_timer_.arm(tcb_.config.hb_interval / 5, [this] { heartbeat_loop(); });
}

void Association::request_pump(Time at) {
    if (pump_timer_.armed() && pump_timer_.due() <= at) return;
    pump_timer_.arm(at - host_->simulator().now(), [this] { pump(); });
}

void Association::pump() {
    if (closed()) return;
    auto& sim = host_->simulator();
    const Time release = host_->budget_release_time();
    if (release > sim.now()) {
        request_pump(release);
        return;
    }
    auto packets = bundle_and_send(tcb_, sim.now());
    std::size_t last_path = 0;
    for (const auto& op : packets) {
        send_packet(op.path, op.packet);
        last_path = op.path;
    }
    update_t3(false);
    if (!packets.empty() && packets.size() >= tcb_.config.mbs) {
        // Burst-limited: continue once the NIC has drained what was just queued.
        request_pump(std::max(sim.now(), host_->link(last_path).idle_at()));
    }
}

void Association::send_packet(std::size_t path, const wire::Packet& p) { host_->transmit(path, p, tcb_.codec()); }

void Association::after_ack_progress(std::size_t newly_acked) {
    if (newly_acked > 0 && events_.on_writable) events_.on_writable(*this);
    if (auto p = shutdown_progress(tcb_)) {
        send_packet(select_path(tcb_), *p);
        arm_shutdown_timer();
    }
    request_pump(host_->simulator().now());
}

void Association::on_sack_chunk(const wire::SackChunk& s) {
    auto fx = on_sack(tcb_, s, host_->simulator().now());
    if (fx.stale) return;
    update_t3(fx.cum_advanced);
    after_ack_progress(fx.newly_acked_bytes);
}

void Association::handle(std::size_t path, const wire::Packet& pkt) {
    auto& sim = host_->simulator();
    bool data_done = false;
    for (const auto& chunk : pkt.chunks) {
        if (closed()) return;
        const auto type = wire::chunk_type(chunk);
        switch (dispatch_rule(tcb_.state, type)) {
            case ChunkAction::discard:
                ++tcb_.counters.wrong_state_discards;
                break;
            case ChunkAction::handshake:
                if (const auto* ack = std::get_if<wire::InitAckChunk>(&chunk)) {
                    auto echo = on_init_ack(tcb_, *ack, sim.now());
                    if (!echo) break;
                    t1_.cancel();
                    handshake_rto_ = clamp_rto(tcb_.config.rto_initial, RtoBounds::from(tcb_.config));
                    wire::Packet first = *echo;
                    if (tcb_.config.bundle_data_with_cookie_echo) {
                        // Queued DATA may ride along with the COOKIE_ECHO.
                        auto data = bundle_and_send(tcb_, sim.now());
                        std::size_t i = 0;
                        if (!data.empty() &&
                            wire::encoded_size(first) + wire::encoded_size(data[0].packet) - wire::kCommonHeaderBytes <=
                                tcb_.config.max_packet_bytes()) {
                            for (auto& c : data[0].packet.chunks) first.chunks.push_back(std::move(c));
                            i = 1;
                        }
                        send_packet(path, first);
                        for (; i < data.size(); ++i) send_packet(data[i].path, data[i].packet);
                        update_t3(false);
                    } else {
                        send_packet(path, first);
                    }
                    arm_handshake_timer();
                } else if (std::holds_alternative<wire::CookieAckChunk>(chunk)) {
                    if (!on_cookie_ack(tcb_, sim.now())) break;
                    t1_.cancel();
                    start_timers();
                    if (events_.on_established) events_.on_established(*this);
                    request_pump(sim.now());
                } else if (std::holds_alternative<wire::CookieEchoChunk>(chunk)) {
                    // Duplicate: the COOKIE_ACK was lost. Answer again, keep the TCB.
                    ++host_->stats_.duplicate_cookie_echo;
                    send_packet(path, make_packet(tcb_, wire::CookieAckChunk{}));
                }
                break;
            case ChunkAction::process_data: {
                if (data_done) break;
                data_done = true;
                auto rx = on_data(tcb_, pkt, sim.now());
                for (const auto& s : rx.sacks) send_packet(path, s);
                if (!tcb_.rx.sack_counters.unacked) {
                    sack_timer_.cancel();
                } else if (rx.arm_sack_timer && !sack_timer_.armed()) {
                    sack_timer_.arm(rx.sack_timer_delay, [this, path] {
                        if (auto s = on_sack_timer(tcb_, host_->simulator().now())) send_packet(path, *s);
                    });
                }
                for (const auto& m : rx.delivered) {
                    if (events_.on_message) events_.on_message(*this, m);
                }
                break;
            }
            case ChunkAction::process_sack:
                on_sack_chunk(std::get<wire::SackChunk>(chunk));
                break;
            case ChunkAction::reply_heartbeat: {
                const auto& hb = std::get<wire::HeartbeatChunk>(chunk);
                send_packet(path, make_packet(tcb_, wire::HeartbeatAckChunk{hb.nonce, hb.path_id}));
                break;
            }
            case ChunkAction::process_heartbeat_ack:
                if (on_heartbeat_ack(tcb_, std::get<wire::HeartbeatAckChunk>(chunk), sim.now()) ==
                    HeartbeatAckResult::reactivated) {
                    request_pump(sim.now());
                }
                break;
            case ChunkAction::shutdown_step:
                if (const auto* sd = std::get_if<wire::ShutdownChunk>(&chunk)) {
                    // SHUTDOWN's cumulative TSN acknowledges like a SACK.
                    if (sd->cum_tsn > tcb_.peer_cum_tsn && tcb_.state != AssocState::shutdown_ack_sent) {
                        on_sack_chunk(wire::SackChunk{sd->cum_tsn, tcb_.peer_rwnd, {}, {}});
                    }
                    const auto before = tcb_.state;
                    if (auto reply = on_shutdown(tcb_, *sd, sim.now())) {
                        send_packet(path, *reply);
                        if (before != AssocState::shutdown_ack_sent) arm_shutdown_timer();
                    }
                } else if (std::holds_alternative<wire::ShutdownAckChunk>(chunk)) {
                    if (auto reply = on_shutdown_ack(tcb_)) {
                        send_packet(path, *reply);
                        close();
                    }
                } else {
                    on_shutdown_complete(tcb_);
                    if (tcb_.state == AssocState::closed) close();
                }
                break;
            case ChunkAction::abort:
                close();
                break;
        }
    }
}

Host::Host(sim::Simulator& sim, std::string name, sim::Rng rng, sim::CostLedger* ledger)
    : sim_(&sim), name_(std::move(name)), rng_(rng), ledger_(ledger) {}

std::size_t Host::add_path(sim::Link& outbound) {
    links_.push_back(&outbound);
    return links_.size() - 1;
}

void Host::listen(std::uint16_t port, AssocConfig config, AssocEvents events) {
    ListenerEntry e;
    e.listener.config = config;
    e.listener.port = port;
    e.listener.n_paths = std::max<std::size_t>(1, links_.size());
    e.listener.rng = rng_.split("listener:" + std::to_string(port));
    for (auto& b : e.listener.secret) b = static_cast<std::uint8_t>(e.listener.rng.next_u32());
    e.events = std::move(events);
    codec_ = {config.max_packet_bytes(), config.checksum};
    listeners_[port] = std::move(e);
}

Association& Host::connect(std::uint16_t local_port, std::uint16_t peer_port, AssocConfig config, AssocEvents events) {
    auto [tcb, init] = assoc_init(config, std::max<std::size_t>(1, links_.size()), local_port, peer_port, sim_->now(),
                                  rng_.split("assoc:" + std::to_string(local_port) + ":" + std::to_string(peer_port)));
    codec_ = {config.max_packet_bytes(), config.checksum};
    auto a = std::make_unique<Association>(*this, std::move(tcb), std::move(events));
    Association& ref = *a;
    assocs_[{local_port, peer_port}] = std::move(a);
    ++stats_.associations_created;
    ref.send_packet(ref.tcb_.primary_path(), init);
    ref.arm_handshake_timer();
    return ref;
}

std::size_t Host::association_count() const {
    return static_cast<std::size_t>(std::count_if(assocs_.begin(), assocs_.end(), [](const auto& kv) {
        return !kv.second->closed();
    }));
}

std::size_t Host::state_bytes() const {
    std::size_t sum = 0;
    for (const auto& [key, a] : assocs_) {
        if (!a->closed()) sum += a->tcb().footprint_bytes;
    }
    return sum;
}

std::vector<Association*> Host::associations() {
    std::vector<Association*> out;
    for (auto& [key, a] : assocs_) out.push_back(a.get());
    return out;
}

Time Host::budget_release_time() const {
    if (cpu_budget_ <= 0.0 || !ledger_) return sim_->now();
    const double seconds = ledger_->cpu_proxy() / cpu_budget_;
    const Time at{static_cast<std::int64_t>(seconds * 1e9)};
    return std::max(at, sim_->now());
}

void Host::transmit(std::size_t path, const wire::Packet& p, const wire::CodecOptions& opts) {
    if (path >= links_.size()) path = 0;
    wire::Bytes bytes = wire::encode_packet(p, opts);
    if (ledger_ && opts.checksum) ledger_->charge(sim::CostKind::crc_bytes, bytes.size());
    if (observer_) observer_(*this, path, p, sim_->now());
    ++stats_.packets_sent;
    const std::size_t wire_bytes = bytes.size() + wire::kNetworkHeaderBytes;
    links_[path]->transmit(sim::Frame{std::move(bytes), wire_bytes});
}

void Host::receive(std::size_t path, sim::Frame frame) {
    ++stats_.packets_received;
    wire::Packet pkt;
    try {
        pkt = wire::decode_packet(frame.bytes, codec_);
    } catch (const wire::CodecError&) {
        ++stats_.decode_errors;
        return;
    }
    if (ledger_ && codec_.checksum) ledger_->charge(sim::CostKind::crc_bytes, frame.bytes.size());

    auto it = assocs_.find({pkt.dst_port, pkt.src_port});
    if (it != assocs_.end() && !it->second->closed()) {
        Association& a = *it->second;
        if (verify_inbound(a.tcb(), pkt) == Verdict::discard) {
            ++stats_.bad_vtag;
            ++a.tcb().counters.bad_vtag_discards;
            return;
        }
        a.handle(path, pkt);
        return;
    }
    auto l = listeners_.find(pkt.dst_port);
    if (l == listeners_.end()) {
        ++stats_.no_association;
        return;
    }
    on_listener_packet(l->second, path, pkt);
}

void Host::on_listener_packet(ListenerEntry& l, std::size_t path, const wire::Packet& pkt) {
    if (pkt.chunks.empty()) return;
    const auto& first = pkt.chunks.front();
    if (const auto* init = std::get_if<wire::InitChunk>(&first)) {
        if (pkt.verification_tag != 0 || pkt.chunks.size() != 1 || init->init_tag == 0) return;
        ++stats_.inits_answered;
        transmit(path, listener_on_init(l.listener, *init, pkt.src_port, sim_->now()), codec_);
        return;
    }
    const auto* echo = std::get_if<wire::CookieEchoChunk>(&first);
    if (!echo) {
        ++stats_.no_association;
        return;
    }
    auto r = listener_on_cookie_echo(l.listener, *echo, sim_->now());
    if (r.status == CookieStatus::stale) {
        ++stats_.cookies_stale;
        return;
    }
    if (r.status != CookieStatus::ok) {
        ++stats_.cookies_bad_mac;
        return;
    }
    if (pkt.verification_tag != r.cookie->local_vtag || r.cookie->peer_port != pkt.src_port) {
        ++stats_.bad_vtag;
        return;
    }
    auto a = std::make_unique<Association>(*this, std::move(*r.tcb), l.events);
    Association& ref = *a;
    assocs_[{pkt.dst_port, pkt.src_port}] = std::move(a);
    ++stats_.associations_created;
    ref.send_packet(path, *r.cookie_ack);
    ref.start_timers();
    if (l.events.on_established) l.events.on_established(ref);
    if (pkt.chunks.size() > 1) {
        wire::Packet rest = pkt;
        rest.chunks.erase(rest.chunks.begin());
        ref.handle(path, rest);
    }
}

}  // namespace sctpdc::sctp
