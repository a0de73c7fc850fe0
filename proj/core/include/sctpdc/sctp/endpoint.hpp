#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "sctpdc/sctp/assoc.hpp"
#include "sctpdc/sctp/rxpath.hpp"
#include "sctpdc/sctp/txpath.hpp"
#include "sctpdc/sim/link.hpp"
#include "sctpdc/sim/simulator.hpp"

namespace sctpdc::sctp {

class Host;
class Association;

struct AssocEvents {
    std::function<void(Association&)> on_established;
    std::function<void(Association&, const InboundMessage&)> on_message;
    // Send-buffer space was freed by a SACK.
    std::function<void(Association&)> on_writable;
    std::function<void(Association&)> on_closed;
};

struct HostStats {
    std::uint64_t packets_sent = 0;
    std::uint64_t packets_received = 0;
    std::uint64_t decode_errors = 0;
    std::uint64_t no_association = 0;
    std::uint64_t bad_vtag = 0;
    std::uint64_t inits_answered = 0;
    std::uint64_t cookies_bad_mac = 0;
    std::uint64_t cookies_stale = 0;
    std::uint64_t duplicate_cookie_echo = 0;
    std::uint64_t associations_created = 0;
};

// Observer hook: every packet a host hands to a link.
using SendObserver = std::function<void(const Host&, std::size_t path, const wire::Packet&, Time)>;

class Association {
public:
    Association(Host& host, Tcb tcb, AssocEvents events);
    Association(const Association&) = delete;
    Association& operator=(const Association&) = delete;

    SubmitResult send(wire::StreamId stream, std::span<const std::uint8_t> payload, bool ordered = true);
    void shutdown();
    void abort();

    Tcb& tcb() { return tcb_; }
    const Tcb& tcb() const { return tcb_; }
    bool established() const { return tcb_.state == AssocState::established; }
    bool closed() const { return tcb_.state == AssocState::closed; }
    std::uint32_t id() const { return tcb_.cost_key; }
    Host& host() { return *host_; }

private:
    friend class Host;

    void start_timers();
    void stop_timers();
    void arm_handshake_timer();
    void arm_shutdown_timer();
    void update_t3(bool restart);
    void heartbeat_loop();
    void request_pump(Time at);
    void pump();
    void send_packet(std::size_t path, const wire::Packet& p);
    void handle(std::size_t path, const wire::Packet& p);
    void on_sack_chunk(const wire::SackChunk& s);
    void after_ack_progress(std::size_t newly_acked);
    void close();

    Host* host_;
    Tcb tcb_;
    AssocEvents events_;
    sim::Timer t1_;
    sim::Timer t2_;
    sim::Timer sack_timer_;
    sim::Timer hb_timer_;
    sim::Timer pump_timer_;
    std::vector<std::unique_ptr<sim::Timer>> t3_;
    Duration handshake_rto_{};
    bool closed_notified_ = false;
};

// An SCTP node: N network paths (one outbound link each), any number of
// associations demultiplexed on (local port, peer port), and stateless
// listeners.
class Host {
public:
    Host(sim::Simulator& sim, std::string name, sim::Rng rng, sim::CostLedger* ledger = nullptr);
    Host(const Host&) = delete;
    Host& operator=(const Host&) = delete;

    // Path ids are assigned in call order.
    std::size_t add_path(sim::Link& outbound);
    // Link sink for inbound frames on `path`.
    void receive(std::size_t path, sim::Frame frame);

    void listen(std::uint16_t port, AssocConfig config, AssocEvents events);
    Association& connect(std::uint16_t local_port, std::uint16_t peer_port, AssocConfig config, AssocEvents events);

    // Associations in any state other than CLOSED.
    std::size_t association_count() const;
    // Modeled TCB memory held by live associations.
    std::size_t state_bytes() const;
    std::vector<Association*> associations();

    // Cost units per simulated second; 0 disables the budget.
    void set_cpu_budget(double units_per_second) { cpu_budget_ = units_per_second; }
    void set_send_observer(SendObserver o) { observer_ = std::move(o); }

    sim::Simulator& simulator() { return *sim_; }
    sim::CostLedger* ledger() { return ledger_; }
    const HostStats& stats() const { return stats_; }
    const std::string& name() const { return name_; }
    std::size_t path_count() const { return links_.size(); }
    sim::Link& link(std::size_t path) { return *links_.at(path); }

private:
    friend class Association;

    using Key = std::pair<std::uint16_t, std::uint16_t>;  // local port, peer port

    struct ListenerEntry {
        Listener listener;
        AssocEvents events;
    };

    void transmit(std::size_t path, const wire::Packet& p, const wire::CodecOptions& opts);
    void on_listener_packet(ListenerEntry& l, std::size_t path, const wire::Packet& p);
    // Earliest time the CPU budget allows more sending (now if unconstrained).
    Time budget_release_time() const;

    sim::Simulator* sim_;
    std::string name_;
    sim::Rng rng_;
    sim::CostLedger* ledger_;
    std::vector<sim::Link*> links_;
    std::map<Key, std::unique_ptr<Association>> assocs_;
    std::map<std::uint16_t, ListenerEntry> listeners_;
    wire::CodecOptions codec_;
    double cpu_budget_ = 0.0;
    std::uint32_t next_assoc_key_ = 1;
    SendObserver observer_;
    HostStats stats_;
};

}  // namespace sctpdc::sctp
