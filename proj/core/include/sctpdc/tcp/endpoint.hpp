#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>

#include "sctpdc/sim/cost_ledger.hpp"
#include "sctpdc/sim/link.hpp"
#include "sctpdc/sim/simulator.hpp"
#include "sctpdc/tcp/conn.hpp"

namespace sctpdc::tcp {

class TcpHost;
class TcpEndpoint;

struct TcpEvents {
    std::function<void(TcpEndpoint&)> on_established;
    std::function<void(TcpEndpoint&, std::span<const std::uint8_t>)> on_data;
    std::function<void(TcpEndpoint&)> on_writable;
};

// One side of a connection bound to a host's outbound link.
class TcpEndpoint {
public:
    TcpEndpoint(TcpHost& host, TcpConn conn, TcpEvents events);
    TcpEndpoint(const TcpEndpoint&) = delete;
    TcpEndpoint& operator=(const TcpEndpoint&) = delete;

    TcpSubmitStatus send(std::span<const std::uint8_t> bytes);
    bool established() const { return established_; }
    TcpConn& conn() { return conn_; }
    const TcpConn& conn() const { return conn_; }
    // Handshake completion; connect_pair schedules this.
    void establish();

private:
    friend class TcpHost;

    void handle(const Segment& s);
    void pump();
    void transmit(const Segment& s);
    void update_rto_timer(bool restart);
    void charge(bool data);
    void request_pump();

    TcpHost* host_;
    TcpConn conn_;
    TcpEvents events_;
    bool established_ = false;
    std::uint32_t cost_key_ = 0;
    sim::Timer rto_timer_;
    sim::Timer dack_timer_;
    sim::Timer pump_timer_;
};

class TcpHost {
public:
    TcpHost(sim::Simulator& sim, std::string name, sim::CostLedger* ledger = nullptr);
    TcpHost(const TcpHost&) = delete;
    TcpHost& operator=(const TcpHost&) = delete;

    void set_link(sim::Link& outbound) { link_ = &outbound; }
    void receive(sim::Frame frame);

    TcpEndpoint& open(std::uint16_t local_port, std::uint16_t peer_port, const TcpConfig& config, Seq local_isn,
                      Seq peer_isn, TcpEvents events);

    sim::Simulator& simulator() { return *sim_; }
    sim::CostLedger* ledger() { return ledger_; }
    sim::Link& link() { return *link_; }
    // Cost units per simulated second; 0 disables the budget.
    void set_cpu_budget(double units_per_second) { cpu_budget_ = units_per_second; }
    // Earliest time the CPU budget allows more sending.
    Time budget_release_time() const;
    const std::string& name() const { return name_; }
    std::uint64_t decode_errors() const { return decode_errors_; }

private:
    sim::Simulator* sim_;
    std::string name_;
    sim::CostLedger* ledger_;
    sim::Link* link_ = nullptr;
    std::map<std::pair<std::uint16_t, std::uint16_t>, std::unique_ptr<TcpEndpoint>> conns_;
    std::uint64_t decode_errors_ = 0;
    double cpu_budget_ = 0.0;
};

// Opens both ends and marks them established after one round trip, standing
// in for the three-way handshake. Hosts must already be wired to links.
std::pair<TcpEndpoint*, TcpEndpoint*> connect_pair(TcpHost& a, TcpHost& b, std::uint16_t a_port,
                                                   std::uint16_t b_port, const TcpConfig& config,
                                                   TcpEvents a_events, TcpEvents b_events);

}  // namespace sctpdc::tcp
