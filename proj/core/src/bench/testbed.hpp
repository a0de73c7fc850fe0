#pragma once

// Internal: topology construction and workload plumbing shared by the
// scenario runners.

#include <deque>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "sctpdc/bench/scenario.hpp"
#include "sctpdc/sctp/endpoint.hpp"
#include "sctpdc/sim/cost_ledger.hpp"
#include "sctpdc/sim/link.hpp"
#include "sctpdc/sim/rng.hpp"
#include "sctpdc/sim/simulator.hpp"
#include "sctpdc/tcp/endpoint.hpp"

namespace sctpdc::bench::detail {

using sim::Duration;
using sim::Time;

struct Workload {
    std::size_t message_size = 12288;
    std::size_t messages_per_conn = 1;
    unsigned flows = 1;          // per connection; payload bytes carry the flow index
    unsigned streams = 1;        // SCTP streams per association
    bool shared_stream = false;  // all flows on stream 0
    Duration pace{0};            // per-flow interval; zero sends as fast as allowed

    unsigned stream_of(unsigned flow) const { return shared_stream ? 0 : flow % streams; }
};

struct Topology {
    unsigned connections = 1;
    unsigned host_pairs = 1;  // connection c lives on pair c % host_pairs
    unsigned paths = 1;
};

sim::LinkParams link_params(const ScenarioConfig& cfg);
sctp::AssocConfig assoc_config(const ScenarioConfig& cfg, unsigned streams);
tcp::TcpConfig tcp_config(const ScenarioConfig& cfg);

// Measurement and workload state common to both protocols.
class Bed {
public:
    Bed(const ScenarioConfig& cfg, Topology topo, Workload w, std::uint64_t seed);
    virtual ~Bed() = default;
    Bed(const Bed&) = delete;
    Bed& operator=(const Bed&) = delete;

    sim::Simulator& simulator() { return sim_; }
    sim::CostLedger& ledger() { return ledger_; }
    // Outbound link of pair/path; forward is client to server.
    sim::Link& link(unsigned pair, unsigned path, bool forward);

    virtual void start() = 0;
    MetricsReport run(const std::string& label);

protected:
    struct Conn {
        std::size_t released = 0;  // messages the workload has made available
        std::size_t submitted = 0;
        std::size_t delivered = 0;
        std::deque<unsigned> backlog;  // flows of released, unsubmitted messages
        // Per stream: submit time and flow of messages in flight, in order.
        std::vector<std::deque<std::pair<Time, unsigned>>> pending;
        std::size_t partial_bytes = 0;  // byte-stream reassembly
        Time connect_time{};
        Time established_time{};
        bool established = false;
    };

    // Hands one message to the protocol; false if it must wait.
    virtual bool submit(unsigned conn, unsigned stream, std::span<const std::uint8_t> payload) = 0;
    virtual void collect(MetricsReport& r) = 0;

    void on_established(unsigned conn);
    void pump(unsigned conn);
    void on_message(unsigned conn, unsigned stream, std::size_t bytes);
    void on_bytes(unsigned conn, std::size_t bytes);

    const ScenarioConfig& cfg_;
    Topology topo_;
    Workload w_;
    std::uint64_t seed_;
    sim::Rng rng_;
    sim::Simulator sim_;
    sim::CostLedger ledger_;
    // [pair][path] -> forward / reverse link
    std::vector<std::vector<std::unique_ptr<sim::Link>>> fwd_, rev_;
    std::vector<Conn> conns_;
    std::vector<std::vector<std::uint8_t>> payloads_;  // per flow
    std::vector<FlowLatency> latency_;                // [conn * flows + flow]

    Time first_submit_{std::numeric_limits<Time::rep>::max()};
    Time last_delivery_{0};
    std::uint64_t bytes_delivered_ = 0;
    std::uint64_t messages_delivered_ = 0;
    unsigned conns_done_ = 0;

private:
    void release(unsigned conn, unsigned flow, std::size_t k);
    void record(unsigned conn, std::pair<Time, unsigned> sent);
    void finish_check(unsigned conn);
};

class SctpBed : public Bed {
public:
    SctpBed(const ScenarioConfig& cfg, Topology topo, Workload w, std::uint64_t seed);

    sctp::Host& client(unsigned pair) { return *clients_.at(pair); }
    sctp::Host& server(unsigned pair) { return *servers_.at(pair); }
    sctp::Association* association(unsigned conn) { return assocs_.at(conn); }
    void set_cpu_budget(double units_per_second);

    void start() override;

private:
    bool submit(unsigned conn, unsigned stream, std::span<const std::uint8_t> payload) override;
    void collect(MetricsReport& r) override;

    sctp::AssocConfig acfg_;
    std::vector<std::unique_ptr<sctp::Host>> clients_, servers_;
    std::vector<sctp::Association*> assocs_;
};

class TcpBed : public Bed {
public:
    TcpBed(const ScenarioConfig& cfg, Topology topo, Workload w, std::uint64_t seed);

    void set_cpu_budget(double units_per_second);
    void start() override;

private:
    bool submit(unsigned conn, unsigned stream, std::span<const std::uint8_t> payload) override;
    void collect(MetricsReport& r) override;

    tcp::TcpConfig tcfg_;
    std::vector<std::unique_ptr<tcp::TcpHost>> clients_, servers_;
    std::vector<tcp::TcpEndpoint*> eps_;
};

}  // namespace sctpdc::bench::detail
