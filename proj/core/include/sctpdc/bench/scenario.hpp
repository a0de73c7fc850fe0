#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sctpdc/bench/config.hpp"
#include "sctpdc/sim/time.hpp"

namespace sctpdc::bench {

// Delivery latencies of one message flow, in submission order.
struct FlowLatency {
    unsigned connection = 0;
    unsigned stream = 0;
    unsigned flow = 0;
    std::vector<sim::Duration> samples;

    double percentile_us(double q) const;
    double mean_us() const;
};

struct FailoverTimeline {
    double last_primary_send_ms = -1;
    double first_alternate_send_ms = -1;
    double failover_ms = -1;  // last primary send to first alternate send
    std::uint64_t primary_new_data_after_failover = 0;
    std::uint64_t alternate_new_data = 0;
    double restore_ms = -1;  // revival to first new data back on the primary
    double max_rto_ms = 0;   // largest primary-path RTO observed
};

struct MetricsReport {
    std::string label;
    Scenario scenario = Scenario::bulk_12k;
    Mode mode = Mode::sctp_sack;
    double drop_prob = 0;
    std::uint64_t seed = 0;
    unsigned connections = 0;
    unsigned streams = 0;

    bool completed = false;
    std::uint64_t messages_delivered = 0;
    std::uint64_t bytes_delivered = 0;
    double duration_s = 0;
    double goodput_mbps = 0;

    std::uint64_t packets_sent = 0;
    std::uint64_t packets_delivered = 0;
    std::uint64_t packets_dropped = 0;
    std::uint64_t retransmits = 0;
    std::uint64_t sacks = 0;

    std::uint64_t copy_bytes = 0;
    double cpu_proxy = 0;
    double elapsed_coarse = 0;
    double elapsed_fine = 0;

    double handshake_us = 0;
    std::size_t tcb_footprint = 0;

    std::vector<FlowLatency> latency;
    FailoverTimeline failover;

    double latency_percentile_us(double q) const;
};

// One transfer under cfg: bulk_12k, small_128b and loss_sweep run a single
// point at cfg.drop_prob; scaling uses cfg.assocs connections; multistream
// runs topology (c); failover runs the kill/revive timeline.
MetricsReport run_scenario(const ScenarioConfig& cfg);

// Connection scaling: one row per connection count 1, 2, 4, ... up to cfg.assocs.
std::vector<MetricsReport> run_scaling(const ScenarioConfig& cfg);

struct MultistreamReport {
    MetricsReport tcp_connections;      // (a)
    MetricsReport sctp_associations;    // (b)
    MetricsReport streams_per_assoc;    // (c)
    // Paced flows on topology (c): lossless, loss injected on stream 0 only,
    // and the same two runs with both flows sharing one stream.
    MetricsReport isolated_clean;
    MetricsReport isolated_lossy;
    MetricsReport shared_clean;
    MetricsReport shared_lossy;

    std::vector<MetricsReport> rows() const;
};

MultistreamReport run_multistream(const ScenarioConfig& cfg);

MetricsReport run_failover(const ScenarioConfig& cfg);

struct SweepRow {
    double drop_prob = 0;
    Mode mode = Mode::tcp;
    double goodput_mbps = 0;  // means over seeds
    double retransmits = 0;
    double sacks = 0;
    double cpu_proxy = 0;
    unsigned runs = 0;
};

// Sorted by (drop_prob, mode).
std::vector<SweepRow> run_loss_sweep(const ScenarioConfig& cfg);

// Runs whatever cfg.scenario calls for and flattens it to report rows.
std::vector<MetricsReport> run_rows(const ScenarioConfig& cfg);

// CSV with a fixed column order; floats use 6 significant digits.
std::size_t emit_csv(const std::vector<MetricsReport>& rows, std::ostream& out);
std::size_t emit_csv(const std::vector<SweepRow>& rows, std::ostream& out);
const std::vector<std::string>& report_columns();
const std::vector<std::string>& sweep_columns();

std::string format_report(const std::vector<MetricsReport>& rows);
std::string format_sweep(const std::vector<SweepRow>& rows);

// Renders a CSV previously written by emit_csv as an aligned text table.
std::string format_csv_table(std::istream& csv);

}  // namespace sctpdc::bench
