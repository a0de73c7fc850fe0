#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sctpdc/sctp/config.hpp"
#include "sctpdc/sim/cost_ledger.hpp"

namespace sctpdc::bench {

enum class Scenario { bulk_12k, small_128b, multistream, scaling, loss_sweep, failover };
enum class Protocol { tcp, sctp };
// Protocol variant compared in loss sweeps.
enum class Mode { tcp, sctp_sack, sctp_gbn };

std::string_view to_string(Scenario s);
std::string_view to_string(Protocol p);
std::string_view to_string(Mode m);
Scenario parse_scenario(std::string_view text);
Protocol parse_protocol(std::string_view text);
Mode parse_mode(std::string_view text);

// Invalid configuration; field() names the offending key.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string field, const std::string& message)
        : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

struct ScenarioConfig {
    Scenario scenario = Scenario::bulk_12k;
    Protocol protocol = Protocol::sctp;

    // SCTP options.
    sctp::SackPolicy sack_policy = sctp::SackPolicy::per_packet();
    bool gbn = false;
    bool no_delay = false;  // Nagle-style hold on by default
    sctp::CopyMode copy_mode = sctp::CopyMode::optimized;
    unsigned mbs = 4;
    bool checksum = false;
    sim::LockModel lock_model = sim::LockModel::coarse;

    // TCP options.
    bool tcp_sack = false;
    bool nagle = true;

    // Link profile.
    double bandwidth_bps = 1e9;
    std::int64_t rtt_us = 102;
    double drop_prob = 0.0;
    std::vector<double> drop_list;  // loss sweep points; empty selects the standard six
    std::size_t queue_capacity = 1024;

    // Workload. Zero means "scenario default" for message_size, bytes,
    // hb_interval_ms and cpu_budget.
    std::size_t message_size = 0;
    std::size_t message_count = 0;  // per connection; 0 derives it from bytes
    std::size_t bytes = 0;          // aggregate byte target
    std::uint32_t rwnd = 131072;
    unsigned streams = 0;  // 0: 2 for multistream, else 1
    unsigned assocs = 0;   // associations or connections; 0: 4 for multistream and scaling, else 1
    std::uint64_t seed = 7;
    unsigned seeds = 1;  // sweep repetitions with seeds seed, seed+1, ...
    double duration_ms = 60000;  // simulated-time cap
    double pace_us = 0;          // per-flow message interval; 0 sends as fast as allowed
    double cpu_budget = 0;       // cost units per simulated second
    std::vector<Mode> modes = {Mode::tcp, Mode::sctp_sack, Mode::sctp_gbn};

    // Failover timeline; negative disables the event.
    double kill_ms = 50;
    double revive_ms = 200;
    double hb_interval_ms = 0;
};

// Sets one field from its textual form. Keys match the long CLI flag names
// without the leading dashes (e.g. "sack-policy", "drop-list").
void apply_setting(ScenarioConfig& cfg, std::string_view key, std::string_view value);

// Flat key=value file; '#' starts a comment, blank lines are ignored.
void apply_config_text(ScenarioConfig& cfg, std::string_view text);
void load_config_file(ScenarioConfig& cfg, const std::string& path);

// Cross-field checks; throws ConfigError.
void validate(const ScenarioConfig& cfg);

// The sweep points actually used.
std::vector<double> sweep_points(const ScenarioConfig& cfg);

}  // namespace sctpdc::bench
