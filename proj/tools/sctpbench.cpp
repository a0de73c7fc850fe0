// sctpbench: scenario runner for the SCTP/TCP simulator.
//
//   sctpbench run   --scenario bulk_12k --protocol sctp --sack-policy per-k:7
//   sctpbench sweep --drop-list 0,0.01,0.05 --seeds 5 --csv sweep.csv
//   sctpbench report results.csv
//
// Exit codes: 0 success, 1 invalid configuration, 2 runtime error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sctpdc/bench/config.hpp"
#include "sctpdc/bench/scenario.hpp"

namespace {

using namespace sctpdc::bench;

struct Flags {
    std::optional<std::string> config;
    std::optional<std::string> csv;
    // (key, value) pairs in command-line order, applied after the config file.
    std::vector<std::pair<std::string, std::string>> settings;
    std::vector<std::string> extra;  // --set key=value
};

void add_scenario_options(CLI::App& app, Flags& f) {
    app.add_option("--config", f.config, "key=value config file (flags override it)");
    app.add_option("--csv", f.csv, "write CSV here ('-' for stdout)");
    app.add_option("--set", f.extra, "any setting as key=value; repeatable");

    auto value = [&](const char* flag, const char* key, const char* help) {
        app.add_option_function<std::string>(
               flag, [&f, key](const std::string& v) { f.settings.emplace_back(key, v); }, help)
            ->type_name("VALUE");
    };
    auto toggle = [&](const char* flag, const char* key, const char* help) {
        app.add_flag_callback(flag, [&f, key] { f.settings.emplace_back(key, "true"); }, help);
    };
    value("--scenario", "scenario", "bulk_12k|small_128b|multistream|scaling|loss_sweep|failover");
    value("--protocol", "protocol", "tcp|sctp");
    value("--sack-policy", "sack-policy", "per-packet|lk-double|per-k:<k>|delayed:<ms>");
    toggle("--gbn", "gbn", "go-back-N acknowledgment instead of selective");
    toggle("--no-delay", "no-delay", "disable the Nagle-style hold of partial packets");
    value("--copy-mode", "copy-mode", "legacy|optimized");
    value("--drop", "drop", "per-packet drop probability");
    value("--drop-list", "drop-list", "comma-separated sweep points");
    value("--bandwidth", "bandwidth", "link rate in bits/s");
    value("--rtt-us", "rtt-us", "round-trip propagation delay in microseconds");
    value("--rwnd", "rwnd", "receive window in bytes");
    value("--mbs", "mbs", "maximum burst in packets");
    value("--streams", "streams", "streams per association");
    value("--assocs", "assocs", "associations (or TCP connections)");
    value("--seed", "seed", "base seed");
    value("--seeds", "seeds", "repetitions per sweep point");
    value("--bytes", "bytes", "aggregate byte target");
    value("--message-size", "message-size", "message size in bytes");
    value("--modes", "modes", "sweep modes, e.g. tcp,sctp_sack,sctp_gbn");
    toggle("--checksum", "checksum", "compute CRC-32c on every packet");
    toggle("--tcp-sack", "tcp-sack", "enable SACK blocks in the TCP baseline");
}

ScenarioConfig build_config(const Flags& f) {
    ScenarioConfig cfg;
    if (f.config) load_config_file(cfg, *f.config);
    for (const auto& [k, v] : f.settings) apply_setting(cfg, k, v);
    for (const auto& kv : f.extra) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("set", "expected key=value, got '" + kv + "'");
        apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    validate(cfg);
    return cfg;
}

template <typename Rows>
void write_csv(const std::optional<std::string>& path, const Rows& rows) {
    if (!path) return;
    if (*path == "-") {
        emit_csv(rows, std::cout);
        return;
    }
    std::ofstream out(*path);
    if (!out) throw std::runtime_error("cannot open '" + *path + "' for writing");
    emit_csv(rows, out);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SCTP/TCP data-center transport simulator benchmarks"};
    app.require_subcommand(1);

    Flags run_flags, sweep_flags;
    auto* run = app.add_subcommand("run", "run one scenario and print its report");
    add_scenario_options(*run, run_flags);
    auto* sweep = app.add_subcommand("sweep", "loss sweep over drop rates and protocol modes");
    add_scenario_options(*sweep, sweep_flags);
    auto* report = app.add_subcommand("report", "render a CSV written by run or sweep as a table");
    std::string report_path;
    report->add_option("csv", report_path, "CSV file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*run) {
            const auto cfg = build_config(run_flags);
            const auto rows = run_rows(cfg);
            if (run_flags.csv != "-") std::cout << format_report(rows);
            write_csv(run_flags.csv, rows);
        } else if (*sweep) {
            auto cfg = build_config(sweep_flags);
            cfg.scenario = Scenario::loss_sweep;
            const auto rows = run_loss_sweep(cfg);
            if (sweep_flags.csv != "-") std::cout << format_sweep(rows);
            write_csv(sweep_flags.csv, rows);
        } else if (*report) {
            std::ifstream in(report_path);
            if (!in) throw std::runtime_error("cannot open '" + report_path + "'");
            std::cout << format_csv_table(in);
        }
    } catch (const ConfigError& e) {
        std::cerr << "invalid config: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
