#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "sctpdc/bench/scenario.hpp"

namespace sctpdc::bench {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string join(const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) line += ',';
        line += cells[i];
    }
    line += '\n';
    return line;
}

std::size_t write(std::ostream& out, const std::string& s) {
    out << s;
    if (!out) throw std::runtime_error("write failed");
    return s.size();
}

std::vector<std::string> report_cells(const MetricsReport& r) {
    const auto& f = r.failover;
    return {r.label,
            std::string(to_string(r.scenario)),
            std::string(to_string(r.mode)),
            fmt(r.drop_prob),
            std::to_string(r.seed),
            std::to_string(r.connections),
            std::to_string(r.streams),
            r.completed ? "1" : "0",
            std::to_string(r.messages_delivered),
            std::to_string(r.bytes_delivered),
            fmt(r.duration_s),
            fmt(r.goodput_mbps),
            std::to_string(r.packets_sent),
            std::to_string(r.packets_delivered),
            std::to_string(r.packets_dropped),
            std::to_string(r.retransmits),
            std::to_string(r.sacks),
            std::to_string(r.copy_bytes),
            fmt(r.cpu_proxy),
            fmt(r.elapsed_coarse),
            fmt(r.elapsed_fine),
            fmt(r.latency_percentile_us(50)),
            fmt(r.latency_percentile_us(99)),
            fmt(r.latency_percentile_us(100)),
            fmt(r.handshake_us),
            std::to_string(r.tcb_footprint),
            fmt(f.failover_ms),
            std::to_string(f.primary_new_data_after_failover),
            fmt(f.restore_ms)};
}

std::vector<std::vector<std::string>> parse_csv(std::istream& in) {
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        rows.push_back(std::move(cells));
    }
    return rows;
}

std::string table(const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> width;
    for (const auto& r : rows) {
        if (width.size() < r.size()) width.resize(r.size(), 0);
        for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
    }
    std::string out;
    for (const auto& r : rows) {
        std::string line;
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i) line += "  ";
            line += r[i];
            if (i + 1 < r.size()) line.append(width[i] - r[i].size(), ' ');
        }
        out += line + '\n';
    }
    return out;
}

}  // namespace

const std::vector<std::string>& report_columns() {
    static const std::vector<std::string> cols = {
        "label",          "scenario",       "mode",         "drop_prob",     "seed",
        "connections",    "streams",        "completed",    "messages",      "bytes",
        "duration_s",     "goodput_mbps",   "packets_sent", "packets_delivered", "packets_dropped",
        "retransmits",    "sacks",          "copy_bytes",   "cpu_proxy",     "elapsed_coarse",
        "elapsed_fine",   "latency_p50_us", "latency_p99_us", "latency_max_us", "handshake_us",
        "tcb_footprint",  "failover_ms",    "primary_after_failover", "restore_ms"};
    return cols;
}

const std::vector<std::string>& sweep_columns() {
    static const std::vector<std::string> cols = {"drop_prob", "mode", "goodput_mbps", "retransmits", "sacks",
                                                  "cpu_proxy"};
    return cols;
}

std::size_t emit_csv(const std::vector<MetricsReport>& rows, std::ostream& out) {
    std::size_t n = write(out, join(report_columns()));
    for (const auto& r : rows) n += write(out, join(report_cells(r)));
    return n;
}

std::size_t emit_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
    std::size_t n = write(out, join(sweep_columns()));
    for (const auto& r : rows) {
        n += write(out, join({fmt(r.drop_prob), std::string(to_string(r.mode)), fmt(r.goodput_mbps),
                              fmt(r.retransmits), fmt(r.sacks), fmt(r.cpu_proxy)}));
    }
    return n;
}

std::string format_report(const std::vector<MetricsReport>& rows) {
    std::vector<std::vector<std::string>> t = {
        {"label", "mode", "drop", "done", "goodput_mbps", "retx", "sacks", "copy_bytes", "cpu_proxy",
         "coarse", "fine", "p50_us", "p99_us"}};
    for (const auto& r : rows) {
        t.push_back({r.label, std::string(to_string(r.mode)), fmt(r.drop_prob), r.completed ? "yes" : "NO",
                     fmt(r.goodput_mbps), std::to_string(r.retransmits), std::to_string(r.sacks),
                     std::to_string(r.copy_bytes), fmt(r.cpu_proxy), fmt(r.elapsed_coarse), fmt(r.elapsed_fine),
                     fmt(r.latency_percentile_us(50)), fmt(r.latency_percentile_us(99))});
    }
    std::string out = table(t);
    out += "\ncpu_proxy and elapsed columns are model cost units, not CPU percentages.\n";
    for (const auto& r : rows) {
        if (r.latency.size() > 1) {
            out += "\n" + r.label + " per-flow latency (us):\n";
            std::vector<std::vector<std::string>> lt = {{"conn", "stream", "flow", "n", "mean", "p50", "p99", "max"}};
            for (const auto& f : r.latency) {
                lt.push_back({std::to_string(f.connection), std::to_string(f.stream), std::to_string(f.flow),
                              std::to_string(f.samples.size()), fmt(f.mean_us()), fmt(f.percentile_us(50)),
                              fmt(f.percentile_us(99)), fmt(f.percentile_us(100))});
            }
            out += table(lt);
        }
        if (r.scenario == Scenario::failover) {
            const auto& f = r.failover;
            out += "\nfailover: last primary send " + fmt(f.last_primary_send_ms) + " ms, first alternate send " +
                   fmt(f.first_alternate_send_ms) + " ms, gap " + fmt(f.failover_ms) + " ms\n";
            out += "          new data on primary after failover: " + std::to_string(f.primary_new_data_after_failover) +
                   ", on alternate: " + std::to_string(f.alternate_new_data) + "\n";
            out += "          restored " + fmt(f.restore_ms) + " ms after revival; max primary rto " +
                   fmt(f.max_rto_ms) + " ms\n";
        }
    }
    return out;
}

std::string format_sweep(const std::vector<SweepRow>& rows) {
    std::vector<std::vector<std::string>> t = {{"drop_prob", "mode", "goodput_mbps", "retransmits", "sacks",
                                                "cpu_proxy", "runs"}};
    for (const auto& r : rows) {
        t.push_back({fmt(r.drop_prob), std::string(to_string(r.mode)), fmt(r.goodput_mbps), fmt(r.retransmits),
                     fmt(r.sacks), fmt(r.cpu_proxy), std::to_string(r.runs)});
    }
    return table(t);
}

std::string format_csv_table(std::istream& csv) { return table(parse_csv(csv)); }

}  // namespace sctpdc::bench
