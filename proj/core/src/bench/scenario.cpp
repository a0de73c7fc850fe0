#include "sctpdc/bench/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

#include "sctpdc/wire/codec.hpp"
#include "testbed.hpp"

namespace sctpdc::bench {

using namespace detail;

namespace {

constexpr std::size_t kMiB = 1u << 20;
// Cost units per simulated second granted to the scaling scenario when no
// budget is given: roughly two connections at 1 Gb/s.
constexpr double kScalingBudget = 6e8;
constexpr unsigned kHolDropEvery = 10;

std::size_t message_size(const ScenarioConfig& cfg) {
    if (cfg.message_size) return cfg.message_size;
    switch (cfg.scenario) {
        case Scenario::small_128b: return 128;
        case Scenario::multistream: return 2560;
        case Scenario::failover: return 1452;
        default: return 12288;
    }
}

std::size_t total_bytes(const ScenarioConfig& cfg) {
    if (cfg.bytes) return cfg.bytes;
    switch (cfg.scenario) {
        case Scenario::small_128b: return kMiB;
        case Scenario::loss_sweep: return 16 * kMiB;
        default: return 64 * kMiB;
    }
}

unsigned assocs(const ScenarioConfig& cfg) {
    if (cfg.assocs) return cfg.assocs;
    return cfg.scenario == Scenario::multistream || cfg.scenario == Scenario::scaling ? 4 : 1;
}

unsigned streams(const ScenarioConfig& cfg) {
    if (cfg.streams) return cfg.streams;
    return cfg.scenario == Scenario::multistream ? 2 : 1;
}

std::size_t per_conn_messages(const ScenarioConfig& cfg, std::size_t bytes_per_conn, std::size_t size) {
    if (cfg.message_count) return cfg.message_count;
    return std::max<std::size_t>(1, (bytes_per_conn + size - 1) / size);
}

Duration pace(const ScenarioConfig& cfg, double fallback_us) {
    const double us = cfg.pace_us > 0 ? cfg.pace_us : fallback_us;
    return Duration{static_cast<std::int64_t>(us * 1000.0)};
}

std::unique_ptr<Bed> make_bed(const ScenarioConfig& cfg, Topology topo, Workload w, std::uint64_t seed) {
    if (cfg.protocol == Protocol::tcp) {
        w.flows = 1;
        w.streams = 1;
        w.shared_stream = false;
        auto b = std::make_unique<TcpBed>(cfg, topo, w, seed);
        if (cfg.cpu_budget > 0) b->set_cpu_budget(cfg.cpu_budget);
        return b;
    }
    auto b = std::make_unique<SctpBed>(cfg, topo, w, seed);
    if (cfg.cpu_budget > 0) b->set_cpu_budget(cfg.cpu_budget);
    return b;
}

MetricsReport run_bed(const ScenarioConfig& cfg, Topology topo, Workload w, const std::string& label) {
    validate(cfg);
    return make_bed(cfg, topo, w, cfg.seed)->run(label);
}

// Single-connection-per-link transfer used by bulk_12k, small_128b and
// loss-sweep points.
MetricsReport run_transfer(const ScenarioConfig& cfg, const std::string& label) {
    const unsigned n = assocs(cfg);
    Workload w;
    w.message_size = message_size(cfg);
    w.messages_per_conn = per_conn_messages(cfg, total_bytes(cfg) / n, w.message_size);
    w.streams = w.flows = streams(cfg);
    if (cfg.pace_us > 0) w.pace = pace(cfg, cfg.pace_us);
    return run_bed(cfg, {n, 1, 1}, w, label);
}

ScenarioConfig for_mode(ScenarioConfig cfg, Mode m) {
    cfg.protocol = m == Mode::tcp ? Protocol::tcp : Protocol::sctp;
    cfg.gbn = m == Mode::sctp_gbn;
    return cfg;
}

// Drops every kHolDropEvery-th packet that carries DATA of flow 0 (payload
// bytes equal the flow index).
sim::Link::DropFilter flow0_dropper() {
    auto count = std::make_shared<std::uint64_t>(0);
    return [count](const sim::Frame& f) {
        wire::Packet p;
        try {
            p = wire::decode_packet(f.bytes);
        } catch (const wire::CodecError&) {
            return false;
        }
        for (const auto& c : p.chunks) {
            const auto* d = std::get_if<wire::DataChunk>(&c);
            if (d && !d->payload.empty() && d->payload.back() == 0) {
                return ++*count % kHolDropEvery == 0;
            }
        }
        return false;
    };
}

// Runs fn(i) for i in [0, n) on a small worker pool; results keep index order.
template <typename T, typename Fn>
std::vector<T> parallel_map(std::size_t n, Fn fn) {
    std::vector<T> out(n);
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    const unsigned workers =
        static_cast<unsigned>(std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency())));
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    out[i] = fn(i);
                } catch (...) {
                    std::lock_guard lk(error_mu);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
    return out;
}

}  // namespace

double FlowLatency::percentile_us(double q) const {
    if (samples.empty()) return 0;
    auto v = samples;
    std::sort(v.begin(), v.end());
    // Nearest-rank percentile.
    const auto rank = static_cast<std::size_t>(std::ceil(q / 100.0 * static_cast<double>(v.size())));
    return sim::to_micros(v[std::clamp<std::size_t>(rank, 1, v.size()) - 1]);
}

double FlowLatency::mean_us() const {
    if (samples.empty()) return 0;
    double sum = 0;
    for (auto d : samples) sum += sim::to_micros(d);
    return sum / static_cast<double>(samples.size());
}

double MetricsReport::latency_percentile_us(double q) const {
    FlowLatency all;
    for (const auto& f : latency) all.samples.insert(all.samples.end(), f.samples.begin(), f.samples.end());
    return all.percentile_us(q);
}

MetricsReport run_scenario(const ScenarioConfig& cfg) {
    switch (cfg.scenario) {
        case Scenario::bulk_12k:
        case Scenario::small_128b:
        case Scenario::loss_sweep:
            return run_transfer(cfg, std::string(to_string(cfg.scenario)));
        case Scenario::scaling: {
            const unsigned n = assocs(cfg);
            ScenarioConfig c = cfg;
            if (c.cpu_budget == 0) c.cpu_budget = kScalingBudget;
            Workload w;
            w.message_size = message_size(cfg);
            w.messages_per_conn = per_conn_messages(cfg, total_bytes(cfg) / n, w.message_size);
            return run_bed(c, {n, n, 1}, w, "scaling_" + std::to_string(n));
        }
        case Scenario::multistream:
            return run_multistream(cfg).streams_per_assoc;
        case Scenario::failover:
            return run_failover(cfg);
    }
    throw ConfigError("scenario", "unhandled scenario");
}

std::vector<MetricsReport> run_scaling(const ScenarioConfig& cfg) {
    const unsigned max_n = assocs(cfg);
    ScenarioConfig c = cfg;
    c.scenario = Scenario::scaling;
    if (c.cpu_budget == 0) c.cpu_budget = kScalingBudget;
    // Every row moves the same bytes per connection.
    const std::size_t per_conn = total_bytes(c) / max_n;
    std::vector<MetricsReport> rows;
    for (unsigned n = 1; n <= max_n; n *= 2) {
        Workload w;
        w.message_size = message_size(c);
        w.messages_per_conn = per_conn_messages(c, per_conn, w.message_size);
        rows.push_back(run_bed(c, {n, n, 1}, w, "scaling_" + std::to_string(n)));
    }
    return rows;
}

std::vector<MetricsReport> MultistreamReport::rows() const {
    return {tcp_connections, sctp_associations, streams_per_assoc, isolated_clean, isolated_lossy, shared_clean,
            shared_lossy};
}

MultistreamReport run_multistream(const ScenarioConfig& cfg_in) {
    ScenarioConfig cfg = cfg_in;
    cfg.scenario = Scenario::multistream;
    validate(cfg);
    const unsigned n = assocs(cfg);
    const unsigned s = streams(cfg);
    if (n % s != 0) throw ConfigError("streams", "must divide the association count");
    const unsigned c_assocs = n / s;
    const std::size_t size = message_size(cfg);
    const std::size_t bytes = total_bytes(cfg);

    MultistreamReport out;
    Workload one;
    one.message_size = size;
    one.messages_per_conn = per_conn_messages(cfg, bytes / n, size);
    out.tcp_connections = run_bed(for_mode(cfg, Mode::tcp), {n, 1, 1}, one, "a_tcp_connections");
    const ScenarioConfig sctp_cfg = for_mode(cfg, cfg.gbn ? Mode::sctp_gbn : Mode::sctp_sack);
    out.sctp_associations = run_bed(sctp_cfg, {n, 1, 1}, one, "b_sctp_associations");

    Workload multi;
    multi.message_size = size;
    multi.messages_per_conn = per_conn_messages(cfg, bytes / c_assocs, size);
    multi.flows = multi.streams = s;
    out.streams_per_assoc = run_bed(sctp_cfg, {c_assocs, 1, 1}, multi, "c_streams_per_assoc");

    // Head-of-line comparison: paced flows, loss only through the
    // deterministic flow-0 filter.
    ScenarioConfig hol = sctp_cfg;
    hol.drop_prob = 0;
    // Latency-sensitive flows: a held sub-MTU tail would couple the flows at
    // the sender and mask what the receiver does.
    hol.no_delay = true;
    Workload paced;
    paced.message_size = size;
    paced.flows = std::max(2u, s);
    paced.streams = paced.flows;
    paced.messages_per_conn = cfg.message_count ? cfg.message_count : 200 * paced.flows;
    paced.pace = pace(cfg, 1000);
    auto run_hol = [&](bool shared, bool lossy, const char* label) {
        Workload w = paced;
        w.shared_stream = shared;
        SctpBed bed(hol, {c_assocs, 1, 1}, w, hol.seed);
        if (lossy) bed.link(0, 0, true).set_drop_filter(flow0_dropper());
        return bed.run(label);
    };
    out.isolated_clean = run_hol(false, false, "c_isolated_clean");
    out.isolated_lossy = run_hol(false, true, "c_isolated_lossy");
    out.shared_clean = run_hol(true, false, "c_shared_clean");
    out.shared_lossy = run_hol(true, true, "c_shared_lossy");
    return out;
}

MetricsReport run_failover(const ScenarioConfig& cfg_in) {
    ScenarioConfig cfg = cfg_in;
    cfg.scenario = Scenario::failover;
    cfg.protocol = Protocol::sctp;
    if (cfg.hb_interval_ms == 0) cfg.hb_interval_ms = 50;
    validate(cfg);

    Workload w;
    w.message_size = message_size(cfg);
    w.messages_per_conn = cfg.message_count ? cfg.message_count : 400;
    w.pace = pace(cfg, 1000);
    SctpBed bed(cfg, {1, 1, 2}, w, cfg.seed);
    auto& sim = bed.simulator();

    const Time kill{static_cast<std::int64_t>(cfg.kill_ms * 1e6)};
    const Time revive{static_cast<std::int64_t>(cfg.revive_ms * 1e6)};
    const bool kills = cfg.kill_ms >= 0;
    const bool revives = kills && cfg.revive_ms >= 0;
    if (kills) {
        sim.schedule_at(kill, [&bed] {
            bed.link(0, 0, true).set_drop_prob(1.0);
            bed.link(0, 0, false).set_drop_prob(1.0);
        });
    }
    if (revives) {
        sim.schedule_at(revive, [&bed, p = cfg.drop_prob] {
            bed.link(0, 0, true).set_drop_prob(p);
            bed.link(0, 0, false).set_drop_prob(p);
        });
    }

    FailoverTimeline tl;
    bool have_tsn = false;
    wire::Tsn highest;
    Time last_primary{-1};
    Time first_alt{-1};
    bed.client(0).set_send_observer([&](const sctp::Host&, std::size_t path, const wire::Packet& p, Time now) {
        if (auto* a = bed.association(0)) {
            tl.max_rto_ms = std::max(tl.max_rto_ms, sim::to_seconds(a->tcb().paths[0].cc.rto) * 1e3);
        }
        bool fresh = false;
        for (const auto& c : p.chunks) {
            const auto* d = std::get_if<wire::DataChunk>(&c);
            if (!d) continue;
            if (!have_tsn || highest < d->tsn) {
                highest = d->tsn;
                have_tsn = true;
                fresh = true;
            }
        }
        if (!fresh) return;
        if (path == 0) {
            if (first_alt.count() < 0) {
                last_primary = now;
            } else if (!revives || now < revive) {
                ++tl.primary_new_data_after_failover;
            } else if (tl.restore_ms < 0) {
                tl.restore_ms = sim::to_seconds(now - revive) * 1e3;
            }
        } else {
            ++tl.alternate_new_data;
            if (first_alt.count() < 0) first_alt = now;
        }
    });

    auto r = bed.run("failover");
    if (last_primary.count() >= 0) tl.last_primary_send_ms = sim::to_seconds(last_primary) * 1e3;
    if (first_alt.count() >= 0) {
        tl.first_alternate_send_ms = sim::to_seconds(first_alt) * 1e3;
        if (last_primary.count() >= 0) tl.failover_ms = sim::to_seconds(first_alt - last_primary) * 1e3;
    }
    r.failover = tl;
    return r;
}

namespace {

std::vector<MetricsReport> sweep_runs(const ScenarioConfig& cfg_in) {
    ScenarioConfig cfg = cfg_in;
    cfg.scenario = Scenario::loss_sweep;
    validate(cfg);
    struct Job {
        double drop;
        Mode mode;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (double d : sweep_points(cfg)) {
        for (Mode m : cfg.modes) {
            for (unsigned i = 0; i < cfg.seeds; ++i) jobs.push_back({d, m, cfg.seed + i});
        }
    }
    return parallel_map<MetricsReport>(jobs.size(), [&](std::size_t i) {
        ScenarioConfig c = for_mode(cfg, jobs[i].mode);
        c.drop_prob = jobs[i].drop;
        c.seed = jobs[i].seed;
        return run_transfer(c, "loss_sweep");
    });
}

}  // namespace

std::vector<SweepRow> run_loss_sweep(const ScenarioConfig& cfg) {
    std::map<std::pair<double, int>, SweepRow> acc;
    for (const auto& r : sweep_runs(cfg)) {
        auto& row = acc[{r.drop_prob, static_cast<int>(r.mode)}];
        row.drop_prob = r.drop_prob;
        row.mode = r.mode;
        row.goodput_mbps += r.goodput_mbps;
        row.retransmits += static_cast<double>(r.retransmits);
        row.sacks += static_cast<double>(r.sacks);
        row.cpu_proxy += r.cpu_proxy;
        ++row.runs;
    }
    std::vector<SweepRow> out;
    for (auto& [key, row] : acc) {
        const double n = row.runs;
        row.goodput_mbps /= n;
        row.retransmits /= n;
        row.sacks /= n;
        row.cpu_proxy /= n;
        out.push_back(row);
    }
    return out;
}

std::vector<MetricsReport> run_rows(const ScenarioConfig& cfg) {
    switch (cfg.scenario) {
        case Scenario::scaling: return run_scaling(cfg);
        case Scenario::multistream: return run_multistream(cfg).rows();
        case Scenario::loss_sweep: return sweep_runs(cfg);
        default: return {run_scenario(cfg)};
    }
}

}  // namespace sctpdc::bench
