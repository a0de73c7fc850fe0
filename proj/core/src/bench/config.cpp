#include "sctpdc/bench/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace sctpdc::bench {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(std::string_view key, std::string_view v) {
    T out{};
    const auto* end = v.data() + v.size();
    const auto [p, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc{} || p != end) throw ConfigError(std::string(key), "not a number: '" + std::string(v) + "'");
    return out;
}

// from_chars for double is available in libstdc++ 11.
double parse_double(std::string_view key, std::string_view v) { return parse_number<double>(key, v); }

bool parse_bool(std::string_view key, std::string_view v) {
    if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
    if (v == "0" || v == "false" || v == "off" || v == "no") return false;
    throw ConfigError(std::string(key), "not a boolean: '" + std::string(v) + "'");
}

std::vector<std::string> split_list(std::string_view v) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= v.size()) {
        const auto comma = v.find(',', start);
        const auto end = comma == std::string_view::npos ? v.size() : comma;
        auto item = trim(v.substr(start, end - start));
        if (!item.empty()) out.push_back(std::move(item));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

}  // namespace

std::string_view to_string(Scenario s) {
    switch (s) {
        case Scenario::bulk_12k: return "bulk_12k";
        case Scenario::small_128b: return "small_128b";
        case Scenario::multistream: return "multistream";
        case Scenario::scaling: return "scaling";
        case Scenario::loss_sweep: return "loss_sweep";
        case Scenario::failover: return "failover";
    }
    return "?";
}

std::string_view to_string(Protocol p) { return p == Protocol::tcp ? "tcp" : "sctp"; }

std::string_view to_string(Mode m) {
    switch (m) {
        case Mode::tcp: return "tcp";
        case Mode::sctp_sack: return "sctp_sack";
        case Mode::sctp_gbn: return "sctp_gbn";
    }
    return "?";
}

Scenario parse_scenario(std::string_view text) {
    for (auto s : {Scenario::bulk_12k, Scenario::small_128b, Scenario::multistream, Scenario::scaling,
                   Scenario::loss_sweep, Scenario::failover}) {
        if (to_string(s) == text) return s;
    }
    throw ConfigError("scenario", "unknown scenario '" + std::string(text) + "'");
}

Protocol parse_protocol(std::string_view text) {
    if (text == "tcp") return Protocol::tcp;
    if (text == "sctp") return Protocol::sctp;
    throw ConfigError("protocol", "expected tcp or sctp, got '" + std::string(text) + "'");
}

Mode parse_mode(std::string_view text) {
    for (auto m : {Mode::tcp, Mode::sctp_sack, Mode::sctp_gbn}) {
        if (to_string(m) == text) return m;
    }
    throw ConfigError("modes", "unknown mode '" + std::string(text) + "'");
}

void apply_setting(ScenarioConfig& cfg, std::string_view key_in, std::string_view value_in) {
    const std::string key = trim(key_in);
    const std::string v = trim(value_in);
    if (key == "scenario") {
        cfg.scenario = parse_scenario(v);
    } else if (key == "protocol") {
        cfg.protocol = parse_protocol(v);
    } else if (key == "sack-policy") {
        try {
            cfg.sack_policy = sctp::parse_sack_policy(v);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(key, e.what());
        }
    } else if (key == "gbn") {
        cfg.gbn = parse_bool(key, v);
    } else if (key == "no-delay") {
        cfg.no_delay = parse_bool(key, v);
    } else if (key == "copy-mode") {
        if (v == "legacy") {
            cfg.copy_mode = sctp::CopyMode::legacy;
        } else if (v == "optimized") {
            cfg.copy_mode = sctp::CopyMode::optimized;
        } else {
            throw ConfigError(key, "expected legacy or optimized, got '" + v + "'");
        }
    } else if (key == "mbs") {
        cfg.mbs = parse_number<unsigned>(key, v);
    } else if (key == "checksum") {
        cfg.checksum = parse_bool(key, v);
    } else if (key == "lock-model") {
        if (v == "coarse") {
            cfg.lock_model = sim::LockModel::coarse;
        } else if (v == "fine") {
            cfg.lock_model = sim::LockModel::fine;
        } else {
            throw ConfigError(key, "expected coarse or fine, got '" + v + "'");
        }
    } else if (key == "tcp-sack") {
        cfg.tcp_sack = parse_bool(key, v);
    } else if (key == "nagle") {
        cfg.nagle = parse_bool(key, v);
    } else if (key == "bandwidth") {
        cfg.bandwidth_bps = parse_double(key, v);
    } else if (key == "rtt-us") {
        cfg.rtt_us = parse_number<std::int64_t>(key, v);
    } else if (key == "drop") {
        cfg.drop_prob = parse_double(key, v);
    } else if (key == "drop-list") {
        cfg.drop_list.clear();
        for (const auto& item : split_list(v)) cfg.drop_list.push_back(parse_double(key, item));
    } else if (key == "queue-capacity") {
        cfg.queue_capacity = parse_number<std::size_t>(key, v);
    } else if (key == "message-size") {
        cfg.message_size = parse_number<std::size_t>(key, v);
    } else if (key == "message-count") {
        cfg.message_count = parse_number<std::size_t>(key, v);
    } else if (key == "bytes") {
        cfg.bytes = parse_number<std::size_t>(key, v);
    } else if (key == "rwnd") {
        cfg.rwnd = parse_number<std::uint32_t>(key, v);
    } else if (key == "streams") {
        cfg.streams = parse_number<unsigned>(key, v);
    } else if (key == "assocs") {
        cfg.assocs = parse_number<unsigned>(key, v);
    } else if (key == "seed") {
        cfg.seed = parse_number<std::uint64_t>(key, v);
    } else if (key == "seeds") {
        cfg.seeds = parse_number<unsigned>(key, v);
    } else if (key == "duration-ms") {
        cfg.duration_ms = parse_double(key, v);
    } else if (key == "pace-us") {
        cfg.pace_us = parse_double(key, v);
    } else if (key == "cpu-budget") {
        cfg.cpu_budget = parse_double(key, v);
    } else if (key == "modes") {
        cfg.modes.clear();
        for (const auto& item : split_list(v)) cfg.modes.push_back(parse_mode(item));
    } else if (key == "kill-ms") {
        cfg.kill_ms = parse_double(key, v);
    } else if (key == "revive-ms") {
        cfg.revive_ms = parse_double(key, v);
    } else if (key == "hb-interval-ms") {
        cfg.hb_interval_ms = parse_double(key, v);
    } else {
        throw ConfigError(key, "unknown setting");
    }
}

void apply_config_text(ScenarioConfig& cfg, std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    unsigned lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno), "expected key=value");
        }
        apply_setting(cfg, std::string_view(line).substr(0, eq), std::string_view(line).substr(eq + 1));
    }
}

void load_config_file(ScenarioConfig& cfg, const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("config", "cannot open '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    apply_config_text(cfg, ss.str());
}

void validate(const ScenarioConfig& cfg) {
    auto prob = [](const char* field, double p) {
        if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(field, "probability must be in [0, 1]");
    };
    prob("drop", cfg.drop_prob);
    for (double p : cfg.drop_list) prob("drop-list", p);
    if (!(cfg.bandwidth_bps > 0)) throw ConfigError("bandwidth", "must be positive");
    if (cfg.rtt_us < 0) throw ConfigError("rtt-us", "must be non-negative");
    if (cfg.queue_capacity == 0) throw ConfigError("queue-capacity", "must be at least 1");
    if (cfg.rwnd < 1500) throw ConfigError("rwnd", "must hold at least one MTU");
    if (cfg.rwnd > 262144) throw ConfigError("rwnd", "fixed windows above 256 KB are not supported");
    if (cfg.streams > 1024) throw ConfigError("streams", "at most 1024");
    if (cfg.assocs > 256) throw ConfigError("assocs", "at most 256");
    if (cfg.scenario == Scenario::failover && cfg.protocol == Protocol::tcp) {
        throw ConfigError("protocol", "failover needs multihoming, which only sctp provides");
    }
    if (cfg.seeds == 0) throw ConfigError("seeds", "must be at least 1");
    if (cfg.mbs == 0) throw ConfigError("mbs", "must be at least 1");
    if (!(cfg.duration_ms > 0)) throw ConfigError("duration-ms", "must be positive");
    if (cfg.pace_us < 0) throw ConfigError("pace-us", "must be non-negative");
    if (cfg.cpu_budget < 0) throw ConfigError("cpu-budget", "must be non-negative");
    if (cfg.hb_interval_ms < 0) throw ConfigError("hb-interval-ms", "must be non-negative");
    if (cfg.modes.empty()) throw ConfigError("modes", "at least one mode required");
    if (cfg.scenario == Scenario::failover && cfg.kill_ms >= 0 && cfg.revive_ms >= 0 && cfg.revive_ms <= cfg.kill_ms) {
        throw ConfigError("revive-ms", "revival must come after the kill");
    }
    if (cfg.sack_policy.mode == sctp::SackMode::every_k && cfg.sack_policy.k == 0) {
        throw ConfigError("sack-policy", "k must be at least 1");
    }
}

std::vector<double> sweep_points(const ScenarioConfig& cfg) {
    if (!cfg.drop_list.empty()) return cfg.drop_list;
    return {0.0, 0.005, 0.01, 0.025, 0.05, 0.1};
}

}  // namespace sctpdc::bench
