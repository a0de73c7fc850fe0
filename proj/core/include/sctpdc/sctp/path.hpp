#pragma once

#include <cstdint>
#include <map>

#include "sctpdc/sctp/congestion.hpp"

namespace sctpdc::sctp {

enum class PathStatus { active, inactive };

struct PathState {
    std::size_t id = 0;
    PathStatus status = PathStatus::active;
    bool is_primary = false;
    unsigned error_count = 0;
    unsigned error_threshold = 5;
    Duration hb_interval = sim::msec(500);
    Time last_activity{};
    Time last_probe{};
    CongestionState cc;
    // nonce -> time the probe was sent
    std::map<std::uint64_t, Time> outstanding_probes;

    std::uint64_t data_packets_sent = 0;
    std::uint64_t heartbeats_sent = 0;

    bool active() const { return status == PathStatus::active; }
};

}  // namespace sctpdc::sctp
