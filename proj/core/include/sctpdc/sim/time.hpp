#pragma once

#include <chrono>
#include <cstdint>

namespace sctpdc::sim {

// Simulated time is integer nanoseconds since the start of the run.
using Duration = std::chrono::nanoseconds;
using Time = std::chrono::nanoseconds;

using namespace std::chrono_literals;

constexpr Duration usec(std::int64_t n) { return std::chrono::microseconds(n); }
constexpr Duration msec(std::int64_t n) { return std::chrono::milliseconds(n); }
constexpr Duration sec(std::int64_t n) { return std::chrono::seconds(n); }

constexpr double to_seconds(Duration d) { return static_cast<double>(d.count()) * 1e-9; }
constexpr double to_micros(Duration d) { return static_cast<double>(d.count()) * 1e-3; }

}  // namespace sctpdc::sim
