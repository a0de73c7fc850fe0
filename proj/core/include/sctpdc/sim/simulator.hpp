#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <utility>

#include "sctpdc/sim/time.hpp"

namespace sctpdc::sim {

struct EventHandle {
    Time due{};
    std::uint64_t seq = 0;

    bool valid() const { return seq != 0; }
    friend auto operator<=>(const EventHandle&, const EventHandle&) = default;
};

struct RunStats {
    std::uint64_t events_fired = 0;
    std::uint64_t events_cancelled = 0;
    Time end_time{};
    bool quiescent = false;
};

class EventLimitExceeded : public std::runtime_error {
public:
    explicit EventLimitExceeded(std::uint64_t limit)
        : std::runtime_error("event limit of " + std::to_string(limit) + " exceeded") {}
};

// Discrete-event scheduler. Events fire in (due time, insertion sequence)
// order, so two runs that schedule the same things fire them identically.
// Single-threaded by contract.
class Simulator {
public:
    using Action = std::function<void()>;

    Time now() const { return now_; }

    EventHandle schedule(Duration delay, Action action);
    EventHandle schedule_at(Time when, Action action);
    // No-op for handles that already fired or were cancelled.
    void cancel(EventHandle h);
    bool pending(EventHandle h) const { return queue_.contains(h); }

    // Fires every event due at or before `until`, then advances the clock to it.
    RunStats run_until(Time until, std::uint64_t max_events = kDefaultEventLimit);
    // Runs until the queue empties or stop() is called.
    RunStats run_to_completion(std::uint64_t max_events = kDefaultEventLimit);
    void stop() { stop_requested_ = true; }

    std::size_t queued() const { return queue_.size(); }
    std::uint64_t total_fired() const { return total_fired_; }

    static constexpr std::uint64_t kDefaultEventLimit = 200'000'000;

private:
    RunStats run(Time until, bool bounded, std::uint64_t max_events);

    Time now_{0};
    std::uint64_t next_seq_ = 1;
    std::uint64_t total_fired_ = 0;
    std::uint64_t cancelled_ = 0;
    bool stop_requested_ = false;
    std::map<EventHandle, Action> queue_;
};

// Re-armable one-shot timer bound to a simulator; cancels itself on destruction.
class Timer {
public:
    explicit Timer(Simulator& sim) : sim_(&sim) {}
    Timer(const Timer&) = delete;
    Timer& operator=(const Timer&) = delete;
    ~Timer() { cancel(); }

    void arm(Duration delay, Simulator::Action action) {
        cancel();
        handle_ = sim_->schedule(delay, [this, a = std::move(action)] {
            handle_ = {};
            a();
        });
    }
    void cancel() {
        if (handle_.valid()) {
            sim_->cancel(handle_);
            handle_ = {};
        }
    }
    bool armed() const { return handle_.valid(); }
    Time due() const { return handle_.due; }

private:
    Simulator* sim_;
    EventHandle handle_{};
};

}  // namespace sctpdc::sim
