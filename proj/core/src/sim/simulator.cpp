#include "sctpdc/sim/simulator.hpp"

namespace sctpdc::sim {

EventHandle Simulator::schedule(Duration delay, Action action) {
    if (delay < Duration::zero()) {
        throw std::invalid_argument("negative event delay");
    }
    return schedule_at(now_ + delay, std::move(action));
}

EventHandle Simulator::schedule_at(Time when, Action action) {
    if (when < now_) {
        throw std::invalid_argument("event scheduled in the past");
    }
    EventHandle h{when, next_seq_++};
    queue_.emplace(h, std::move(action));
    return h;
}

void Simulator::cancel(EventHandle h) {
    if (queue_.erase(h) > 0) {
        ++cancelled_;
    }
}

RunStats Simulator::run(Time until, bool bounded, std::uint64_t max_events) {
    RunStats stats;
    const std::uint64_t cancelled_before = cancelled_;
    stop_requested_ = false;
    while (!queue_.empty() && !stop_requested_) {
        auto it = queue_.begin();
        if (bounded && it->first.due > until) {
            break;
        }
        if (stats.events_fired >= max_events) {
            throw EventLimitExceeded(max_events);
        }
        now_ = it->first.due;
        Action action = std::move(it->second);
        queue_.erase(it);
        ++stats.events_fired;
        ++total_fired_;
        action();
    }
    if (bounded && !stop_requested_ && until > now_) {
        now_ = until;
    }
    stats.events_cancelled = cancelled_ - cancelled_before;
    stats.end_time = now_;
    stats.quiescent = queue_.empty();
    return stats;
}

RunStats Simulator::run_until(Time until, std::uint64_t max_events) { return run(until, true, max_events); }

RunStats Simulator::run_to_completion(std::uint64_t max_events) { return run(Time::max(), false, max_events); }

}  // namespace sctpdc::sim
