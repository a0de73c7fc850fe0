#include "sctpdc/sim/link.hpp"

#include <cmath>

namespace sctpdc::sim {

Link::Link(Simulator& sim, LinkParams params, Rng rng, std::string name)
    : sim_(&sim), params_(params), rng_(std::move(rng)), name_(std::move(name)) {}

Duration Link::serialization_time(std::size_t wire_bytes) const {
    const double ns = 8.0 * static_cast<double>(wire_bytes) * 1e9 / params_.bandwidth_bps;
    return Duration(static_cast<std::int64_t>(std::llround(ns)));
}

std::size_t Link::queue_depth() {
    const Time now = sim_->now();
    while (!serialization_ends_.empty() && serialization_ends_.front() <= now) {
        serialization_ends_.pop_front();
    }
    return serialization_ends_.size();
}

TransmitResult Link::transmit(Frame frame) {
    const Time now = sim_->now();
    TransmitResult result;
    ++stats_.sent;
    stats_.bytes_sent += frame.wire_bytes;

    if (queue_depth() >= params_.queue_capacity) {
        ++stats_.dropped_queue;
        result.outcome = TransmitOutcome::dropped_queue;
        result.departure = now;
        if (observer_) observer_(frame, result);
        return result;
    }

    const Time start = busy_until_ > now ? busy_until_ : now;
    busy_until_ = start + serialization_time(frame.wire_bytes);
    serialization_ends_.push_back(busy_until_);
    result.departure = busy_until_;
    result.arrival = busy_until_ + params_.prop_delay;

    if (filter_ && filter_(frame)) {
        ++stats_.dropped_filter;
        result.outcome = TransmitOutcome::dropped_filter;
    } else if (rng_.bernoulli(params_.drop_prob)) {
        ++stats_.dropped_random;
        result.outcome = TransmitOutcome::dropped_random;
    }
    if (observer_) observer_(frame, result);
    if (result.outcome != TransmitOutcome::scheduled) {
        return result;
    }

    ++stats_.in_transit;
    sim_->schedule_at(result.arrival, [this, f = std::move(frame)]() mutable {
        --stats_.in_transit;
        ++stats_.delivered;
        stats_.bytes_delivered += f.wire_bytes;
        if (sink_) sink_(std::move(f));
    });
    return result;
}

}  // namespace sctpdc::sim
