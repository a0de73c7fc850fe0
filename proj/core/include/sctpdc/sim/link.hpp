#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <string>
#include <vector>

#include "sctpdc/sim/rng.hpp"
#include "sctpdc/sim/simulator.hpp"

namespace sctpdc::sim {

// A frame on a link. `bytes` is the transport payload handed between
// endpoints; `wire_bytes` is what the link serializes (payload plus the
// accounted network-header budget).
struct Frame {
    std::vector<std::uint8_t> bytes;
    std::size_t wire_bytes = 0;
};

struct LinkParams {
    double bandwidth_bps = 1e9;
    Duration prop_delay = usec(51);
    double drop_prob = 0.0;
    std::size_t queue_capacity = 1024;  // frames, including the one on the wire
};

enum class TransmitOutcome { scheduled, dropped_random, dropped_queue, dropped_filter };

struct TransmitResult {
    TransmitOutcome outcome = TransmitOutcome::scheduled;
    Time departure{};  // end of serialization
    Time arrival{};    // meaningful for scheduled frames
};

struct LinkStats {
    std::uint64_t sent = 0;
    std::uint64_t delivered = 0;
    std::uint64_t dropped_random = 0;
    std::uint64_t dropped_queue = 0;
    std::uint64_t dropped_filter = 0;
    std::uint64_t in_transit = 0;
    std::uint64_t bytes_sent = 0;
    std::uint64_t bytes_delivered = 0;

    std::uint64_t dropped() const { return dropped_random + dropped_queue + dropped_filter; }
};

// Unidirectional FIFO link with a finite transmit queue, serialization at a
// fixed rate, constant propagation delay and i.i.d. Bernoulli loss.
class Link {
public:
    using Sink = std::function<void(Frame)>;
    using DropFilter = std::function<bool(const Frame&)>;
    using Observer = std::function<void(const Frame&, const TransmitResult&)>;

    Link(Simulator& sim, LinkParams params, Rng rng, std::string name = {});
    Link(const Link&) = delete;
    Link& operator=(const Link&) = delete;

    void set_sink(Sink sink) { sink_ = std::move(sink); }
    // Frames for which the filter returns true are lost (after serialization).
    void set_drop_filter(DropFilter f) { filter_ = std::move(f); }
    void set_observer(Observer o) { observer_ = std::move(o); }
    void set_drop_prob(double p) { params_.drop_prob = p; }

    TransmitResult transmit(Frame frame);

    Duration serialization_time(std::size_t wire_bytes) const;
    // Time at which everything currently queued has been serialized.
    Time idle_at() const { return busy_until_ > sim_->now() ? busy_until_ : sim_->now(); }
    std::size_t queue_depth();

    const LinkParams& params() const { return params_; }
    const LinkStats& stats() const { return stats_; }
    const std::string& name() const { return name_; }

private:
    Simulator* sim_;
    LinkParams params_;
    Rng rng_;
    std::string name_;
    Sink sink_;
    DropFilter filter_;
    Observer observer_;
    Time busy_until_{0};
    std::deque<Time> serialization_ends_;
    LinkStats stats_;
};

}  // namespace sctpdc::sim
