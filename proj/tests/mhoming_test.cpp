#include <gtest/gtest.h>

#include "sctpdc/sctp/mhoming.hpp"
#include "support.hpp"

using namespace sctpdc;
using namespace sctpdc::sctp;

namespace {

Tcb dual_homed() { return testsupport::established_tcbs(AssocConfig{}, 2).first; }

wire::HeartbeatAckChunk ack_for(const Tcb& t, std::size_t path) {
    const auto& probes = t.paths[path].outstanding_probes;
    return {probes.begin()->first, static_cast<std::uint32_t>(path)};
}

}  // namespace

TEST(SelectPath, PrefersActivePrimary) {
    Tcb t = dual_homed();
    EXPECT_EQ(select_path(t), 0u);
    t.paths[0].status = PathStatus::inactive;
    EXPECT_EQ(select_path(t), 1u);
    t.paths[1].status = PathStatus::inactive;
    EXPECT_EQ(select_path(t), 0u);  // last resort keeps probing the primary
}

TEST(PathErrors, ThresholdDeactivatesAndHeartbeatResets) {
    Tcb t = dual_homed();
    for (int i = 0; i < 4; ++i) EXPECT_FALSE(on_path_error(t, 0).became_inactive);
    heartbeat_tick(t, Time(sim::sec(1)));
    EXPECT_EQ(on_heartbeat_ack(t, ack_for(t, 0), Time(sim::sec(1))), HeartbeatAckResult::refreshed);
    EXPECT_EQ(t.paths[0].error_count, 0u);
    EXPECT_TRUE(t.paths[0].active());

    for (int i = 0; i < 4; ++i) on_path_error(t, 0);
    EXPECT_TRUE(on_path_error(t, 0).became_inactive);
    EXPECT_FALSE(t.paths[0].active());
}

TEST(Heartbeat, OnlyIdlePathsAreProbed) {
    Tcb t = dual_homed();
    EXPECT_EQ(heartbeat_tick(t, Time(sim::sec(1))).size(), 2u);

    Tcb u = dual_homed();
    u.paths[0].last_activity = Time(sim::msec(900));
    const auto probes = heartbeat_tick(u, Time(sim::sec(1)));
    ASSERT_EQ(probes.size(), 1u);
    EXPECT_EQ(probes[0].path, 1u);
}

TEST(Heartbeat, AckRestoresPrimaryAndIgnoresStaleNonces) {
    Tcb t = dual_homed();
    t.paths[0].status = PathStatus::inactive;
    t.paths[0].cc.cwnd = 60000;
    heartbeat_tick(t, Time(sim::sec(1)));
    const auto ack = ack_for(t, 0);
    EXPECT_EQ(on_heartbeat_ack(t, ack, Time(sim::sec(1))), HeartbeatAckResult::reactivated);
    EXPECT_EQ(select_path(t), 0u);
    EXPECT_EQ(t.paths[0].cc.cwnd, 3000u);

    EXPECT_EQ(on_heartbeat_ack(t, ack, Time(sim::sec(1))), HeartbeatAckResult::unknown_nonce);
    EXPECT_TRUE(t.paths[0].active());
    EXPECT_EQ(on_heartbeat_ack(t, {12345, 1}, Time(sim::sec(1))), HeartbeatAckResult::unknown_nonce);
    EXPECT_EQ(t.counters.unknown_nonce_acks, 2u);
}

TEST(Heartbeat, UnansweredProbeCountsAsPathError) {
    Tcb t = dual_homed();
    heartbeat_tick(t, Time(sim::sec(1)));
    const auto rto = t.paths[1].cc.rto;
    heartbeat_tick(t, Time(sim::sec(1)) + rto);
    EXPECT_EQ(t.paths[1].error_count, 1u);
    EXPECT_EQ(t.paths[1].cc.rto, 2 * rto);
}

// Two hosts with two paths each; path 0 dies mid-transfer.
TEST(Failover, TransferCompletesOverAlternate) {
    sim::Simulator s;
    sim::Rng rng(4);
    sim::LinkParams lp;
    sim::Link a0(s, lp, rng.split("a0")), a1(s, lp, rng.split("a1"));
    sim::Link b0(s, lp, rng.split("b0")), b1(s, lp, rng.split("b1"));
    Host a(s, "a", rng.split("a")), b(s, "b", rng.split("b"));
    a.add_path(a0);
    a.add_path(a1);
    b.add_path(b0);
    b.add_path(b1);
    a0.set_sink([&](sim::Frame f) { b.receive(0, std::move(f)); });
    a1.set_sink([&](sim::Frame f) { b.receive(1, std::move(f)); });
    b0.set_sink([&](sim::Frame f) { a.receive(0, std::move(f)); });
    b1.set_sink([&](sim::Frame f) { a.receive(1, std::move(f)); });

    AssocConfig cfg;
    cfg.hb_interval = sim::msec(50);
    std::size_t got = 0;
    AssocEvents server;
    server.on_message = [&](Association&, const InboundMessage& m) { got += m.payload.size(); };
    b.listen(5000, cfg, server);
    auto& assoc = a.connect(4000, 5000, cfg, {});

    for (int ms = 1; ms <= 100; ++ms) {
        s.schedule_at(Time(sim::msec(ms)), [&] { assoc.send(0, wire::Bytes(4000, 7)); });
    }
    s.schedule_at(Time(sim::msec(30)), [&] {
        a0.set_drop_prob(1.0);
        b0.set_drop_prob(1.0);
    });
    s.run_until(Time(sim::sec(5)));

    EXPECT_EQ(got, 100u * 4000u);
    EXPECT_FALSE(assoc.tcb().paths[0].active());
    EXPECT_GT(assoc.tcb().paths[1].data_packets_sent, 0u);
}
