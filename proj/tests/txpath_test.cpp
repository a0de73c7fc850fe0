#include <gtest/gtest.h>

#include "sctpdc/sctp/congestion.hpp"
#include "sctpdc/sctp/txpath.hpp"
#include "support.hpp"

using namespace sctpdc;
using namespace sctpdc::sctp;
using sim::usec;

namespace {

Tcb client(AssocConfig cfg = {}) { return testsupport::established_tcbs(cfg).first; }

wire::Bytes bytes(std::size_t n) { return wire::Bytes(n, 0x42); }

// TSN of the i-th chunk ever queued, counting from 1.
wire::Tsn nth(const Tcb& t, std::uint32_t i) { return t.initial_tsn + (i - 1); }

std::size_t count_state(const Tcb& t, ChunkState s) {
    std::size_t n = 0;
    for (const auto& e : t.tx.queue) n += e.state == s;
    return n;
}

}  // namespace

TEST(Submit, TwelveKilobytesMakesNineFragments) {
    Tcb t = client();
    const auto r = submit(t, 0, bytes(12288), true, {});
    ASSERT_TRUE(r);
    ASSERT_EQ(r.chunks, 9u);
    for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(t.tx.queue[i].payload_bytes(), 1452u);
    EXPECT_EQ(t.tx.queue[8].payload_bytes(), 672u);
    EXPECT_TRUE(t.tx.queue.front().chunk.flags.begin_fragment);
    EXPECT_FALSE(t.tx.queue.front().chunk.flags.end_fragment);
    EXPECT_TRUE(t.tx.queue.back().chunk.flags.end_fragment);
    for (std::uint32_t i = 1; i <= 9; ++i) EXPECT_EQ(t.tx.queue[i - 1].chunk.tsn, nth(t, i));
    EXPECT_EQ(t.next_tsn, nth(t, 10));
}

TEST(Submit, SmallMessageIsOneCompleteChunk) {
    Tcb t = client();
    ASSERT_EQ(submit(t, 0, bytes(100), true, {}).chunks, 1u);
    EXPECT_TRUE(t.tx.queue.front().chunk.flags.complete());
}

TEST(Submit, CopyLedgerThreeVersusTwoCopies) {
    AssocConfig legacy;
    legacy.copy_mode = CopyMode::legacy;
    Tcb a = client(legacy);
    Tcb b = client();
    submit(a, 0, bytes(12288), true, {});
    submit(b, 0, bytes(12288), true, {});
    EXPECT_EQ(a.tx.copies.copy_bytes, 36864u);
    EXPECT_EQ(b.tx.copies.copy_bytes, 24576u);
}

TEST(Submit, RejectsBadRequests) {
    Tcb t = client();
    EXPECT_EQ(submit(t, 1, bytes(10), true, {}).status, SubmitStatus::stream_out_of_range);
    EXPECT_EQ(submit(t, 0, {}, true, {}).status, SubmitStatus::empty_message);
    ASSERT_TRUE(submit(t, 0, bytes(200000), true, {}));
    EXPECT_EQ(submit(t, 0, bytes(100000), true, {}).status, SubmitStatus::send_buffer_full);
    t.state = AssocState::shutdown_pending;
    EXPECT_EQ(submit(t, 0, bytes(10), true, {}).status, SubmitStatus::not_established);
}

TEST(Bundle, SmallChunksShareOnePacket) {
    AssocConfig cfg;
    cfg.no_delay = true;
    Tcb t = client(cfg);
    for (int i = 0; i < 3; ++i) submit(t, 0, bytes(400), true, {});
    const auto out = bundle_and_send(t, {});
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].data_chunks, 3u);
}

TEST(Bundle, NagleHoldsSubFragmentTailWhileDataOutstanding) {
    Tcb t = client();
    submit(t, 0, bytes(400), true, {});
    EXPECT_EQ(bundle_and_send(t, {}).size(), 1u);  // nothing outstanding yet
    submit(t, 0, bytes(400), true, {});
    EXPECT_TRUE(bundle_and_send(t, {}).empty());
    submit(t, 0, bytes(1200), true, {});  // 1600 queued, a full fragment's worth
    EXPECT_EQ(bundle_and_send(t, {}).size(), 1u);
}

TEST(Bundle, CwndOfTwoMtuReleasesTwoPackets) {
    Tcb t = client();
    ASSERT_EQ(t.paths[0].cc.cwnd, 3000u);
    for (int i = 0; i < 9; ++i) submit(t, 0, bytes(1452), true, {});
    const auto out = bundle_and_send(t, {});
    EXPECT_EQ(out.size(), 2u);
    EXPECT_EQ(t.paths[0].cc.flight_size, 2904u);
}

TEST(Bundle, MaxBurstCapsPacketsPerCall) {
    Tcb t = client();
    t.paths[0].cc.cwnd = 65536;
    for (int i = 0; i < 40; ++i) submit(t, 0, bytes(1452), true, {});
    EXPECT_EQ(bundle_and_send(t, {}).size(), 4u);
    EXPECT_EQ(bundle_and_send(t, {}).size(), 4u);
}

class SackMarking : public ::testing::TestWithParam<AckMode> {
protected:
    void SetUp() override {
        AssocConfig cfg;
        cfg.ack_mode = GetParam();
        cfg.no_delay = true;
        t = client(cfg);
        t.paths[0].cc.cwnd = 40000;
        t.config.mbs = 100;
        for (int i = 0; i < 10; ++i) submit(t, 0, bytes(1000), true, {});
        ASSERT_EQ(bundle_and_send(t, {}).size(), 10u);
    }
    wire::SackChunk sack(std::uint32_t cum, std::vector<wire::GapBlock> gaps = {}) {
        return {nth(t, cum), 131072, std::move(gaps), {}};
    }
    Tcb t;
};

TEST_P(SackMarking, CumulativeAckDrainsFlight) {
    const auto fx = on_sack(t, sack(10), Time(usec(100)));
    EXPECT_EQ(fx.newly_acked_bytes, 10000u);
    EXPECT_EQ(t.paths[0].cc.flight_size, 0u);
    EXPECT_TRUE(t.tx.queue.empty());
}

TEST_P(SackMarking, GapBlocksAckOnlyInSackMode) {
    on_sack(t, sack(5, {{2, 3}}), Time(usec(100)));
    ASSERT_EQ(t.tx.queue.front().chunk.tsn, nth(t, 6));
    if (GetParam() == AckMode::sack) {
        EXPECT_EQ(t.tx.find(nth(t, 6))->missing_reports, 1u);
        EXPECT_EQ(t.tx.find(nth(t, 7))->state, ChunkState::acked);
        EXPECT_EQ(t.tx.find(nth(t, 8))->state, ChunkState::acked);
    } else {
        for (std::uint32_t i = 6; i <= 8; ++i) EXPECT_EQ(t.tx.find(nth(t, i))->state, ChunkState::in_flight);
    }
}

TEST_P(SackMarking, StaleSackIgnored) {
    on_sack(t, sack(5), Time(usec(100)));
    const auto fx = on_sack(t, sack(3), Time(usec(120)));
    EXPECT_TRUE(fx.stale);
    EXPECT_EQ(t.tx.counters.stale_sacks, 1u);
    EXPECT_EQ(t.peer_cum_tsn, nth(t, 5));
}

INSTANTIATE_TEST_SUITE_P(Modes, SackMarking, ::testing::Values(AckMode::sack, AckMode::gbn),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(FastRetransmit, FourthMissingReportRetransmitsOnceAndHalvesOnce) {
    Tcb t = client();
    t.paths[0].cc.cwnd = 40000;
    t.paths[0].cc.ssthresh = 20000;  // congestion avoidance, so acks do not grow cwnd quickly
    t.config.mbs = 100;
    for (int i = 0; i < 12; ++i) submit(t, 0, bytes(1000), true, {});
    bundle_and_send(t, {});

    std::size_t retransmits = 0;
    for (std::uint16_t k = 2; k <= 7; ++k) {
        on_sack(t, {nth(t, 5), 131072, {{2, k}}, {}}, Time(usec(100 + k)));
        for (const auto& op : bundle_and_send(t, Time(usec(100 + k)))) retransmits += op.retransmitted_chunks;
        if (k == 4) EXPECT_EQ(t.paths[0].cc.cwnd, 40000u) << "three reports are not enough";
    }
    EXPECT_EQ(retransmits, 1u);
    EXPECT_EQ(t.tx.counters.fast_retransmits, 1u);
    EXPECT_EQ(t.paths[0].cc.cwnd, 20000u);
    EXPECT_EQ(t.tx.find(nth(t, 6))->transmit_count, 2u);
}

TEST(GoBackN, NonAdvancingSackResendsEverythingOutstanding) {
    AssocConfig cfg;
    cfg.ack_mode = AckMode::gbn;
    cfg.no_delay = true;
    Tcb t = client(cfg);
    t.paths[0].cc.cwnd = 40000;
    t.config.mbs = 100;
    for (int i = 0; i < 8; ++i) submit(t, 0, bytes(1000), true, {});
    bundle_and_send(t, {});
    on_sack(t, {nth(t, 3), 131072, {}, {}}, Time(usec(100)));
    const auto fx = on_sack(t, {nth(t, 3), 131072, {}, {}}, Time(usec(110)));
    EXPECT_TRUE(fx.go_back);
    EXPECT_EQ(count_state(t, ChunkState::to_retransmit), 5u);
}

TEST(Timeout, GoBackNMarksAllOutstanding) {
    AssocConfig cfg;
    cfg.ack_mode = AckMode::gbn;
    cfg.no_delay = true;
    Tcb t = client(cfg);
    t.paths[0].cc.cwnd = 40000;
    t.config.mbs = 100;
    for (int i = 0; i < 9; ++i) submit(t, 0, bytes(1000), true, {});
    bundle_and_send(t, {});
    on_sack(t, {nth(t, 3), 131072, {}, {}}, Time(usec(100)));
    on_rto(t, 0, Time(sim::msec(5)));
    EXPECT_EQ(count_state(t, ChunkState::to_retransmit), 6u);  // entries 4..9
}

TEST(Timeout, SackModeResendsEarliestFirst) {
    Tcb t = client();
    t.paths[0].cc.cwnd = 40000;
    t.config.mbs = 100;
    for (int i = 0; i < 9; ++i) submit(t, 0, bytes(1452), true, {});
    bundle_and_send(t, {});
    on_sack(t, {nth(t, 3), 131072, {}, {}}, Time(usec(100)));
    on_rto(t, 0, Time(sim::msec(5)));
    EXPECT_EQ(t.paths[0].cc.cwnd, 1500u);
    const auto out = bundle_and_send(t, Time(sim::msec(5)));
    ASSERT_EQ(out.size(), 1u);
    ASSERT_EQ(out[0].packet.chunks.size(), 1u);
    EXPECT_EQ(std::get<wire::DataChunk>(out[0].packet.chunks[0]).tsn, nth(t, 4));
}

TEST(Timeout, BackoffDoublesAndCaps) {
    AssocConfig cfg;
    cfg.assoc_max_retrans = 100;
    Tcb t = client(cfg);
    t.paths[0].cc.rto = sim::msec(200);
    for (int i = 0; i < 3; ++i) on_rto(t, 0, {});
    EXPECT_EQ(t.paths[0].cc.rto, sim::msec(1600));
    for (int i = 0; i < 20; ++i) on_rto(t, 0, {});
    EXPECT_EQ(t.paths[0].cc.rto, sim::sec(60));
}

TEST(RttEstimator, FirstSampleClampsToMinimum) {
    const RtoBounds b{sim::msec(1), sim::sec(60)};
    const auto cs = rtt_update(CongestionState{}, usec(102), b);
    EXPECT_EQ(cs.srtt, usec(102));
    EXPECT_EQ(cs.rttvar, usec(51));
    EXPECT_EQ(cs.rto, sim::msec(1));
}

TEST(RttEstimator, SecondSampleByHand) {
    const RtoBounds b{sim::Duration(0), sim::sec(60)};
    auto cs = rtt_update(CongestionState{}, usec(100), b);
    cs = rtt_update(cs, usec(200), b);
    // srtt = 7/8 * 100 + 1/8 * 200; rttvar = 3/4 * 50 + 1/4 * 100
    EXPECT_EQ(cs.srtt, sim::Duration(112500));
    EXPECT_EQ(cs.rttvar, sim::Duration(62500));
    EXPECT_EQ(cs.rto, sim::Duration(112500 + 4 * 62500));
}

TEST(RttEstimator, ConstantSamplesConverge) {
    const RtoBounds b{sim::Duration(0), sim::sec(60)};
    CongestionState cs;
    cs = rtt_update(cs, usec(500), b);
    for (int i = 0; i < 100; ++i) cs = rtt_update(cs, usec(300), b);
    EXPECT_NEAR(static_cast<double>(cs.srtt.count()), 300000.0, 10.0);
}
