#include <gtest/gtest.h>

#include "sctpdc/sctp/rxpath.hpp"
#include "support.hpp"

using namespace sctpdc;
using namespace sctpdc::sctp;

namespace {

struct Receiver {
    explicit Receiver(AssocConfig cfg = {}) {
        cfg.streams_out = cfg.streams_in = 2;
        tcb = testsupport::established_tcbs(cfg).second;
        base = tcb.rx.map.cum_tsn;
    }

    // Single-chunk message number `i` (TSN base + i) on `stream` with per-stream ssn.
    RxResult deliver(std::uint32_t i, wire::StreamId stream = 0, std::uint16_t ssn = 0xFFFF,
                     std::size_t size = 100) {
        wire::DataChunk d;
        d.tsn = base + i;
        d.stream = stream;
        d.ssn = wire::Ssn(ssn == 0xFFFF ? static_cast<std::uint16_t>(i - 1) : ssn);
        d.flags = {false, true, true};
        d.payload = wire::Bytes(size, static_cast<std::uint8_t>(i));
        wire::Packet p = make_packet(tcb, d);
        return on_data(tcb, p, {});
    }

    static const wire::SackChunk& sack_of(const RxResult& r, std::size_t i = 0) {
        return std::get<wire::SackChunk>(r.sacks.at(i).chunks.at(0));
    }

    Tcb tcb;
    wire::Tsn base;
};

std::vector<std::uint8_t> first_bytes(const std::vector<InboundMessage>& v) {
    std::vector<std::uint8_t> out;
    for (const auto& m : v) out.push_back(m.payload.at(0));
    return out;
}

}  // namespace

TEST(OnData, InOrderDeliversEach) {
    Receiver r;
    std::vector<InboundMessage> all;
    for (std::uint32_t i = 1; i <= 3; ++i) {
        auto res = r.deliver(i);
        all.insert(all.end(), res.delivered.begin(), res.delivered.end());
    }
    EXPECT_EQ(first_bytes(all), (std::vector<std::uint8_t>{1, 2, 3}));
}

TEST(OnData, ReorderedArrivalReportsGapThenDeliversInOrder) {
    Receiver r;
    std::vector<InboundMessage> all;
    auto a = r.deliver(1);
    auto b = r.deliver(3);
    EXPECT_TRUE(b.delivered.empty());
    const auto& s = Receiver::sack_of(b);
    EXPECT_EQ(s.cum_tsn, r.base + 1);
    EXPECT_EQ(s.gaps, (std::vector<wire::GapBlock>{{2, 2}}));
    auto c = r.deliver(2);
    for (auto* res : {&a, &b, &c}) all.insert(all.end(), res->delivered.begin(), res->delivered.end());
    EXPECT_EQ(first_bytes(all), (std::vector<std::uint8_t>{1, 2, 3}));
}

TEST(OnData, GoBackNReceiverDiscardsOutOfOrder) {
    AssocConfig cfg;
    cfg.ack_mode = AckMode::gbn;
    Receiver r(cfg);
    r.deliver(1);
    auto res = r.deliver(3);
    EXPECT_EQ(res.discarded, 1u);
    EXPECT_EQ(r.tcb.rx.counters.gbn_discards, 1u);
    const auto& s = Receiver::sack_of(res);
    EXPECT_EQ(s.cum_tsn, r.base + 1);
    EXPECT_TRUE(s.gaps.empty());
    EXPECT_TRUE(r.tcb.rx.fragments.empty());
}

TEST(OnData, DuplicatesReportedOnceAndDrained) {
    Receiver r;
    r.deliver(1);
    auto res = r.deliver(1);
    EXPECT_EQ(res.duplicates, 1u);
    EXPECT_EQ(Receiver::sack_of(res).dups, (std::vector<wire::Tsn>{r.base + 1}));
    EXPECT_TRUE(r.tcb.rx.map.dups.empty());
}

TEST(OnData, StreamsAreIndependent) {
    Receiver r;
    auto a = r.deliver(2, 0, 1);  // stream 0 is missing ssn 0
    EXPECT_TRUE(a.delivered.empty());
    auto b = r.deliver(3, 1, 0);
    ASSERT_EQ(b.delivered.size(), 1u);
    EXPECT_EQ(b.delivered[0].stream, 1);
}

TEST(OnData, ExhaustedWindowDropsWithoutAck) {
    AssocConfig cfg;
    cfg.rwnd = 1500;
    Receiver r(cfg);
    r.deliver(2, 0, 1, 1400);  // buffered, waiting for ssn 0
    auto res = r.deliver(3, 0, 2, 200);
    EXPECT_EQ(res.discarded, 1u);
    EXPECT_EQ(r.tcb.rx.counters.rwnd_drops, 1u);
    EXPECT_FALSE(r.tcb.rx.map.seen(r.base + 3));
}

TEST(SackFrequency, FourteenInOrderPackets) {
    struct Case {
        SackPolicy policy;
        std::size_t sacks;
    };
    for (const auto& c : {Case{SackPolicy::per_packet(), 14}, Case{SackPolicy::per_k(7), 2},
                          Case{SackPolicy::lk_double(), 28}}) {
        AssocConfig cfg;
        cfg.sack = c.policy;
        Receiver r(cfg);
        std::size_t n = 0;
        for (std::uint32_t i = 1; i <= 14; ++i) n += r.deliver(i).sacks.size();
        EXPECT_EQ(n, c.sacks) << to_string(c.policy);
    }
}

TEST(SackFrequency, GapSackDoesNotResetPeriodicCount) {
    AssocConfig cfg;
    cfg.sack = SackPolicy::per_k(7);
    Receiver r(cfg);
    std::vector<std::size_t> per_packet;
    for (std::uint32_t i : {1, 2, 4, 3, 5, 6, 7}) per_packet.push_back(r.deliver(i).sacks.size());
    EXPECT_EQ(per_packet, (std::vector<std::size_t>{0, 0, 1, 0, 0, 0, 1}));
}

TEST(SackFrequency, FlushTimerAcksStragglers) {
    SackPolicy p = SackPolicy::per_k(7);
    SackCounters c;
    const auto d = sack_decision(p, c, false);
    EXPECT_EQ(d.emit, 0u);
    EXPECT_TRUE(d.arm_timer);
    EXPECT_EQ(d.timer_delay, p.flush_timeout);
    EXPECT_EQ(sack_timer_expired(p, c), 1u);
    EXPECT_EQ(sack_timer_expired(p, c), 0u);
}

TEST(BuildSack, GapOffsetsRelativeToCumulative) {
    TsnMap m;
    m.cum_tsn = wire::Tsn(5);
    m.out_of_order = {wire::Tsn(7), wire::Tsn(8), wire::Tsn(10)};
    const auto s = build_sack(m, 1000);
    EXPECT_EQ(s.gaps, (std::vector<wire::GapBlock>{{2, 3}, {5, 5}}));
    EXPECT_EQ(s.a_rwnd, 1000u);

    TsnMap empty;
    empty.cum_tsn = wire::Tsn(5);
    EXPECT_TRUE(build_sack(empty, 0).gaps.empty());
}

TEST(BuildSack, DupsDrainedOnEmission) {
    TsnMap m;
    m.cum_tsn = wire::Tsn(5);
    m.mark(wire::Tsn(4));
    m.mark(wire::Tsn(4));
    EXPECT_EQ(build_sack(m, 0).dups, (std::vector<wire::Tsn>{wire::Tsn(4), wire::Tsn(4)}));
    EXPECT_TRUE(build_sack(m, 0).dups.empty());
}

TEST(DeliverOrdered, HoldsUntilGapFills) {
    StreamInbox box;
    InboundMessage m1;
    m1.ssn = wire::Ssn(1);
    InboundMessage m0;
    m0.ssn = wire::Ssn(0);
    EXPECT_TRUE(deliver_ordered(box, m1).empty());
    const auto out = deliver_ordered(box, m0);
    ASSERT_EQ(out.size(), 2u);
    EXPECT_EQ(out[0].ssn, wire::Ssn(0));
    EXPECT_EQ(out[1].ssn, wire::Ssn(1));
}

TEST(DeliverOrdered, UnorderedBypassesOpenGap) {
    Receiver r;
    r.deliver(2, 0, 1);
    wire::DataChunk d;
    d.tsn = r.base + 3;
    d.flags = {true, true, true};
    d.payload = {9};
    const auto res = on_data(r.tcb, make_packet(r.tcb, d), {});
    ASSERT_EQ(res.delivered.size(), 1u);
    EXPECT_TRUE(res.delivered[0].unordered);
}
