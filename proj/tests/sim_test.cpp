#include <gtest/gtest.h>

#include <string>
#include <vector>

#include "sctpdc/sim/cost_ledger.hpp"
#include "sctpdc/sim/link.hpp"
#include "sctpdc/sim/simulator.hpp"

using namespace sctpdc::sim;

TEST(Simulator, FiresByTimeThenInsertionOrder) {
    Simulator s;
    std::string order;
    s.schedule(usec(10), [&] { order += 'A'; });
    s.schedule(usec(5), [&] { order += 'B'; });
    s.schedule(usec(5), [&] { order += 'C'; });
    auto h = s.schedule(usec(7), [&] { order += 'X'; });
    s.cancel(h);
    const auto st = s.run_to_completion();
    EXPECT_EQ(order, "BCA");
    EXPECT_EQ(st.events_fired, 3u);
    EXPECT_TRUE(st.quiescent);
    EXPECT_EQ(s.now(), usec(10));
}

TEST(Simulator, EmptyQueueIsImmediatelyQuiescent) {
    Simulator s;
    const auto st = s.run_to_completion();
    EXPECT_TRUE(st.quiescent);
    EXPECT_EQ(st.events_fired, 0u);
    EXPECT_EQ(s.now(), Time{0});
}

TEST(Simulator, RunUntilStopsAtHorizonAndEventLimitThrows) {
    Simulator s;
    int fired = 0;
    s.schedule(msec(1), [&] { ++fired; });
    s.schedule(msec(3), [&] { ++fired; });
    s.run_until(Time(msec(2)));
    EXPECT_EQ(fired, 1);
    EXPECT_EQ(s.now(), msec(2));

    Simulator loop;
    std::function<void()> again = [&] { loop.schedule(usec(1), again); };
    loop.schedule(usec(1), again);
    EXPECT_THROW(loop.run_to_completion(100), EventLimitExceeded);
}

TEST(Timer, RearmReplacesPendingShot) {
    Simulator s;
    Timer t(s);
    int hits = 0;
    t.arm(usec(10), [&] { ++hits; });
    t.arm(usec(20), [&] { hits += 10; });
    s.run_to_completion();
    EXPECT_EQ(hits, 10);
    EXPECT_FALSE(t.armed());
}

TEST(Link, FullFrameArrivesAfterSerializationPlusPropagation) {
    Simulator s;
    Link l(s, LinkParams{1e9, usec(51), 0.0, 16}, Rng(1));
    Time arrived{};
    l.set_sink([&](Frame) { arrived = s.now(); });
    const auto r = l.transmit(Frame{std::vector<std::uint8_t>(1480), 1500});
    s.run_to_completion();
    EXPECT_EQ(r.outcome, TransmitOutcome::scheduled);
    EXPECT_EQ(r.departure, usec(12));
    EXPECT_EQ(arrived, usec(63));
}

TEST(Link, FifoBackToBackAndTailDrop) {
    Simulator s;
    Link l(s, LinkParams{1e9, usec(51), 0.0, 3}, Rng(1));
    std::vector<int> got;
    l.set_sink([&](Frame f) { got.push_back(f.bytes[0]); });
    for (int i = 0; i < 5; ++i) l.transmit(Frame{{static_cast<std::uint8_t>(i)}, 1500});
    s.run_to_completion();
    EXPECT_EQ(got, (std::vector<int>{0, 1, 2}));
    EXPECT_EQ(l.stats().dropped_queue, 2u);
    EXPECT_EQ(l.stats().delivered, 3u);
}

TEST(Link, DropProbabilityExtremes) {
    for (double p : {0.0, 1.0}) {
        Simulator s;
        Link l(s, LinkParams{1e9, usec(51), p, 100000}, Rng(5));
        for (int i = 0; i < 2000; ++i) l.transmit(Frame{{1}, 100});
        s.run_to_completion();
        EXPECT_EQ(l.stats().dropped_random, p == 0.0 ? 0u : 2000u);
        EXPECT_EQ(l.stats().sent, 2000u);
    }
}

TEST(Link, SeedsDetermineDropPattern) {
    auto pattern = [](std::uint64_t seed) {
        Simulator s;
        Link l(s, LinkParams{1e9, usec(51), 0.01, 100000}, Rng(seed).split("link"));
        std::vector<bool> dropped;
        for (int i = 0; i < 5000; ++i) {
            dropped.push_back(l.transmit(Frame{{1}, 100}).outcome != TransmitOutcome::scheduled);
        }
        return dropped;
    };
    EXPECT_EQ(pattern(7), pattern(7));
    EXPECT_NE(pattern(7), pattern(8));
}

TEST(Rng, NamedSplitsAreIndependentOfDrawOrder) {
    Rng root(42);
    Rng a1 = root.split("a");
    root.next_u64();
    Rng a2 = root.split("a");
    EXPECT_EQ(a1.next_u64(), a2.next_u64());
    EXPECT_NE(root.split("a").next_u64(), root.split("b").next_u64());
}

TEST(CostLedger, ThreeCopiesOfTwelveKilobytes) {
    CostLedger l;
    for (int i = 0; i < 3; ++i) l.charge(CostKind::copy_bytes, 12288);
    EXPECT_EQ(l.counter(CostKind::copy_bytes), 36864u);
    EXPECT_DOUBLE_EQ(l.cpu_proxy(), 36864.0);
}

// Coarse lock sums per-stream work, fine lock takes the max, shared work
// counts under both.
TEST(CostLedger, LockModelProxy) {
    CostLedger one;
    one.charge_stream(1, 0, CostKind::chunks_processed, 10);
    one.charge_shared(1, CostKind::sacks_processed, 2);
    EXPECT_DOUBLE_EQ(one.elapsed_proxy(LockModel::coarse), one.elapsed_proxy(LockModel::fine));

    CostLedger two;
    two.charge_stream(1, 0, CostKind::chunks_processed, 10);
    two.charge_stream(1, 1, CostKind::chunks_processed, 4);
    two.charge_shared(1, CostKind::sacks_processed, 2);
    EXPECT_DOUBLE_EQ(two.elapsed_proxy(LockModel::coarse), 14 * 50.0 + 2 * 200.0);
    EXPECT_DOUBLE_EQ(two.elapsed_proxy(LockModel::fine), 10 * 50.0 + 2 * 200.0);
    EXPECT_DOUBLE_EQ(two.cpu_proxy(), two.recompute_cpu_proxy());
}
