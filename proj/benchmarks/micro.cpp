#include <benchmark/benchmark.h>

#include "sctpdc/bench/scenario.hpp"
#include "sctpdc/wire/codec.hpp"
#include "sctpdc/wire/crc32c.hpp"

using namespace sctpdc;

namespace {

wire::Packet full_data_packet() {
    wire::DataChunk d;
    d.tsn = wire::Tsn(1);
    d.flags = {false, true, true};
    d.payload = wire::Bytes(1452, 0xAB);
    return {4000, 5000, 0x1234, 0, {d}};
}

void BM_Crc32c(benchmark::State& state) {
    const wire::Bytes buf(static_cast<std::size_t>(state.range(0)), 0x5C);
    for (auto _ : state) benchmark::DoNotOptimize(wire::crc32c(buf));
    state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Crc32c)->Arg(64)->Arg(1480)->Arg(65536);

void BM_Encode(benchmark::State& state) {
    const auto p = full_data_packet();
    for (auto _ : state) benchmark::DoNotOptimize(wire::encode_packet(p));
}
BENCHMARK(BM_Encode);

void BM_Decode(benchmark::State& state) {
    const auto bytes = wire::encode_packet(full_data_packet(), {1480, state.range(0) != 0});
    for (auto _ : state) benchmark::DoNotOptimize(wire::decode_packet(bytes, {1480, state.range(0) != 0}));
    state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(bytes.size()));
}
BENCHMARK(BM_Decode)->Arg(0)->Arg(1)->ArgName("checksum");

void BM_Decode_Sack(benchmark::State& state) {
    wire::SackChunk s;
    s.cum_tsn = wire::Tsn(100);
    s.a_rwnd = 131072;
    for (std::uint16_t g = 0; g < 32; ++g) s.gaps.push_back({static_cast<std::uint16_t>(4 * g + 2), static_cast<std::uint16_t>(4 * g + 3)});
    const auto bytes = wire::encode_packet({4000, 5000, 1, 0, {s}});
    for (auto _ : state) benchmark::DoNotOptimize(wire::decode_packet(bytes));
}
BENCHMARK(BM_Decode_Sack);

// Simulated 8 MiB bulk transfer, wall time per run.
void BM_Bulk(benchmark::State& state) {
    bench::ScenarioConfig c;
    c.bytes = 8u << 20;
    c.protocol = state.range(0) ? bench::Protocol::tcp : bench::Protocol::sctp;
    for (auto _ : state) benchmark::DoNotOptimize(bench::run_scenario(c));
    state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(c.bytes));
}
BENCHMARK(BM_Bulk)->Arg(0)->Arg(1)->ArgName("tcp")->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
