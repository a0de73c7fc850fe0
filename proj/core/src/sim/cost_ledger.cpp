#include "sctpdc/sim/cost_ledger.hpp"

#include <algorithm>
#include <cmath>

namespace sctpdc::sim {

std::string_view to_string(CostKind k) {
    switch (k) {
        case CostKind::copy_bytes: return "copy_bytes";
        case CostKind::short_copy_bytes: return "short_copy_bytes";
        case CostKind::chunks_processed: return "chunks_processed";
        case CostKind::sacks_processed: return "sacks_processed";
        case CostKind::crc_bytes: return "crc_bytes";
    }
    return "?";
}

std::string_view to_string(LockModel m) { return m == LockModel::coarse ? "coarse" : "fine"; }

double CostWeights::weight(CostKind k) const {
    switch (k) {
        case CostKind::copy_bytes: return copy_per_byte;
        case CostKind::short_copy_bytes: return short_copy_per_byte;
        case CostKind::chunks_processed: return per_chunk;
        case CostKind::sacks_processed: return per_sack;
        case CostKind::crc_bytes: return crc_per_byte;
    }
    return 0.0;
}

CostLedger::CostLedger(CostWeights w) : weights_(w) {
    // Weights are held in thousandths of a unit so running totals stay exact.
    for (std::size_t i = 0; i < kCostKinds; ++i) {
        const double wt = weights_.weight(static_cast<CostKind>(i));
        milli_weights_[i] = static_cast<std::uint64_t>(std::llround(std::max(0.0, wt) * 1000.0));
    }
}

void CostLedger::charge(CostKind kind, std::uint64_t amount) {
    counters_[static_cast<std::size_t>(kind)] += amount;
    milli_total_ += milli_cost(kind, amount);
}

void CostLedger::charge_stream(std::uint32_t assoc, std::uint16_t stream, CostKind kind, std::uint64_t amount) {
    charge(kind, amount);
    assoc_[assoc].stream_milli[stream] += milli_cost(kind, amount);
}

void CostLedger::charge_shared(std::uint32_t assoc, CostKind kind, std::uint64_t amount) {
    charge(kind, amount);
    assoc_[assoc].shared_milli += milli_cost(kind, amount);
}

double CostLedger::recompute_cpu_proxy() const {
    std::uint64_t milli = 0;
    for (std::size_t i = 0; i < kCostKinds; ++i) {
        milli += counters_[i] * milli_weights_[i];
    }
    return static_cast<double>(milli) / 1000.0;
}

double CostLedger::elapsed_proxy(LockModel model) const {
    std::uint64_t milli = 0;
    for (const auto& [id, a] : assoc_) {
        std::uint64_t agg = 0;
        for (const auto& [stream, m] : a.stream_milli) {
            agg = model == LockModel::coarse ? agg + m : std::max(agg, m);
        }
        milli += a.shared_milli + agg;
    }
    return static_cast<double>(milli) / 1000.0;
}

void CostLedger::merge(const CostLedger& other) {
    for (std::size_t i = 0; i < kCostKinds; ++i) {
        counters_[i] += other.counters_[i];
    }
    milli_total_ += other.milli_total_;
    for (const auto& [id, a] : other.assoc_) {
        auto& mine = assoc_[id];
        mine.shared_milli += a.shared_milli;
        for (const auto& [s, m] : a.stream_milli) {
            mine.stream_milli[s] += m;
        }
    }
}

}  // namespace sctpdc::sim
