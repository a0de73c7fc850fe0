#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string_view>

namespace sctpdc::sim {

// Stand-in for CPU measurements: raw counters times per-unit weights.
// Weights are calibration knobs, not measured values; only ratios and
// orderings between runs are meaningful.
enum class CostKind : std::size_t {
    copy_bytes = 0,        // memory-to-memory copies on the long path
    short_copy_bytes = 1,  // copies on the shortened small-message path
    chunks_processed = 2,
    sacks_processed = 3,
    crc_bytes = 4,
};
inline constexpr std::size_t kCostKinds = 5;

std::string_view to_string(CostKind k);

struct CostWeights {
    double copy_per_byte = 1.0;
    double short_copy_per_byte = 0.5;
    double per_chunk = 50.0;
    double per_sack = 200.0;
    double crc_per_byte = 0.5;

    double weight(CostKind k) const;
};

enum class LockModel { coarse, fine };

std::string_view to_string(LockModel m);

class CostLedger {
public:
    explicit CostLedger(CostWeights w = {});

    void charge(CostKind kind, std::uint64_t amount);
    // Same as charge(), and attributes the cost to one stream of one
    // association for the lock-model elapsed proxy.
    void charge_stream(std::uint32_t assoc, std::uint16_t stream, CostKind kind, std::uint64_t amount);
    // Association-wide work (SACKs, control) that is serialized under any lock model.
    void charge_shared(std::uint32_t assoc, CostKind kind, std::uint64_t amount);

    std::uint64_t counter(CostKind k) const { return counters_[static_cast<std::size_t>(k)]; }
    // Total copy bytes across both copy paths.
    std::uint64_t total_copy_bytes() const {
        return counter(CostKind::copy_bytes) + counter(CostKind::short_copy_bytes);
    }

    double cpu_proxy() const { return static_cast<double>(milli_total_) / 1000.0; }
    double recompute_cpu_proxy() const;

    // Per association: shared cost plus the sum (coarse lock) or max (fine
    // lock) of per-stream costs; summed over associations.
    double elapsed_proxy(LockModel model) const;

    const CostWeights& weights() const { return weights_; }
    void merge(const CostLedger& other);

private:
    std::uint64_t milli_cost(CostKind kind, std::uint64_t amount) const {
        return amount * milli_weights_[static_cast<std::size_t>(kind)];
    }

    struct AssocCost {
        std::uint64_t shared_milli = 0;
        std::map<std::uint16_t, std::uint64_t> stream_milli;
    };

    CostWeights weights_;
    std::array<std::uint64_t, kCostKinds> milli_weights_{};
    std::array<std::uint64_t, kCostKinds> counters_{};
    std::uint64_t milli_total_ = 0;
    std::map<std::uint32_t, AssocCost> assoc_;
};

}  // namespace sctpdc::sim
