#pragma once

#include <cstdint>
#include <span>

namespace sctpdc::wire {

// CRC-32c (Castagnoli, reflected polynomial 0x82F63B78, init and final xor
// 0xFFFFFFFF). Table driven, one byte per step.
std::uint32_t crc32c(std::span<const std::uint8_t> bytes) noexcept;

// Continues a running CRC; pass the previous return value (start with 0).
std::uint32_t crc32c_extend(std::uint32_t crc, std::span<const std::uint8_t> bytes) noexcept;

}  // namespace sctpdc::wire
