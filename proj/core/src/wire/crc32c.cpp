#include "sctpdc/wire/crc32c.hpp"

#include <array>

namespace sctpdc::wire {

namespace {

constexpr std::uint32_t kReflectedPoly = 0x82F63B78u;

constexpr std::array<std::uint32_t, 256> make_table() {
    std::array<std::uint32_t, 256> t{};
    for (std::uint32_t i = 0; i < 256; ++i) {
        std::uint32_t c = i;
        for (int k = 0; k < 8; ++k) {
            c = (c & 1u) ? (c >> 1) ^ kReflectedPoly : c >> 1;
        }
        t[i] = c;
    }
    return t;
}

constexpr auto kTable = make_table();

}  // namespace

std::uint32_t crc32c_extend(std::uint32_t crc, std::span<const std::uint8_t> bytes) noexcept {
    std::uint32_t c = ~crc;
    for (std::uint8_t b : bytes) {
        c = kTable[(c ^ b) & 0xFFu] ^ (c >> 8);
    }
    return ~c;
}

std::uint32_t crc32c(std::span<const std::uint8_t> bytes) noexcept { return crc32c_extend(0, bytes); }

}  // namespace sctpdc::wire
