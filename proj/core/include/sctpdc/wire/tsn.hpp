#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>
#include <type_traits>

namespace sctpdc::wire {

// Serial-number comparison (RFC 1982 style) over an N-bit space.
// a < b iff 0 < (b - a) mod 2^N < 2^(N-1). Pairs exactly half the space
// apart compare as greater in both directions; callers keep windows
// narrower than that.
template <typename U>
constexpr std::strong_ordering serial_cmp(U a, U b) noexcept {
    static_assert(std::is_unsigned_v<U>);
    if (a == b) {
        return std::strong_ordering::equal;
    }
    constexpr U half = U(U(1) << (sizeof(U) * 8 - 1));
    const U forward = U(b - a);
    return forward < half ? std::strong_ordering::less : std::strong_ordering::greater;
}

/// Transmission sequence number; the association-wide DATA counter.
struct Tsn {
    std::uint32_t value = 0;

    constexpr Tsn() = default;
    constexpr explicit Tsn(std::uint32_t v) : value(v) {}

    constexpr Tsn next() const { return Tsn(value + 1u); }
    constexpr Tsn operator+(std::uint32_t d) const { return Tsn(value + d); }
    constexpr Tsn operator-(std::uint32_t d) const { return Tsn(value - d); }
    // Forward distance from `from` to this TSN, mod 2^32.
    constexpr std::uint32_t distance_from(Tsn from) const { return value - from.value; }

    friend constexpr bool operator==(Tsn a, Tsn b) { return a.value == b.value; }
    friend constexpr std::strong_ordering operator<=>(Tsn a, Tsn b) {
        return serial_cmp(a.value, b.value);
    }
};

constexpr std::strong_ordering tsn_cmp(Tsn a, Tsn b) noexcept { return serial_cmp(a.value, b.value); }

/// Per-stream sequence number, 16-bit serial arithmetic.
struct Ssn {
    std::uint16_t value = 0;

    constexpr Ssn() = default;
    constexpr explicit Ssn(std::uint16_t v) : value(v) {}

    constexpr Ssn next() const { return Ssn(static_cast<std::uint16_t>(value + 1u)); }

    friend constexpr bool operator==(Ssn a, Ssn b) { return a.value == b.value; }
    friend constexpr std::strong_ordering operator<=>(Ssn a, Ssn b) {
        return serial_cmp(a.value, b.value);
    }
};

using StreamId = std::uint16_t;

inline std::ostream& operator<<(std::ostream& os, Tsn t) { return os << t.value; }
inline std::ostream& operator<<(std::ostream& os, Ssn s) { return os << s.value; }

// Strict ordering usable as a std::set/std::map comparator as long as all
// keys stay within a half-space window.
struct TsnLess {
    constexpr bool operator()(Tsn a, Tsn b) const noexcept { return tsn_cmp(a, b) < 0; }
};

struct SsnLess {
    constexpr bool operator()(Ssn a, Ssn b) const noexcept { return serial_cmp(a.value, b.value) < 0; }
};

}  // namespace sctpdc::wire

template <>
struct std::hash<sctpdc::wire::Tsn> {
    std::size_t operator()(sctpdc::wire::Tsn t) const noexcept { return std::hash<std::uint32_t>{}(t.value); }
};
