#pragma once

#include <cstdint>
#include <string_view>
#include <variant>
#include <vector>

#include "sctpdc/wire/tsn.hpp"

namespace sctpdc::wire {

using Bytes = std::vector<std::uint8_t>;

// On-wire chunk type codes (RFC 4960 numbering).
enum class ChunkType : std::uint8_t {
    data = 0,
    init = 1,
    init_ack = 2,
    sack = 3,
    heartbeat = 4,
    heartbeat_ack = 5,
    abort = 6,
    shutdown = 7,
    shutdown_ack = 8,
    cookie_echo = 10,
    cookie_ack = 11,
    shutdown_complete = 14,
};

std::string_view to_string(ChunkType t);

struct DataFlags {
    bool unordered = false;
    bool begin_fragment = false;
    bool end_fragment = false;

    bool complete() const { return begin_fragment && end_fragment; }
    friend bool operator==(const DataFlags&, const DataFlags&) = default;
};

struct DataChunk {
    Tsn tsn;
    StreamId stream = 0;
    Ssn ssn;
    DataFlags flags;
    Bytes payload;

    friend bool operator==(const DataChunk&, const DataChunk&) = default;
};

struct InitChunk {
    std::uint32_t init_tag = 0;
    std::uint32_t a_rwnd = 0;
    std::uint16_t n_out_streams = 0;
    std::uint16_t n_in_streams = 0;
    Tsn initial_tsn;

    friend bool operator==(const InitChunk&, const InitChunk&) = default;
};

struct InitAckChunk {
    std::uint32_t init_tag = 0;
    std::uint32_t a_rwnd = 0;
    std::uint16_t n_out_streams = 0;
    std::uint16_t n_in_streams = 0;
    Tsn initial_tsn;
    Bytes cookie;

    friend bool operator==(const InitAckChunk&, const InitAckChunk&) = default;
};

struct CookieEchoChunk {
    Bytes cookie;
    friend bool operator==(const CookieEchoChunk&, const CookieEchoChunk&) = default;
};

struct CookieAckChunk {
    friend bool operator==(const CookieAckChunk&, const CookieAckChunk&) = default;
};

// Gap-ack block; offsets are relative to cum_tsn, inclusive on both ends.
struct GapBlock {
    std::uint16_t start = 0;
    std::uint16_t end = 0;
    friend bool operator==(const GapBlock&, const GapBlock&) = default;
};

struct SackChunk {
    Tsn cum_tsn;
    std::uint32_t a_rwnd = 0;
    std::vector<GapBlock> gaps;
    std::vector<Tsn> dups;

    friend bool operator==(const SackChunk&, const SackChunk&) = default;
};

// Checks the gap-block invariants: ascending, non-overlapping, non-adjacent,
// start >= 1, start <= end.
bool gaps_well_formed(const std::vector<GapBlock>& gaps);

struct HeartbeatChunk {
    std::uint64_t nonce = 0;
    std::uint32_t path_id = 0;
    friend bool operator==(const HeartbeatChunk&, const HeartbeatChunk&) = default;
};

struct HeartbeatAckChunk {
    std::uint64_t nonce = 0;
    std::uint32_t path_id = 0;
    friend bool operator==(const HeartbeatAckChunk&, const HeartbeatAckChunk&) = default;
};

struct ShutdownChunk {
    Tsn cum_tsn;
    friend bool operator==(const ShutdownChunk&, const ShutdownChunk&) = default;
};

struct ShutdownAckChunk {
    friend bool operator==(const ShutdownAckChunk&, const ShutdownAckChunk&) = default;
};

struct ShutdownCompleteChunk {
    friend bool operator==(const ShutdownCompleteChunk&, const ShutdownCompleteChunk&) = default;
};

struct AbortChunk {
    friend bool operator==(const AbortChunk&, const AbortChunk&) = default;
};

using Chunk = std::variant<DataChunk, InitChunk, InitAckChunk, CookieEchoChunk, CookieAckChunk, SackChunk,
                           HeartbeatChunk, HeartbeatAckChunk, ShutdownChunk, ShutdownAckChunk,
                           ShutdownCompleteChunk, AbortChunk>;

ChunkType chunk_type(const Chunk& c);

struct Packet {
    std::uint16_t src_port = 0;
    std::uint16_t dst_port = 0;
    std::uint32_t verification_tag = 0;
    // Filled in by decode; encode computes (or zeroes) it and ignores this value.
    std::uint32_t checksum = 0;
    std::vector<Chunk> chunks;

    friend bool operator==(const Packet&, const Packet&) = default;
};

// Sizes of the fixed wire structures.
inline constexpr std::size_t kCommonHeaderBytes = 12;
inline constexpr std::size_t kChunkHeaderBytes = 4;
inline constexpr std::size_t kDataHeaderBytes = 16;
inline constexpr std::size_t kNetworkHeaderBytes = 20;

inline constexpr std::size_t pad4(std::size_t n) { return (n + 3) & ~std::size_t{3}; }

// Declared (unpadded) length of a chunk's TLV, header included.
std::size_t chunk_length(const Chunk& c);
// Bytes the chunk occupies on the wire, padding included.
inline std::size_t chunk_wire_size(const Chunk& c) { return pad4(chunk_length(c)); }

}  // namespace sctpdc::wire
