#include "sctpdc/wire/chunk.hpp"

namespace sctpdc::wire {

std::string_view to_string(ChunkType t) {
    switch (t) {
        case ChunkType::data: return "DATA";
        case ChunkType::init: return "INIT";
        case ChunkType::init_ack: return "INIT_ACK";
        case ChunkType::sack: return "SACK";
        case ChunkType::heartbeat: return "HEARTBEAT";
        case ChunkType::heartbeat_ack: return "HEARTBEAT_ACK";
        case ChunkType::abort: return "ABORT";
        case ChunkType::shutdown: return "SHUTDOWN";
        case ChunkType::shutdown_ack: return "SHUTDOWN_ACK";
        case ChunkType::cookie_echo: return "COOKIE_ECHO";
        case ChunkType::cookie_ack: return "COOKIE_ACK";
        case ChunkType::shutdown_complete: return "SHUTDOWN_COMPLETE";
    }
    return "UNKNOWN";
}

bool gaps_well_formed(const std::vector<GapBlock>& gaps) {
    std::uint32_t prev_end = 0;
    bool first = true;
    for (const auto& g : gaps) {
        if (g.start < 1 || g.start > g.end) {
            return false;
        }
        // Adjacent blocks would have been merged into one run.
        if (!first && std::uint32_t{g.start} <= prev_end + 1) {
            return false;
        }
        prev_end = g.end;
        first = false;
    }
    return true;
}

ChunkType chunk_type(const Chunk& c) {
    return std::visit(
        [](const auto& ch) -> ChunkType {
            using T = std::decay_t<decltype(ch)>;
            if constexpr (std::is_same_v<T, DataChunk>) return ChunkType::data;
            else if constexpr (std::is_same_v<T, InitChunk>) return ChunkType::init;
            else if constexpr (std::is_same_v<T, InitAckChunk>) return ChunkType::init_ack;
            else if constexpr (std::is_same_v<T, CookieEchoChunk>) return ChunkType::cookie_echo;
            else if constexpr (std::is_same_v<T, CookieAckChunk>) return ChunkType::cookie_ack;
            else if constexpr (std::is_same_v<T, SackChunk>) return ChunkType::sack;
            else if constexpr (std::is_same_v<T, HeartbeatChunk>) return ChunkType::heartbeat;
            else if constexpr (std::is_same_v<T, HeartbeatAckChunk>) return ChunkType::heartbeat_ack;
            else if constexpr (std::is_same_v<T, ShutdownChunk>) return ChunkType::shutdown;
            else if constexpr (std::is_same_v<T, ShutdownAckChunk>) return ChunkType::shutdown_ack;
            else if constexpr (std::is_same_v<T, ShutdownCompleteChunk>) return ChunkType::shutdown_complete;
            else return ChunkType::abort;
        },
        c);
}

std::size_t chunk_length(const Chunk& c) {
    return std::visit(
        [](const auto& ch) -> std::size_t {
            using T = std::decay_t<decltype(ch)>;
            if constexpr (std::is_same_v<T, DataChunk>) return kDataHeaderBytes + ch.payload.size();
            else if constexpr (std::is_same_v<T, InitChunk>) return 20;
            else if constexpr (std::is_same_v<T, InitAckChunk>) return 24 + ch.cookie.size();
            else if constexpr (std::is_same_v<T, CookieEchoChunk>) return kChunkHeaderBytes + ch.cookie.size();
            else if constexpr (std::is_same_v<T, SackChunk>) return 16 + 4 * ch.gaps.size() + 4 * ch.dups.size();
            else if constexpr (std::is_same_v<T, HeartbeatChunk> || std::is_same_v<T, HeartbeatAckChunk>) return 20;
            else if constexpr (std::is_same_v<T, ShutdownChunk>) return 8;
            else return kChunkHeaderBytes;
        },
        c);
}

}  // namespace sctpdc::wire
