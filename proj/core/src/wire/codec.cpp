#include "sctpdc/wire/codec.hpp"

#include <algorithm>
#include <sstream>

#include "sctpdc/wire/crc32c.hpp"

namespace sctpdc::wire {

namespace {

constexpr std::uint8_t kFlagUnordered = 0x04;
constexpr std::uint8_t kFlagBegin = 0x02;
constexpr std::uint8_t kFlagEnd = 0x01;

constexpr std::uint16_t kParamHeartbeatInfo = 1;
constexpr std::uint16_t kParamStateCookie = 7;
constexpr std::size_t kInitFixedBytes = 20;
constexpr std::size_t kSackFixedBytes = 16;
constexpr std::size_t kHeartbeatBytes = 4 + 4 + 12;

class Writer {
public:
    explicit Writer(std::size_t reserve) { out_.reserve(reserve); }

    void u8(std::uint8_t v) { out_.push_back(v); }
    void u16(std::uint16_t v) {
        out_.push_back(static_cast<std::uint8_t>(v >> 8));
        out_.push_back(static_cast<std::uint8_t>(v));
    }
    void u32(std::uint32_t v) {
        u16(static_cast<std::uint16_t>(v >> 16));
        u16(static_cast<std::uint16_t>(v));
    }
    void u64(std::uint64_t v) {
        u32(static_cast<std::uint32_t>(v >> 32));
        u32(static_cast<std::uint32_t>(v));
    }
    void bytes(const Bytes& b) { out_.insert(out_.end(), b.begin(), b.end()); }
    void pad_to_4() {
        while (out_.size() % 4 != 0) {
            out_.push_back(0);
        }
    }
    void chunk_header(ChunkType t, std::uint8_t flags, std::size_t length) {
        u8(static_cast<std::uint8_t>(t));
        u8(flags);
        u16(static_cast<std::uint16_t>(length));
    }
    std::size_t size() const { return out_.size(); }
    Bytes take() { return std::move(out_); }
    Bytes& buffer() { return out_; }

private:
    Bytes out_;
};

class Reader {
public:
    Reader(std::span<const std::uint8_t> in, std::size_t base) : in_(in), base_(base) {}

    std::uint8_t u8() { return in_[pos_++]; }
    std::uint16_t u16() {
        auto v = static_cast<std::uint16_t>((in_[pos_] << 8) | in_[pos_ + 1]);
        pos_ += 2;
        return v;
    }
    std::uint32_t u32() {
        std::uint32_t hi = u16();
        return (hi << 16) | u16();
    }
    std::uint64_t u64() {
        std::uint64_t hi = u32();
        return (hi << 32) | u32();
    }
    Bytes bytes(std::size_t n) {
        Bytes b(in_.begin() + static_cast<std::ptrdiff_t>(pos_), in_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
        pos_ += n;
        return b;
    }
    std::size_t remaining() const { return in_.size() - pos_; }
    std::size_t offset() const { return base_ + pos_; }

private:
    std::span<const std::uint8_t> in_;
    std::size_t base_;
    std::size_t pos_ = 0;
};

[[noreturn]] void fail(CodecErrorKind kind, std::size_t offset, const std::string& detail) {
    throw CodecError(kind, offset, detail);
}

void encode_chunk(Writer& w, const Chunk& c) {
    const std::size_t len = chunk_length(c);
    std::visit(
        [&](const auto& ch) {
            using T = std::decay_t<decltype(ch)>;
            if constexpr (std::is_same_v<T, DataChunk>) {
                std::uint8_t flags = 0;
                if (ch.flags.unordered) flags |= kFlagUnordered;
                if (ch.flags.begin_fragment) flags |= kFlagBegin;
                if (ch.flags.end_fragment) flags |= kFlagEnd;
                w.chunk_header(ChunkType::data, flags, len);
                w.u32(ch.tsn.value);
                w.u16(ch.stream);
                w.u16(ch.ssn.value);
                w.u32(0);  // payload protocol identifier
                w.bytes(ch.payload);
            } else if constexpr (std::is_same_v<T, InitChunk> || std::is_same_v<T, InitAckChunk>) {
                w.chunk_header(std::is_same_v<T, InitChunk> ? ChunkType::init : ChunkType::init_ack, 0, len);
                w.u32(ch.init_tag);
                w.u32(ch.a_rwnd);
                w.u16(ch.n_out_streams);
                w.u16(ch.n_in_streams);
                w.u32(ch.initial_tsn.value);
                if constexpr (std::is_same_v<T, InitAckChunk>) {
                    w.u16(kParamStateCookie);
                    w.u16(static_cast<std::uint16_t>(4 + ch.cookie.size()));
                    w.bytes(ch.cookie);
                }
            } else if constexpr (std::is_same_v<T, CookieEchoChunk>) {
                w.chunk_header(ChunkType::cookie_echo, 0, len);
                w.bytes(ch.cookie);
            } else if constexpr (std::is_same_v<T, CookieAckChunk>) {
                w.chunk_header(ChunkType::cookie_ack, 0, len);
            } else if constexpr (std::is_same_v<T, SackChunk>) {
                w.chunk_header(ChunkType::sack, 0, len);
                w.u32(ch.cum_tsn.value);
                w.u32(ch.a_rwnd);
                w.u16(static_cast<std::uint16_t>(ch.gaps.size()));
                w.u16(static_cast<std::uint16_t>(ch.dups.size()));
                for (const auto& g : ch.gaps) {
                    w.u16(g.start);
                    w.u16(g.end);
                }
                for (const auto& d : ch.dups) {
                    w.u32(d.value);
                }
            } else if constexpr (std::is_same_v<T, HeartbeatChunk> || std::is_same_v<T, HeartbeatAckChunk>) {
                w.chunk_header(std::is_same_v<T, HeartbeatChunk> ? ChunkType::heartbeat : ChunkType::heartbeat_ack, 0,
                               len);
                w.u16(kParamHeartbeatInfo);
                w.u16(16);
                w.u64(ch.nonce);
                w.u32(ch.path_id);
            } else if constexpr (std::is_same_v<T, ShutdownChunk>) {
                w.chunk_header(ChunkType::shutdown, 0, len);
                w.u32(ch.cum_tsn.value);
            } else if constexpr (std::is_same_v<T, ShutdownAckChunk>) {
                w.chunk_header(ChunkType::shutdown_ack, 0, len);
            } else if constexpr (std::is_same_v<T, ShutdownCompleteChunk>) {
                w.chunk_header(ChunkType::shutdown_complete, 0, len);
            } else if constexpr (std::is_same_v<T, AbortChunk>) {
                w.chunk_header(ChunkType::abort, 0, len);
            }
        },
        c);
    w.pad_to_4();
}

void expect_length(std::size_t declared, std::size_t wanted, std::size_t offset, const char* what) {
    if (declared != wanted) {
        std::ostringstream os;
        os << what << " chunk length " << declared << ", expected " << wanted;
        fail(CodecErrorKind::malformed_chunk, offset, os.str());
    }
}

Chunk decode_chunk(Reader& r, std::uint8_t type, std::uint8_t flags, std::size_t length, std::size_t chunk_offset) {
    const std::size_t body = length - kChunkHeaderBytes;
    switch (static_cast<ChunkType>(type)) {
        case ChunkType::data: {
            if (length < kDataHeaderBytes) {
                fail(CodecErrorKind::malformed_chunk, chunk_offset, "DATA chunk shorter than its header");
            }
            DataChunk d;
            d.flags.unordered = (flags & kFlagUnordered) != 0;
            d.flags.begin_fragment = (flags & kFlagBegin) != 0;
            d.flags.end_fragment = (flags & kFlagEnd) != 0;
            d.tsn = Tsn(r.u32());
            d.stream = r.u16();
            d.ssn = Ssn(r.u16());
            (void)r.u32();
            d.payload = r.bytes(length - kDataHeaderBytes);
            return d;
        }
        case ChunkType::init:
        case ChunkType::init_ack: {
            const bool is_ack = type == static_cast<std::uint8_t>(ChunkType::init_ack);
            if (!is_ack) {
                expect_length(length, kInitFixedBytes, chunk_offset, "INIT");
            } else if (length < kInitFixedBytes) {
                fail(CodecErrorKind::malformed_chunk, chunk_offset, "INIT_ACK chunk too short");
            }
            const std::uint32_t tag = r.u32();
            const std::uint32_t rwnd = r.u32();
            const std::uint16_t out = r.u16();
            const std::uint16_t in = r.u16();
            const Tsn itsn(r.u32());
            if (!is_ack) {
                return InitChunk{tag, rwnd, out, in, itsn};
            }
            InitAckChunk a{tag, rwnd, out, in, itsn, {}};
            if (length > kInitFixedBytes) {
                const std::size_t param_offset = r.offset();
                if (length < kInitFixedBytes + 4) {
                    fail(CodecErrorKind::malformed_chunk, param_offset, "truncated parameter header");
                }
                const std::uint16_t ptype = r.u16();
                const std::uint16_t plen = r.u16();
                if (ptype != kParamStateCookie || plen != length - kInitFixedBytes) {
                    fail(CodecErrorKind::malformed_chunk, param_offset, "INIT_ACK needs exactly one state cookie");
                }
                a.cookie = r.bytes(plen - 4u);
            }
            return a;
        }
        case ChunkType::cookie_echo:
            return CookieEchoChunk{r.bytes(body)};
        case ChunkType::cookie_ack:
            expect_length(length, 4, chunk_offset, "COOKIE_ACK");
            return CookieAckChunk{};
        case ChunkType::sack: {
            if (length < kSackFixedBytes) {
                fail(CodecErrorKind::malformed_chunk, chunk_offset, "SACK chunk too short");
            }
            SackChunk s;
            s.cum_tsn = Tsn(r.u32());
            s.a_rwnd = r.u32();
            const std::size_t n_gaps = r.u16();
            const std::size_t n_dups = r.u16();
            expect_length(length, kSackFixedBytes + 4 * n_gaps + 4 * n_dups, chunk_offset, "SACK");
            s.gaps.reserve(n_gaps);
            for (std::size_t i = 0; i < n_gaps; ++i) {
                GapBlock g;
                g.start = r.u16();
                g.end = r.u16();
                s.gaps.push_back(g);
            }
            s.dups.reserve(n_dups);
            for (std::size_t i = 0; i < n_dups; ++i) {
                s.dups.emplace_back(r.u32());
            }
            if (!gaps_well_formed(s.gaps)) {
                fail(CodecErrorKind::malformed_chunk, chunk_offset, "SACK gap blocks out of order or overlapping");
            }
            return s;
        }
        case ChunkType::heartbeat:
        case ChunkType::heartbeat_ack: {
            expect_length(length, kHeartbeatBytes, chunk_offset, "HEARTBEAT");
            const std::size_t param_offset = r.offset();
            const std::uint16_t ptype = r.u16();
            const std::uint16_t plen = r.u16();
            if (ptype != kParamHeartbeatInfo || plen != 16) {
                fail(CodecErrorKind::malformed_chunk, param_offset, "bad heartbeat info parameter");
            }
            const std::uint64_t nonce = r.u64();
            const std::uint32_t path = r.u32();
            if (type == static_cast<std::uint8_t>(ChunkType::heartbeat)) {
                return HeartbeatChunk{nonce, path};
            }
            return HeartbeatAckChunk{nonce, path};
        }
        case ChunkType::shutdown:
            expect_length(length, 8, chunk_offset, "SHUTDOWN");
            return ShutdownChunk{Tsn(r.u32())};
        case ChunkType::shutdown_ack:
            expect_length(length, 4, chunk_offset, "SHUTDOWN_ACK");
            return ShutdownAckChunk{};
        case ChunkType::shutdown_complete:
            expect_length(length, 4, chunk_offset, "SHUTDOWN_COMPLETE");
            return ShutdownCompleteChunk{};
        case ChunkType::abort:
            expect_length(length, 4, chunk_offset, "ABORT");
            return AbortChunk{};
    }
    std::ostringstream os;
    os << "unknown chunk type " << static_cast<int>(type);
    fail(CodecErrorKind::unknown_chunk_type, chunk_offset, os.str());
}

bool known_type(std::uint8_t t) {
    switch (static_cast<ChunkType>(t)) {
        case ChunkType::data:
        case ChunkType::init:
        case ChunkType::init_ack:
        case ChunkType::sack:
        case ChunkType::heartbeat:
        case ChunkType::heartbeat_ack:
        case ChunkType::abort:
        case ChunkType::shutdown:
        case ChunkType::shutdown_ack:
        case ChunkType::cookie_echo:
        case ChunkType::cookie_ack:
        case ChunkType::shutdown_complete:
            return true;
    }
    return false;
}

std::uint32_t checksum_over(std::span<const std::uint8_t> bytes) {
    // CRC over the packet with the checksum field taken as zero.
    static constexpr std::uint8_t zeros[4] = {0, 0, 0, 0};
    std::uint32_t crc = crc32c_extend(0, bytes.first(8));
    crc = crc32c_extend(crc, zeros);
    return crc32c_extend(crc, bytes.subspan(kCommonHeaderBytes));
}

}  // namespace

std::string_view to_string(CodecErrorKind k) {
    switch (k) {
        case CodecErrorKind::malformed_header: return "malformed-header";
        case CodecErrorKind::truncated_chunk: return "truncated-chunk";
        case CodecErrorKind::unknown_chunk_type: return "unknown-chunk-type";
        case CodecErrorKind::malformed_chunk: return "malformed-chunk";
        case CodecErrorKind::checksum_mismatch: return "checksum-mismatch";
        case CodecErrorKind::oversize: return "oversize";
        case CodecErrorKind::invalid_packet: return "invalid-packet";
    }
    return "?";
}

CodecError::CodecError(CodecErrorKind kind, std::size_t offset, const std::string& detail)
    : std::runtime_error(std::string(to_string(kind)) + " at offset " + std::to_string(offset) + ": " + detail),
      kind_(kind),
      offset_(offset) {}

std::size_t encoded_size(const Packet& p) {
    std::size_t n = kCommonHeaderBytes;
    for (const auto& c : p.chunks) {
        n += chunk_wire_size(c);
    }
    return n;
}

Bytes encode_packet(const Packet& p, const CodecOptions& opts) {
    const std::size_t total = encoded_size(p);
    if (total > opts.max_packet_bytes) {
        fail(CodecErrorKind::oversize, opts.max_packet_bytes,
             "packet of " + std::to_string(total) + " bytes exceeds budget " + std::to_string(opts.max_packet_bytes));
    }
    Writer w(total);
    w.u16(p.src_port);
    w.u16(p.dst_port);
    w.u32(p.verification_tag);
    w.u32(0);
    for (const auto& c : p.chunks) {
        if (const auto* s = std::get_if<SackChunk>(&c); s != nullptr && !gaps_well_formed(s->gaps)) {
            fail(CodecErrorKind::invalid_packet, w.size(), "SACK gap blocks violate ordering invariants");
        }
        if (chunk_length(c) > 0xFFFF) {
            fail(CodecErrorKind::invalid_packet, w.size(), "chunk longer than 65535 bytes");
        }
        encode_chunk(w, c);
    }
    if (opts.checksum) {
        const std::uint32_t crc = checksum_over(w.buffer());
        auto& b = w.buffer();
        b[8] = static_cast<std::uint8_t>(crc >> 24);
        b[9] = static_cast<std::uint8_t>(crc >> 16);
        b[10] = static_cast<std::uint8_t>(crc >> 8);
        b[11] = static_cast<std::uint8_t>(crc);
    }
    return w.take();
}

Packet decode_packet(std::span<const std::uint8_t> bytes, const CodecOptions& opts) {
    if (bytes.size() < kCommonHeaderBytes) {
        fail(CodecErrorKind::malformed_header, 0,
             "need " + std::to_string(kCommonHeaderBytes) + " header bytes, have " + std::to_string(bytes.size()));
    }
    Reader hdr(bytes.first(kCommonHeaderBytes), 0);
    Packet p;
    p.src_port = hdr.u16();
    p.dst_port = hdr.u16();
    p.verification_tag = hdr.u32();
    const std::uint32_t wire_checksum = hdr.u32();
    if (opts.checksum) {
        const std::uint32_t expected = checksum_over(bytes);
        if (expected != wire_checksum) {
            fail(CodecErrorKind::checksum_mismatch, 8, "checksum does not match packet contents");
        }
        p.checksum = wire_checksum;
    }

    std::size_t pos = kCommonHeaderBytes;
    while (pos < bytes.size()) {
        if (bytes.size() - pos < kChunkHeaderBytes) {
            fail(CodecErrorKind::truncated_chunk, pos, "incomplete chunk header");
        }
        const std::uint8_t type = bytes[pos];
        const std::uint8_t flags = bytes[pos + 1];
        const std::size_t length = (std::size_t{bytes[pos + 2]} << 8) | bytes[pos + 3];
        if (length < kChunkHeaderBytes) {
            fail(CodecErrorKind::malformed_chunk, pos, "chunk length below header size");
        }
        if (length > bytes.size() - pos) {
            fail(CodecErrorKind::truncated_chunk, pos,
                 "chunk length " + std::to_string(length) + " exceeds remaining " + std::to_string(bytes.size() - pos));
        }
        if (!known_type(type)) {
            fail(CodecErrorKind::unknown_chunk_type, pos, "unknown chunk type " + std::to_string(type));
        }
        const std::size_t padded = pad4(length);
        if (padded > bytes.size() - pos) {
            fail(CodecErrorKind::truncated_chunk, pos, "missing chunk padding");
        }
        Reader r(bytes.subspan(pos + kChunkHeaderBytes, length - kChunkHeaderBytes), pos + kChunkHeaderBytes);
        p.chunks.push_back(decode_chunk(r, type, flags, length, pos));
        pos += padded;
    }
    return p;
}

}  // namespace sctpdc::wire
