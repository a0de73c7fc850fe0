#include <gtest/gtest.h>

#include <boost/crc.hpp>
#include <string_view>

#include "sctpdc/wire/codec.hpp"
#include "sctpdc/wire/crc32c.hpp"
#include "sctpdc/wire/print.hpp"
#include "support.hpp"

using namespace sctpdc;
using namespace sctpdc::wire;

namespace {

// Bit-at-a-time reference, deliberately unlike the table-driven version.
std::uint32_t crc32c_bitwise(std::span<const std::uint8_t> bytes) {
    std::uint32_t crc = 0xFFFFFFFFu;
    for (std::uint8_t b : bytes) {
        crc ^= b;
        for (int i = 0; i < 8; ++i) crc = (crc >> 1) ^ (0x82F63B78u & (0u - (crc & 1u)));
    }
    return ~crc;
}

std::span<const std::uint8_t> as_bytes(std::string_view s) {
    return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

}  // namespace

TEST(Crc32c, CheckValueAgreesWithTwoOracles) {
    const auto input = as_bytes("123456789");
    boost::crc_optimal<32, 0x1EDC6F41, 0xFFFFFFFF, 0xFFFFFFFF, true, true> reference;
    reference.process_bytes(input.data(), input.size());

    EXPECT_EQ(crc32c_bitwise(input), 0xE3069283u);
    EXPECT_EQ(reference.checksum(), 0xE3069283u);
    EXPECT_EQ(crc32c(input), 0xE3069283u);
    EXPECT_EQ(crc32c({}), 0u);
}

TEST(Crc32c, MatchesBitwiseOracleAndExtendsIncrementally) {
    sim::Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        Bytes b(rng.next_u64() % 300);
        for (auto& x : b) x = static_cast<std::uint8_t>(rng.next_u32());
        const std::span<const std::uint8_t> all(b);
        ASSERT_EQ(crc32c(all), crc32c_bitwise(all));
        const std::size_t cut = b.empty() ? 0 : rng.next_u64() % b.size();
        EXPECT_EQ(crc32c_extend(crc32c_extend(0, all.first(cut)), all.subspan(cut)), crc32c(all));
    }
}

TEST(TsnCompare, SerialArithmeticAroundWrap) {
    EXPECT_LT(Tsn(5), Tsn(9));
    EXPECT_EQ(tsn_cmp(Tsn(7), Tsn(7)), std::strong_ordering::equal);
    EXPECT_LT(Tsn(0xFFFFFFFFu), Tsn(0));
    EXPECT_GT(Tsn(0), Tsn(0xFFFFFFFFu));
    EXPECT_LT(Ssn(65535), Ssn(0));

    sim::Rng rng(3);
    for (int i = 0; i < 10000; ++i) {
        const Tsn a(rng.next_u32());
        const std::uint32_t d = 1 + rng.next_u32() % 0x7FFFFFFFu;
        ASSERT_LT(a, a + d) << a << " + " << d;
        ASSERT_GT(a + d, a);
    }
}

TEST(Codec, HeaderOnlyPacketIsTwelveBytes) {
    Packet p{1, 2, 3, 0, {}};
    EXPECT_EQ(encode_packet(p).size(), 12u);
}

TEST(Codec, OneByteDataChunkMatchesHandLayout) {
    DataChunk d;
    d.tsn = Tsn(0x01020304);
    d.stream = 0x0506;
    d.ssn = Ssn(0x0708);
    d.flags = {false, true, true};
    d.payload = {0xEE};
    Packet p{0x1388, 0x0FA0, 0xA1B2C3D4, 0, {d}};

    const Bytes expected = {
        0x13, 0x88, 0x0F, 0xA0, 0xA1, 0xB2, 0xC3, 0xD4, 0, 0, 0, 0,  // common header, checksum off
        0x00, 0x03, 0x00, 0x11,                                      // DATA, B|E, length 17
        0x01, 0x02, 0x03, 0x04, 0x05, 0x06, 0x07, 0x08,              // tsn, stream, ssn
        0x00, 0x00, 0x00, 0x00,                                      // payload protocol id
        0xEE, 0x00, 0x00, 0x00,                                      // payload and padding
    };
    EXPECT_EQ(chunk_length(d), 17u);
    EXPECT_EQ(chunk_wire_size(d), 20u);
    EXPECT_EQ(encode_packet(p), expected);
}

TEST(Codec, CookieAckPacketIsSixteenBytes) {
    Packet p{1, 2, 3, 0, {CookieAckChunk{}}};
    const Bytes expected = {0, 1, 0, 2, 0, 0, 0, 3, 0, 0, 0, 0, 11, 0, 0, 4};
    EXPECT_EQ(encode_packet(p), expected);
}

TEST(Codec, OversizePacketRejectedOnEncode) {
    DataChunk d;
    d.payload = Bytes(1453, 0);
    Packet p{1, 2, 3, 0, {d}};
    try {
        encode_packet(p);
        FAIL() << "expected oversize";
    } catch (const CodecError& e) {
        EXPECT_EQ(e.kind(), CodecErrorKind::oversize);
    }
    d.payload.resize(1452);
    EXPECT_EQ(encode_packet(Packet{1, 2, 3, 0, {d}}).size(), 1480u);
}

TEST(Codec, ChecksumFieldZeroWhenDisabledAndIgnoredOnDecode) {
    DataChunk d;
    d.payload = Bytes(64, 0x3C);
    Packet p{1, 2, 3, 0, {d}};
    auto off = encode_packet(p);
    EXPECT_EQ(off[8] | off[9] | off[10] | off[11], 0);
    off[9] = 0x77;
    EXPECT_NO_THROW(decode_packet(off));

    auto on = encode_packet(p, {1480, true});
    const Packet back = decode_packet(on, {1480, true});
    EXPECT_EQ(back.chunks, p.chunks);
    std::uint32_t field = (std::uint32_t{on[8]} << 24) | (on[9] << 16) | (on[10] << 8) | on[11];
    EXPECT_EQ(back.checksum, field);
}

// Padding invariant and round trip over a generated corpus.
TEST(CodecProperty, RoundTripAndPadding) {
    sim::Rng rng(2024);
    for (int i = 0; i < 2000; ++i) {
        const Packet p = testsupport::random_packet(rng);
        const Bytes bytes = encode_packet(p);
        ASSERT_EQ(bytes.size(), encoded_size(p));
        ASSERT_EQ(bytes.size() % 4, 0u);
        for (const auto& c : p.chunks) ASSERT_EQ(chunk_wire_size(c) % 4, 0u);
        ASSERT_EQ(decode_packet(bytes), p) << to_string(p);
    }
}

TEST(CodecMalformed, CorpusYieldsDesignatedErrors) {
    for (const auto& c : testsupport::malformed_corpus()) {
        SCOPED_TRACE(c.name);
        try {
            decode_packet(c.bytes, {1480, c.checksum});
            ADD_FAILURE() << "decoded without error";
        } catch (const CodecError& e) {
            EXPECT_EQ(e.kind(), c.kind) << e.what();
            EXPECT_EQ(e.offset(), c.offset) << e.what();
        }
    }
}

// Random byte damage must surface as CodecError or a valid packet, nothing else.
TEST(CodecMalformed, MutatedInputNeverEscapesAsOtherErrors) {
    sim::Rng rng(99);
    for (int i = 0; i < 3000; ++i) {
        Bytes b = encode_packet(testsupport::random_packet(rng));
        const int edits = 1 + static_cast<int>(rng.next_u64() % 4);
        for (int e = 0; e < edits && !b.empty(); ++e) {
            b[rng.next_u64() % b.size()] = static_cast<std::uint8_t>(rng.next_u32());
        }
        if (rng.bernoulli(0.3)) b.resize(rng.next_u64() % (b.size() + 1));
        try {
            (void)decode_packet(b);
        } catch (const CodecError&) {
        }
    }
}

TEST(GapBlocks, WellFormedRules) {
    EXPECT_TRUE(gaps_well_formed({}));
    EXPECT_TRUE(gaps_well_formed({{2, 3}, {5, 5}}));
    EXPECT_FALSE(gaps_well_formed({{0, 3}}));
    EXPECT_FALSE(gaps_well_formed({{4, 3}}));
    EXPECT_FALSE(gaps_well_formed({{2, 3}, {4, 5}}));  // adjacent
    EXPECT_FALSE(gaps_well_formed({{5, 6}, {2, 3}}));
}

TEST(Print, GoldenText) {
    DataChunk d;
    d.tsn = Tsn(42);
    d.payload = Bytes(10, 0);
    d.flags = {false, true, true};
    const Packet p{4000, 5000, 0xDEADBEEF, 0, {d, SackChunk{Tsn(41), 1000, {{2, 3}}, {Tsn(40)}}}};
    EXPECT_EQ(to_string(p),
              "packet 4000->5000 vtag=0xdeadbeef crc=0x00000000 chunks=2\n"
              "  DATA tsn=42 stream=0 ssn=0 flags=-BE len=10\n"
              "  SACK cum=41 a_rwnd=1000 gaps=[(2,3)] dups=[40]\n");
}
