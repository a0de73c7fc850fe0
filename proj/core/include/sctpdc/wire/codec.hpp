#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>

#include "sctpdc/wire/chunk.hpp"

namespace sctpdc::wire {

enum class CodecErrorKind {
    malformed_header,
    truncated_chunk,
    unknown_chunk_type,
    malformed_chunk,
    checksum_mismatch,
    oversize,
    invalid_packet,
};

std::string_view to_string(CodecErrorKind k);

class CodecError : public std::runtime_error {
public:
    CodecError(CodecErrorKind kind, std::size_t offset, const std::string& detail);

    CodecErrorKind kind() const noexcept { return kind_; }
    // Byte offset in the input (decode) or output (encode) where the problem was found.
    std::size_t offset() const noexcept { return offset_; }

private:
    CodecErrorKind kind_;
    std::size_t offset_;
};

struct CodecOptions {
    // Largest encoded SCTP packet: MTU minus the network-header budget.
    std::size_t max_packet_bytes = 1500 - kNetworkHeaderBytes;
    bool checksum = false;
};

// Size encode_packet would produce, without encoding.
std::size_t encoded_size(const Packet& p);

Bytes encode_packet(const Packet& p, const CodecOptions& opts = {});
Packet decode_packet(std::span<const std::uint8_t> bytes, const CodecOptions& opts = {});

}  // namespace sctpdc::wire
