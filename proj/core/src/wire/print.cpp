#include "sctpdc/wire/print.hpp"

#include <iomanip>
#include <sstream>

namespace sctpdc::wire {

namespace {

std::string hex32(std::uint32_t v) {
    std::ostringstream os;
    os << "0x" << std::hex << std::setw(8) << std::setfill('0') << v;
    return os.str();
}

}  // namespace

std::string to_string(const Chunk& c) {
    std::ostringstream os;
    os << to_string(chunk_type(c));
    std::visit(
        [&](const auto& ch) {
            using T = std::decay_t<decltype(ch)>;
            if constexpr (std::is_same_v<T, DataChunk>) {
                os << " tsn=" << ch.tsn << " stream=" << ch.stream << " ssn=" << ch.ssn << " flags=";
                os << (ch.flags.unordered ? 'U' : '-') << (ch.flags.begin_fragment ? 'B' : '-')
                   << (ch.flags.end_fragment ? 'E' : '-');
                os << " len=" << ch.payload.size();
            } else if constexpr (std::is_same_v<T, InitChunk> || std::is_same_v<T, InitAckChunk>) {
                os << " init_tag=" << hex32(ch.init_tag) << " a_rwnd=" << ch.a_rwnd << " out=" << ch.n_out_streams
                   << " in=" << ch.n_in_streams << " initial_tsn=" << ch.initial_tsn;
                if constexpr (std::is_same_v<T, InitAckChunk>) {
                    os << " cookie=" << ch.cookie.size() << "B";
                }
            } else if constexpr (std::is_same_v<T, CookieEchoChunk>) {
                os << " cookie=" << ch.cookie.size() << "B";
            } else if constexpr (std::is_same_v<T, SackChunk>) {
                os << " cum=" << ch.cum_tsn << " a_rwnd=" << ch.a_rwnd << " gaps=[";
                for (std::size_t i = 0; i < ch.gaps.size(); ++i) {
                    os << (i ? "," : "") << '(' << ch.gaps[i].start << ',' << ch.gaps[i].end << ')';
                }
                os << "] dups=[";
                for (std::size_t i = 0; i < ch.dups.size(); ++i) {
                    os << (i ? "," : "") << ch.dups[i];
                }
                os << ']';
            } else if constexpr (std::is_same_v<T, HeartbeatChunk> || std::is_same_v<T, HeartbeatAckChunk>) {
                os << " nonce=" << ch.nonce << " path=" << ch.path_id;
            } else if constexpr (std::is_same_v<T, ShutdownChunk>) {
                os << " cum=" << ch.cum_tsn;
            }
        },
        c);
    return os.str();
}

std::string to_string(const Packet& p) {
    std::ostringstream os;
    os << "packet " << p.src_port << "->" << p.dst_port << " vtag=" << hex32(p.verification_tag)
       << " crc=" << hex32(p.checksum) << " chunks=" << p.chunks.size() << '\n';
    for (const auto& c : p.chunks) {
        os << "  " << to_string(c) << '\n';
    }
    return os.str();
}

}  // namespace sctpdc::wire
