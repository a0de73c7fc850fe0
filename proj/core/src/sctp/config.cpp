#include "sctpdc/sctp/config.hpp"

#include <charconv>
#include <stdexcept>
#include <string>

namespace sctpdc::sctp {

namespace {

unsigned parse_unsigned(std::string_view text, std::string_view what) {
    unsigned v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw std::invalid_argument("bad " + std::string(what) + " value '" + std::string(text) + "'");
    }
    return v;
}

}  // namespace

SackPolicy parse_sack_policy(std::string_view text) {
    if (text == "per-packet") return SackPolicy::per_packet();
    if (text == "lk-double") return SackPolicy::lk_double();
    if (text.starts_with("per-k:")) {
        unsigned k = parse_unsigned(text.substr(6), "per-k");
        if (k == 0) throw std::invalid_argument("per-k needs k >= 1");
        return SackPolicy::per_k(k);
    }
    if (text.starts_with("delayed:")) {
        unsigned ms = parse_unsigned(text.substr(8), "delayed");
        if (ms == 0) throw std::invalid_argument("delayed needs a positive delay");
        return SackPolicy::delayed(sim::msec(ms));
    }
    throw std::invalid_argument("unknown sack policy '" + std::string(text) + "'");
}

std::string to_string(const SackPolicy& p) {
    switch (p.mode) {
        case SackMode::every_packet: return "per-packet";
        case SackMode::lk_double: return "lk-double";
        case SackMode::every_k: return "per-k:" + std::to_string(p.k);
        case SackMode::delayed:
            return "delayed:" + std::to_string(std::chrono::duration_cast<std::chrono::milliseconds>(p.delay).count());
    }
    return "?";
}

std::string_view to_string(AckMode m) { return m == AckMode::sack ? "sack" : "gbn"; }
std::string_view to_string(CopyMode m) { return m == CopyMode::legacy ? "legacy" : "optimized"; }

}  // namespace sctpdc::sctp
