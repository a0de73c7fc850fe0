#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sctpdc/sctp/assoc.hpp"
#include "sctpdc/sctp/endpoint.hpp"
#include "sctpdc/sim/cost_ledger.hpp"
#include "sctpdc/sim/link.hpp"
#include "sctpdc/wire/codec.hpp"

namespace testsupport {

using namespace sctpdc;

// Random valid packet whose encoding fits the default 1480-byte budget.
wire::Packet random_packet(sim::Rng& rng);

struct MalformedCase {
    std::string name;
    wire::Bytes bytes;
    wire::CodecErrorKind kind;
    std::size_t offset;
    bool checksum = false;
};

std::vector<MalformedCase> malformed_corpus();

// Client and server TCBs taken through the four-message handshake.
std::pair<sctp::Tcb, sctp::Tcb> established_tcbs(const sctp::AssocConfig& cfg, std::size_t n_paths = 1);

// Two single-homed hosts joined by a pair of links. With jitter > 0 each
// frame is held for a uniform extra delay after leaving the link, which
// reorders traffic.
struct SctpPair {
    explicit SctpPair(std::uint64_t seed, sim::LinkParams params = {}, sim::Duration jitter = {});

    sim::Simulator sim;
    sim::Rng rng;
    sim::CostLedger ledger;
    sim::Link ab;
    sim::Link ba;
    sctp::Host a;
    sctp::Host b;
    sim::Duration jitter;
    sim::Rng jitter_rng;
};

// One randomized reliability instance: up to 50 messages over up to three
// streams with random drops and reordering. Returns an empty string when
// every stream delivered exactly what was submitted, else a description
// of the first mismatch.
std::string reliability_instance(std::uint64_t seed, sctp::AckMode mode);

}  // namespace testsupport
