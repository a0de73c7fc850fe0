#pragma once

#include <string>

#include "sctpdc/wire/chunk.hpp"

namespace sctpdc::wire {

// Human-readable dump of a packet, one line per chunk. Stable output,
// used by golden-file tests and the --trace option of the CLI.
std::string to_string(const Packet& p);
std::string to_string(const Chunk& c);

}  // namespace sctpdc::wire
