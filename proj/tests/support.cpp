#include "support.hpp"

#include <algorithm>
#include <sstream>

namespace testsupport {

namespace {

wire::Bytes random_bytes(sim::Rng& rng, std::size_t n) {
    wire::Bytes b(n);
    for (auto& x : b) x = static_cast<std::uint8_t>(rng.next_u32());
    return b;
}

std::size_t pick(sim::Rng& rng, std::size_t lo, std::size_t hi) {
    return lo + static_cast<std::size_t>(rng.next_u64() % (hi - lo + 1));
}

wire::Chunk random_chunk(sim::Rng& rng, std::size_t room) {
    switch (pick(rng, 0, 11)) {
        case 0:
        case 1:
        case 2: {
            if (room < 20) return wire::CookieAckChunk{};
            wire::DataChunk d;
            d.tsn = wire::Tsn(rng.next_u32());
            d.stream = static_cast<wire::StreamId>(rng.next_u32());
            d.ssn = wire::Ssn(static_cast<std::uint16_t>(rng.next_u32()));
            d.flags = {rng.bernoulli(0.5), rng.bernoulli(0.5), rng.bernoulli(0.5)};
            d.payload = random_bytes(rng, pick(rng, 1, std::min<std::size_t>(room - 19, 600)));
            return d;
        }
        case 3:
            if (room < 24) return wire::AbortChunk{};
            return wire::InitChunk{rng.next_u32(), rng.next_u32(), static_cast<std::uint16_t>(rng.next_u32()),
                                   static_cast<std::uint16_t>(rng.next_u32()), wire::Tsn(rng.next_u32())};
        case 4: {
            if (room < 28) return wire::ShutdownAckChunk{};
            wire::InitAckChunk a{rng.next_u32(), rng.next_u32(), 3, 5, wire::Tsn(rng.next_u32()), {}};
            a.cookie = random_bytes(rng, pick(rng, 0, std::min<std::size_t>(room - 24, 64)));
            return a;
        }
        case 5:
            if (room < 8) return wire::CookieAckChunk{};
            return wire::CookieEchoChunk{random_bytes(rng, pick(rng, 0, std::min<std::size_t>(room - 4, 64)))};
        case 6: {
            if (room < 16) return wire::ShutdownCompleteChunk{};
            wire::SackChunk s;
            s.cum_tsn = wire::Tsn(rng.next_u32());
            s.a_rwnd = rng.next_u32();
            const std::size_t budget = (room - 16) / 4;
            const std::size_t n_gaps = pick(rng, 0, std::min<std::size_t>(budget, 6));
            std::uint16_t at = 0;
            for (std::size_t i = 0; i < n_gaps; ++i) {
                const auto start = static_cast<std::uint16_t>(at + 2 + pick(rng, 0, 20));
                const auto end = static_cast<std::uint16_t>(start + pick(rng, 0, 10));
                s.gaps.push_back({start, end});
                at = end;
            }
            const std::size_t n_dups = pick(rng, 0, std::min<std::size_t>(budget - n_gaps, 4));
            for (std::size_t i = 0; i < n_dups; ++i) s.dups.emplace_back(rng.next_u32());
            return s;
        }
        case 7:
            if (room < 20) return wire::AbortChunk{};
            return wire::HeartbeatChunk{rng.next_u64(), rng.next_u32()};
        case 8:
            if (room < 20) return wire::AbortChunk{};
            return wire::HeartbeatAckChunk{rng.next_u64(), rng.next_u32()};
        case 9:
            if (room < 8) return wire::AbortChunk{};
            return wire::ShutdownChunk{wire::Tsn(rng.next_u32())};
        case 10:
            return wire::ShutdownAckChunk{};
        default:
            return wire::AbortChunk{};
    }
}

void put16(wire::Bytes& b, std::size_t at, std::uint16_t v) {
    b[at] = static_cast<std::uint8_t>(v >> 8);
    b[at + 1] = static_cast<std::uint8_t>(v);
}

wire::Bytes encoded(const wire::Chunk& c, bool checksum = false) {
    wire::Packet p{5000, 4000, 0x01020304, 0, {c}};
    return wire::encode_packet(p, {1480, checksum});
}

}  // namespace

wire::Packet random_packet(sim::Rng& rng) {
    wire::Packet p;
    p.src_port = static_cast<std::uint16_t>(rng.next_u32());
    p.dst_port = static_cast<std::uint16_t>(rng.next_u32());
    p.verification_tag = rng.next_u32();
    const std::size_t n = pick(rng, 0, 6);
    std::size_t room = 1480 - wire::kCommonHeaderBytes;
    for (std::size_t i = 0; i < n && room >= 4; ++i) {
        auto c = random_chunk(rng, room);
        room -= wire::chunk_wire_size(c);
        p.chunks.push_back(std::move(c));
    }
    return p;
}

std::vector<MalformedCase> malformed_corpus() {
    using K = wire::CodecErrorKind;
    std::vector<MalformedCase> v;

    v.push_back({"empty input", {}, K::malformed_header, 0});
    v.push_back({"eleven bytes", wire::Bytes(11, 0), K::malformed_header, 0});

    wire::Bytes header_only = encoded(wire::CookieAckChunk{});
    header_only.resize(12);

    auto partial = header_only;
    partial.insert(partial.end(), {11, 0, 0});
    v.push_back({"partial chunk header", partial, K::truncated_chunk, 12});

    auto short_len = encoded(wire::CookieAckChunk{});
    put16(short_len, 14, 2);
    v.push_back({"chunk length below header", short_len, K::malformed_chunk, 12});

    wire::DataChunk d;
    d.tsn = wire::Tsn(9);
    d.flags = {false, true, true};
    d.payload = wire::Bytes(40, 0xaa);
    auto long_len = encoded(d);
    put16(long_len, 14, 200);
    v.push_back({"chunk length past end", long_len, K::truncated_chunk, 12});

    auto unknown = encoded(wire::CookieAckChunk{});
    unknown[12] = 0x40;
    v.push_back({"unknown chunk type", unknown, K::unknown_chunk_type, 12});

    auto short_data = encoded(d);
    put16(short_data, 14, 12);
    v.push_back({"DATA shorter than its header", short_data, K::malformed_chunk, 12});

    wire::DataChunk odd = d;
    odd.payload = wire::Bytes(1, 0x55);
    auto no_pad = encoded(odd);
    no_pad.resize(no_pad.size() - 3);
    v.push_back({"missing padding", no_pad, K::truncated_chunk, 12});

    auto fat_ack = encoded(wire::CookieAckChunk{});
    put16(fat_ack, 14, 8);
    fat_ack.insert(fat_ack.end(), 4, 0);
    v.push_back({"COOKIE_ACK with a body", fat_ack, K::malformed_chunk, 12});

    wire::SackChunk s;
    s.cum_tsn = wire::Tsn(5);
    s.gaps = {{2, 3}, {5, 5}};
    auto sack_count = encoded(s);
    put16(sack_count, 12 + 12, 3);  // claims three gap blocks
    v.push_back({"SACK gap count mismatch", sack_count, K::malformed_chunk, 12});

    auto sack_overlap = encoded(s);
    put16(sack_overlap, 12 + 20, 3);  // second block starts inside the first
    v.push_back({"SACK overlapping gaps", sack_overlap, K::malformed_chunk, 12});

    auto hb = encoded(wire::HeartbeatChunk{1, 0});
    put16(hb, 16, 9);
    v.push_back({"HEARTBEAT bad parameter", hb, K::malformed_chunk, 16});

    wire::InitAckChunk ia{7, 131072, 1, 1, wire::Tsn(3), wire::Bytes(8, 1)};
    auto init_ack = encoded(ia);
    put16(init_ack, 12 + 20, 8);
    v.push_back({"INIT_ACK without state cookie", init_ack, K::malformed_chunk, 32});

    auto init = encoded(wire::InitChunk{7, 131072, 1, 1, wire::Tsn(3)});
    put16(init, 14, 24);
    init.insert(init.end(), 4, 0);
    v.push_back({"INIT with trailing bytes", init, K::malformed_chunk, 12});

    wire::Packet two{5000, 4000, 1, 0, {wire::CookieAckChunk{}, d}};
    auto second = wire::encode_packet(two);
    second.resize(second.size() - 8);
    v.push_back({"second chunk truncated", second, K::truncated_chunk, 16});

    auto flipped = encoded(d, true);
    flipped.back() ^= 0x01;
    v.push_back({"flipped payload bit", flipped, K::checksum_mismatch, 8, true});

    return v;
}

std::pair<sctp::Tcb, sctp::Tcb> established_tcbs(const sctp::AssocConfig& cfg, std::size_t n_paths) {
    sctp::Listener l;
    l.config = cfg;
    l.port = 5000;
    l.n_paths = n_paths;
    l.secret.fill(0x5A);
    l.rng = sim::Rng(100);
    auto [client, init] = sctp::assoc_init(cfg, n_paths, 4000, 5000, sim::Time{}, sim::Rng(200));
    const auto ack = sctp::listener_on_init(l, std::get<wire::InitChunk>(init.chunks.at(0)), 4000, sim::Time{});
    const auto echo = sctp::on_init_ack(client, std::get<wire::InitAckChunk>(ack.chunks.at(0)), sim::Time{});
    auto r = sctp::listener_on_cookie_echo(l, std::get<wire::CookieEchoChunk>(echo->chunks.at(0)), sim::Time{});
    sctp::on_cookie_ack(client, sim::Time{});
    return {std::move(client), std::move(*r.tcb)};
}

SctpPair::SctpPair(std::uint64_t seed, sim::LinkParams params, sim::Duration jitter_)
    : rng(seed),
      ab(sim, params, rng.split("link:ab"), "ab"),
      ba(sim, params, rng.split("link:ba"), "ba"),
      a(sim, "a", rng.split("host:a"), &ledger),
      b(sim, "b", rng.split("host:b"), &ledger),
      jitter(jitter_),
      jitter_rng(rng.split("jitter")) {
    a.add_path(ab);
    b.add_path(ba);
    auto deliver = [this](sctp::Host& to) {
        return [this, &to](sim::Frame f) {
            if (jitter.count() == 0) {
                to.receive(0, std::move(f));
                return;
            }
            const auto extra = sim::Duration(static_cast<std::int64_t>(jitter_rng.next_u64() %
                                                                       static_cast<std::uint64_t>(jitter.count())));
            sim.schedule(extra, [&to, f = std::move(f)]() mutable { to.receive(0, std::move(f)); });
        };
    };
    ab.set_sink(deliver(b));
    ba.set_sink(deliver(a));
}

std::string reliability_instance(std::uint64_t seed, sctp::AckMode mode) {
    sim::Rng plan(seed);
    sim::LinkParams lp;
    lp.drop_prob = plan.uniform() * 0.15;
    const auto jitter = sim::usec(static_cast<std::int64_t>(plan.next_u64() % 40));
    SctpPair net(seed, lp, jitter);

    const std::size_t n_msgs = 1 + plan.next_u64() % 50;
    const auto n_streams = static_cast<std::uint16_t>(1 + plan.next_u64() % 3);

    struct Msg {
        wire::StreamId stream;
        bool ordered;
        wire::Bytes payload;
    };
    std::vector<Msg> msgs;
    for (std::size_t i = 0; i < n_msgs; ++i) {
        Msg m{static_cast<wire::StreamId>(plan.next_u64() % n_streams), !plan.bernoulli(0.15), {}};
        const std::size_t size = plan.bernoulli(0.3) ? 1453 + plan.next_u64() % 4000 : 1 + plan.next_u64() % 1400;
        m.payload.resize(size);
        for (auto& x : m.payload) x = static_cast<std::uint8_t>(plan.next_u32());
        m.payload[0] = static_cast<std::uint8_t>(i);
        msgs.push_back(std::move(m));
    }

    sctp::AssocConfig cfg;
    cfg.streams_out = cfg.streams_in = n_streams;
    cfg.ack_mode = mode;
    cfg.no_delay = plan.bernoulli(0.5);

    std::map<wire::StreamId, std::vector<wire::Bytes>> got_ordered, got_unordered;
    std::size_t delivered = 0;
    sctp::AssocEvents server;
    server.on_message = [&](sctp::Association&, const sctp::InboundMessage& m) {
        (m.unordered ? got_unordered : got_ordered)[m.stream].push_back(m.payload);
        if (++delivered == msgs.size()) net.sim.stop();
    };
    net.b.listen(5000, cfg, server);

    std::string failure;
    sctp::AssocEvents client;
    client.on_established = [&](sctp::Association& as) {
        for (const auto& m : msgs) {
            if (auto r = as.send(m.stream, m.payload, m.ordered); !r) {
                failure = "submit rejected: " + std::string(sctp::to_string(r.status));
            }
        }
    };
    net.a.connect(4000, 5000, cfg, client);
    net.sim.run_until(sim::Time(sim::sec(600)));
    if (!failure.empty()) return failure;

    std::map<wire::StreamId, std::vector<wire::Bytes>> want_ordered, want_unordered;
    for (const auto& m : msgs) (m.ordered ? want_ordered : want_unordered)[m.stream].push_back(m.payload);
    for (auto& [s, v] : want_unordered) std::sort(v.begin(), v.end());
    for (auto& [s, v] : got_unordered) std::sort(v.begin(), v.end());

    std::ostringstream os;
    if (want_ordered != got_ordered) {
        os << "ordered sequence mismatch (seed " << seed << ")";
    } else if (want_unordered != got_unordered) {
        os << "unordered multiset mismatch (seed " << seed << ")";
    } else if (delivered != msgs.size()) {
        os << "delivered " << delivered << " of " << msgs.size() << " (seed " << seed << ")";
    }
    return os.str();
}

}  // namespace testsupport
