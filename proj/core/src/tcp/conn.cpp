#include "sctpdc/tcp/conn.hpp"

#include <algorithm>
#include <stdexcept>

namespace sctpdc::tcp {

namespace {

void put(std::vector<std::uint8_t>& out, std::uint64_t v, int bytes) {
    for (int i = bytes - 1; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get(std::span<const std::uint8_t> b, std::size_t& off, int bytes) {
    if (off + static_cast<std::size_t>(bytes) > b.size()) throw std::runtime_error("truncated tcp segment");
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) v = (v << 8) | b[off++];
    return v;
}

Duration clamp(Duration d, const TcpConfig& c) { return std::clamp(d, c.rto_min, c.rto_max); }

void rtt_sample(TcpConn& c, Duration sample) {
    if (!c.has_rtt) {
        c.srtt = sample;
        c.rttvar = sample / 2;
        c.has_rtt = true;
    } else {
        const Duration err = c.srtt > sample ? c.srtt - sample : sample - c.srtt;
        c.rttvar = (3 * c.rttvar + err) / 4;
        c.srtt = (7 * c.srtt + sample) / 8;
    }
    c.rto = clamp(c.srtt + 4 * c.rttvar, c.config);
}

std::vector<SackBlock> ooo_blocks(const TcpConn& c, std::size_t limit) {
    std::vector<SackBlock> out;
    for (const auto& [seq, bytes] : c.ooo) {
        const Seq end = seq + static_cast<std::uint32_t>(bytes.size());
        if (!out.empty() && out.back().end == seq) {
            out.back().end = end;
        } else {
            if (out.size() == limit) break;
            out.push_back({seq, end});
        }
    }
    return out;
}

Segment make_ack(TcpConn& c) {
    Segment a;
    a.src_port = c.local_port;
    a.dst_port = c.peer_port;
    a.seq = c.snd_nxt;
    a.ack = c.rcv_nxt;
    a.window = c.advertised_window();
    if (c.config.sack_enabled) a.sacks = ooo_blocks(c, 3);
    c.unacked_segments = 0;
    ++c.counters.acks_sent;
    return a;
}

Segment data_segment(TcpConn& c, Seq start, std::size_t len) {
    Segment s;
    s.src_port = c.local_port;
    s.dst_port = c.peer_port;
    s.seq = start;
    s.ack = c.rcv_nxt;
    s.window = c.advertised_window();
    const std::size_t off = start.distance_from(c.snd_una);
    s.payload.assign(c.send_buf.begin() + static_cast<std::ptrdiff_t>(off),
                     c.send_buf.begin() + static_cast<std::ptrdiff_t>(off + len));
    ++c.counters.segments_sent;
    if (start < c.snd_max) ++c.counters.segments_retransmitted;
    return s;
}

void merge_scoreboard(TcpConn& c, const std::vector<SackBlock>& blocks) {
    for (const auto& b : blocks) {
        if (b.end <= c.snd_una || b.start >= b.end) continue;
        c.scoreboard.push_back(b);
    }
    std::erase_if(c.scoreboard, [&](const SackBlock& b) { return b.end <= c.snd_una; });
    std::sort(c.scoreboard.begin(), c.scoreboard.end(),
              [](const SackBlock& a, const SackBlock& b) { return a.start < b.start; });
    std::vector<SackBlock> merged;
    for (const auto& b : c.scoreboard) {
        if (!merged.empty() && b.start <= merged.back().end) {
            if (b.end > merged.back().end) merged.back().end = b.end;
        } else {
            merged.push_back(b);
        }
    }
    c.scoreboard = std::move(merged);
}

}  // namespace

std::vector<std::uint8_t> encode_segment(const Segment& s) {
    std::vector<std::uint8_t> out;
    out.reserve(kTcpHeaderBytes + 8 * s.sacks.size() + s.payload.size());
    put(out, s.src_port, 2);
    put(out, s.dst_port, 2);
    put(out, s.seq.value, 4);
    put(out, s.ack.value, 4);
    put(out, s.window, 4);
    put(out, s.sacks.size(), 2);
    put(out, 0, 2);
    for (const auto& b : s.sacks) {
        put(out, b.start.value, 4);
        put(out, b.end.value, 4);
    }
    out.insert(out.end(), s.payload.begin(), s.payload.end());
    return out;
}

Segment decode_segment(std::span<const std::uint8_t> b) {
    Segment s;
    std::size_t off = 0;
    s.src_port = static_cast<std::uint16_t>(get(b, off, 2));
    s.dst_port = static_cast<std::uint16_t>(get(b, off, 2));
    s.seq = Seq(static_cast<std::uint32_t>(get(b, off, 4)));
    s.ack = Seq(static_cast<std::uint32_t>(get(b, off, 4)));
    s.window = static_cast<std::uint32_t>(get(b, off, 4));
    const auto n = get(b, off, 2);
    off += 2;
    for (std::uint64_t i = 0; i < n; ++i) {
        SackBlock blk;
        blk.start = Seq(static_cast<std::uint32_t>(get(b, off, 4)));
        blk.end = Seq(static_cast<std::uint32_t>(get(b, off, 4)));
        s.sacks.push_back(blk);
    }
    if (off > b.size()) throw std::runtime_error("truncated tcp segment");
    s.payload.assign(b.begin() + static_cast<std::ptrdiff_t>(off), b.end());
    return s;
}

std::size_t segment_wire_bytes(const Segment& s) {
    // IP (20) + TCP (20) + SACK option (2 + 8n, padded to 4) + payload.
    const std::size_t opt = s.sacks.empty() ? 0 : (2 + 8 * s.sacks.size() + 3) / 4 * 4;
    return 40 + opt + s.payload.size();
}

std::uint32_t TcpConn::advertised_window() const {
    return ooo_bytes >= config.rwnd ? 0 : static_cast<std::uint32_t>(config.rwnd - ooo_bytes);
}

TcpConn make_conn(const TcpConfig& config, std::uint16_t local_port, std::uint16_t peer_port, Seq local_isn,
                  Seq peer_isn) {
    TcpConn c;
    c.config = config;
    c.local_port = local_port;
    c.peer_port = peer_port;
    c.snd_una = c.snd_nxt = c.snd_max = local_isn;
    c.rcv_nxt = peer_isn;
    c.cwnd = static_cast<std::uint32_t>(2 * config.mss());
    c.ssthresh = config.rwnd;
    c.peer_window = config.rwnd;
    c.rto = clamp(config.rto_initial, config);
    return c;
}

TcpSubmitStatus tcp_submit(TcpConn& conn, std::span<const std::uint8_t> bytes) {
    if (!conn.send_buf.empty() && conn.send_buf.size() + bytes.size() > conn.config.send_buffer) {
        return TcpSubmitStatus::buffer_full;
    }
    conn.send_buf.insert(conn.send_buf.end(), bytes.begin(), bytes.end());
    conn.counters.bytes_submitted += bytes.size();
    return TcpSubmitStatus::ok;
}

std::vector<Segment> tcp_send(TcpConn& c, Time now) {
    std::vector<Segment> out;
    const std::size_t mss = c.config.mss();

    if (c.retransmit_pending) {
        c.retransmit_pending = false;
        Seq start = c.snd_una;
        Seq limit = c.snd_max;
        if (c.config.sack_enabled && c.retransmit_hint) {
            start = std::max(*c.retransmit_hint, c.snd_una);
            for (const auto& b : c.scoreboard) {
                if (b.start <= start && start < b.end) start = b.end;
            }
            limit = c.scoreboard.empty() ? c.snd_una : c.scoreboard.back().end;
            for (const auto& b : c.scoreboard) {
                if (b.start > start) {
                    limit = std::min(limit, b.start);
                    break;
                }
            }
        }
        if (start < limit) {
            const std::size_t len = std::min<std::size_t>(mss, limit.distance_from(start));
            out.push_back(data_segment(c, start, len));
            c.retransmit_hint = start + static_cast<std::uint32_t>(len);
        }
    }

    const std::size_t window = std::min<std::size_t>(c.cwnd, c.peer_window);
    while (c.unsent() > 0) {
        const std::size_t flight = c.flight();
        if (flight >= window) break;
        const std::size_t unsent = c.unsent();
        std::size_t len = std::min({mss, unsent, window - flight});
        if (len < mss) {
            if (len < unsent && flight > 0) break;        // window-limited sliver
            if (c.config.nagle && flight > 0) break;      // Nagle: hold the tail
        }
        const bool fresh = c.snd_nxt == c.snd_max;
        out.push_back(data_segment(c, c.snd_nxt, len));
        c.snd_nxt = c.snd_nxt + static_cast<std::uint32_t>(len);
        if (c.snd_max < c.snd_nxt) c.snd_max = c.snd_nxt;
        if (fresh && !c.timing) c.timing = {{c.snd_nxt, now}};
    }
    return out;
}

AckEffects tcp_on_ack(TcpConn& c, const Segment& a, Time now) {
    AckEffects fx;
    ++c.counters.acks_received;
    if (a.ack < c.snd_una || a.ack > c.snd_max) {
        fx.ignored = true;
        return fx;
    }
    c.peer_window = a.window;
    if (c.config.sack_enabled) merge_scoreboard(c, a.sacks);
    const std::uint32_t mss = static_cast<std::uint32_t>(c.config.mss());

    if (a.ack > c.snd_una) {
        const std::size_t n = a.ack.distance_from(c.snd_una);
        c.send_buf.erase(c.send_buf.begin(), c.send_buf.begin() + static_cast<std::ptrdiff_t>(n));
        c.snd_una = a.ack;
        if (c.snd_nxt < c.snd_una) c.snd_nxt = c.snd_una;
        fx.newly_acked = n;
        c.dupacks = 0;
        if (c.config.sack_enabled) merge_scoreboard(c, {});
        if (c.timing && a.ack >= c.timing->first) {
            rtt_sample(c, now - c.timing->second);
            c.timing.reset();
        }
        if (c.in_recovery) {
            // Reno leaves recovery on the first new ack; with SACK, only once
            // everything outstanding at entry is covered.
            if (!c.config.sack_enabled || a.ack >= c.recover) {
                c.in_recovery = false;
                c.cwnd = c.ssthresh;
                c.retransmit_hint.reset();
            } else {
                c.retransmit_pending = true;
            }
        } else if (c.cwnd < c.ssthresh) {
            c.cwnd += mss;
        } else {
            c.cwnd += std::max<std::uint32_t>(1, mss * mss / c.cwnd);
        }
        return fx;
    }

    if (a.payload.empty() && c.flight() > 0) {
        fx.duplicate = true;
        ++c.dupacks;
        ++c.counters.dup_acks;
        if (c.dupacks == c.config.dupthresh && !c.in_recovery) {
            c.ssthresh = std::max<std::uint32_t>(static_cast<std::uint32_t>(c.flight() / 2), 2 * mss);
            c.cwnd = c.ssthresh + (c.config.window_inflation ? 3 * mss : 0);
            c.in_recovery = true;
            c.recover = c.snd_max;
            c.retransmit_pending = true;
            c.retransmit_hint = c.snd_una;
            c.timing.reset();
            ++c.counters.fast_retransmits;
            fx.fast_retransmit = true;
        } else if (c.in_recovery && c.dupacks > c.config.dupthresh) {
            if (c.config.sack_enabled) c.retransmit_pending = true;
            if (c.config.window_inflation) c.cwnd += mss;
        }
    }
    return fx;
}

void tcp_on_rto(TcpConn& c, Time) {
    const std::uint32_t mss = static_cast<std::uint32_t>(c.config.mss());
    c.ssthresh = std::max<std::uint32_t>(static_cast<std::uint32_t>(c.flight() / 2), 2 * mss);
    c.cwnd = mss;
    c.snd_nxt = c.snd_una;  // resend from the first unacked byte
    c.rto = std::min(c.rto * 2, c.config.rto_max);
    c.dupacks = 0;
    c.in_recovery = false;
    c.retransmit_pending = false;
    c.retransmit_hint.reset();
    c.scoreboard.clear();
    c.timing.reset();
    ++c.counters.timeouts;
}

ReceiveResult tcp_receiver(TcpConn& c, const Segment& seg, Time) {
    ReceiveResult r;
    if (seg.payload.empty()) return r;
    const std::uint32_t len = static_cast<std::uint32_t>(seg.payload.size());
    const Seq end = seg.seq + len;

    auto deliver_from = [&](Seq start, const std::vector<std::uint8_t>& bytes) {
        // Deliver the part of [start, start+len) beyond rcv_nxt.
        const std::size_t skip = c.rcv_nxt.distance_from(start);
        if (skip >= bytes.size()) return;
        r.delivered.insert(r.delivered.end(), bytes.begin() + static_cast<std::ptrdiff_t>(skip), bytes.end());
        c.rcv_nxt = start + static_cast<std::uint32_t>(bytes.size());
    };

    bool immediate = false;
    if (seg.seq <= c.rcv_nxt && end > c.rcv_nxt) {
        const bool filling = !c.ooo.empty();
        deliver_from(seg.seq, seg.payload);
        while (!c.ooo.empty() && c.ooo.begin()->first <= c.rcv_nxt) {
            auto it = c.ooo.begin();
            c.ooo_bytes -= it->second.size();
            if (it->first + static_cast<std::uint32_t>(it->second.size()) > c.rcv_nxt) deliver_from(it->first, it->second);
            c.ooo.erase(it);
        }
        immediate = filling || seg.seq != c.rcv_nxt - static_cast<std::uint32_t>(r.delivered.size());
        if (!immediate && ++c.unacked_segments < c.config.delayed_ack_segments) {
            r.arm_delayed_ack = true;
        } else {
            immediate = true;
        }
    } else if (seg.seq > c.rcv_nxt) {
        ++c.counters.ooo_segments;
        if (!c.ooo.contains(seg.seq) && c.ooo_bytes + len <= c.config.rwnd) {
            c.ooo.emplace(seg.seq, seg.payload);
            c.ooo_bytes += len;
        }
        immediate = true;
    } else {
        immediate = true;  // entirely old: re-ack
    }
    c.counters.bytes_delivered += r.delivered.size();
    if (immediate) r.ack = make_ack(c);
    return r;
}

std::optional<Segment> tcp_delayed_ack(TcpConn& c) {
    if (c.unacked_segments == 0) return std::nullopt;
    return make_ack(c);
}

}  // namespace sctpdc::tcp
