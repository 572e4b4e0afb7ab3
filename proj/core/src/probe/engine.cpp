#include "iwprobe/probe/engine.hpp"

#include <algorithm>
#include <random>

#include "iwprobe/estimate/estimator.hpp"

namespace iwprobe::probe {

namespace {

void record(ProbeTrace& trace, Direction dir, std::uint64_t seq_offset,
            std::uint32_t len, TcpFlags flags, TimeNs ts,
            std::uint32_t window) {
  trace.events.push_back(SegmentEvent{dir, seq_offset, len, flags, ts, window});
}

void record_inbound(ProbeTrace& trace, const ConnectionState& conn,
                    const Delivered& d) {
  const auto& seg = d.segment;
  std::uint64_t offset = 0;
  if (seg.payload_len() > 0)
    offset = static_cast<std::uint32_t>(seg.seq - (conn.server_isn + 1));
  record(trace, Direction::kInbound, offset,
         static_cast<std::uint32_t>(seg.payload_len()), seg.flags,
         d.arrival_ns, seg.window);
}

bool permitted(SendPermitter* permit) { return permit == nullptr || permit->acquire(); }

}  // namespace

std::string http_request(const ProbeSpec& spec) {
  return "GET " + spec.resource_path + " HTTP/1.1\r\nHost: " + spec.host_name +
         "\r\nConnection: close\r\n\r\n";
}

std::optional<ConnectionState> open_handshake(const ProbeSpec& spec,
                                              Transport& transport,
                                              ProbeTrace& trace,
                                              SendPermitter* permit) {
  spec.validate();
  ConnectionState conn;
  std::mt19937_64 rng(spec.rng_seed * 0x9e3779b97f4a7c15ULL + 1);
  conn.client_isn = static_cast<std::uint32_t>(rng());

  if (!permitted(permit)) return std::nullopt;
  TcpSegment syn;
  syn.seq = conn.client_isn;
  syn.flags = kSyn;
  syn.window = spec.announced_window;
  syn.mss_option = spec.announced_mss;
  syn.window_scale_option = spec.window_scale;
  const TimeNs t_syn = transport.now();
  transport.send(syn);
  record(trace, Direction::kOutbound, 0, 0, kSyn, t_syn, syn.window);

  const TimeNs deadline = t_syn + ms_to_ns(spec.probe_timeout_ms);
  std::optional<Delivered> synack;
  while (!synack) {
    auto d = transport.receive(deadline);
    if (!d) return std::nullopt;  // handshake timeout
    if (d->segment.has(kRst)) {
      record_inbound(trace, conn, *d);
      return std::nullopt;
    }
    if (d->segment.has(kSyn) && d->segment.has(kAck) &&
        d->segment.ack == conn.client_isn + 1) {
      synack = d;
    } else {
      record_inbound(trace, conn, *d);  // stray, keep for the record
    }
  }

  conn.server_isn = synack->segment.seq;
  conn.server_mss = synack->segment.mss_option;
  conn.handshake_rtt_ns = synack->arrival_ns - t_syn;
  trace.server_mss = conn.server_mss;
  trace.handshake_rtt_ns = conn.handshake_rtt_ns;
  record_inbound(trace, conn, *synack);

  if (spec.handshake_ack_delay_ms > 0)
    transport.sleep_until(synack->arrival_ns +
                          ms_to_ns(spec.handshake_ack_delay_ms));

  if (!permitted(permit)) return std::nullopt;
  TcpSegment ack;
  ack.seq = conn.client_isn + 1;
  ack.ack = conn.server_isn + 1;
  ack.flags = kAck;
  ack.window = spec.announced_window;
  transport.send(ack);
  record(trace, Direction::kOutbound, 0, 0, kAck, transport.now(), ack.window);

  conn.snd_nxt = conn.client_isn + 1;
  conn.open = true;
  return conn;
}

ProbeTrace probe_once(const ProbeSpec& spec, Transport& transport,
                      SendPermitter* permit) {
  ProbeTrace trace;
  trace.spec = spec;
  const TimeNs t_start = transport.now();
  const TimeNs hard_deadline = t_start + ms_to_ns(spec.probe_timeout_ms);

  auto conn_opt = open_handshake(spec, transport, trace, permit);
  if (!conn_opt) {
    trace.outcome = ProbeOutcome::kHandshakeFailed;
    return trace;
  }
  ConnectionState conn = *conn_opt;

  // Phase 2: request, then stay silent until the overlap rule fires.
  if (!permitted(permit)) {
    trace.outcome = ProbeOutcome::kAborted;
    return trace;
  }
  TcpSegment get;
  get.seq = conn.snd_nxt;
  get.ack = conn.server_isn + 1;
  get.flags = kAck | kPsh;
  get.window = spec.announced_window;
  get.payload = http_request(spec);
  transport.send(get);
  record(trace, Direction::kOutbound, 0,
         static_cast<std::uint32_t>(get.payload.size()), get.flags,
         transport.now(), get.window);
  conn.snd_nxt += static_cast<std::uint32_t>(get.payload.size());

  const TimeNs collect_deadline =
      std::min(transport.now() + ms_to_ns(spec.retransmission_wait_ms),
               hard_deadline);
  estimate::RetransmissionDetector detector;
  bool terminal = false;
  bool got_rst = false;
  while (!terminal) {
    auto d = transport.receive(collect_deadline);
    if (!d) break;
    record_inbound(trace, conn, *d);
    if (d->segment.has(kRst)) {
      got_rst = true;
      break;
    }
    if (d->segment.payload_len() > 0) {
      const std::uint64_t off =
          static_cast<std::uint32_t>(d->segment.seq - (conn.server_isn + 1));
      terminal = detector.feed(off, d->segment.payload_len());
    }
  }

  if (got_rst) {
    trace.outcome = ProbeOutcome::kAborted;
    conn.open = false;  // peer reset; nothing left to tear down
    return trace;
  }
  if (!terminal) {
    trace.outcome = detector.seen().empty() ? ProbeOutcome::kNoData
                                            : ProbeOutcome::kNoRetransmission;
    abort_connection(conn, transport, trace, permit);
    return trace;
  }

  // Phase 3: acknowledge everything and watch for a continuation.
  trace.verified_full = verify_iw_full(conn, spec, transport, trace,
                                       detector.seen().max_end(),
                                       hard_deadline, permit);
  trace.outcome = ProbeOutcome::kCompleted;

  // Phase 4.
  abort_connection(conn, transport, trace, permit);
  return trace;
}

bool verify_iw_full(ConnectionState& conn, const ProbeSpec& spec,
                    Transport& transport, ProbeTrace& trace,
                    std::uint64_t span_end, TimeNs deadline,
                    SendPermitter* permit) {
  if (!permitted(permit)) return false;
  const std::uint32_t window_bytes = 2u * spec.announced_mss;
  TcpSegment ack;
  ack.seq = conn.snd_nxt;
  ack.ack = conn.server_isn + 1 + static_cast<std::uint32_t>(span_end);
  ack.flags = kAck;
  ack.window = static_cast<std::uint16_t>(
      (window_bytes + (1u << spec.window_scale) - 1) >> spec.window_scale);
  transport.send(ack);
  record(trace, Direction::kOutbound, span_end, 0, kAck, transport.now(),
         ack.window);

  const TimeNs wait_deadline =
      std::min(transport.now() + ms_to_ns(spec.retransmission_wait_ms),
               deadline);
  while (true) {
    auto d = transport.receive(wait_deadline);
    if (!d) return false;  // ran out of data: estimate is a lower bound
    record_inbound(trace, conn, *d);
    if (d->segment.has(kRst)) {
      conn.open = false;
      return false;
    }
    if (d->segment.payload_len() == 0) continue;
    const std::uint64_t off =
        static_cast<std::uint32_t>(d->segment.seq - (conn.server_isn + 1));
    if (off + d->segment.payload_len() > span_end) return true;
  }
}

void abort_connection(ConnectionState& conn, Transport& transport,
                      ProbeTrace& trace, SendPermitter* permit) {
  if (!conn.open) return;
  if (!permitted(permit)) return;
  TcpSegment rst;
  rst.seq = conn.snd_nxt;
  rst.flags = kRst;
  transport.send(rst);
  record(trace, Direction::kOutbound, 0, 0, kRst, transport.now(), 0);
  conn.open = false;
}

}  // namespace iwprobe::probe
