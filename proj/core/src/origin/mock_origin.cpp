#include "iwprobe/origin/mock_origin.hpp"

#include <algorithm>
#include <cstdio>

namespace iwprobe::origin {

using probe::TcpSegment;

std::uint32_t MockOrigin::SessionLog::count(LogKind kind) const {
  std::uint32_t n = 0;
  for (const auto& e : entries)
    if (e.kind == kind) ++n;
  return n;
}

MockOrigin::MockOrigin(sim::Net& net, Endpoint listen, OriginConfig config,
                       std::uint64_t seed)
    : net_(net), listen_(std::move(listen)), config_(std::move(config)),
      rng_(seed) {
  config_.validate();
  net_.listen(listen_, this);
}

MockOrigin::~MockOrigin() { net_.unlisten(listen_); }

MockOrigin::Session& MockOrigin::session_for(const sim::Flow& flow) {
  for (auto& s : sessions_)
    if (s.flow == flow) return s;
  sessions_.emplace_back();
  Session& s = sessions_.back();
  s.flow = flow;
  logs_.emplace_back();
  s.log = &logs_.back();
  s.log->flow = flow;
  return s;
}

void MockOrigin::on_segment(sim::Net&, const sim::Flow& flow,
                            const TcpSegment& seg, TimeNs arrival) {
  Session& s = session_for(flow);
  const std::uint64_t rel =
      seg.has(probe::kSyn)
          ? 0
          : static_cast<std::uint32_t>(seg.seq - (s.peer_isn + 1));
  s.log->entries.push_back(LogEntry{arrival, LogKind::kRecv, rel,
                                    static_cast<std::uint32_t>(seg.payload_len())});
  if (s.closed) return;

  if (seg.has(probe::kRst)) {
    close(s);
    return;
  }
  if (seg.has(probe::kSyn)) {
    handle_syn(s, seg);
    return;
  }
  if (seg.has(probe::kAck)) handle_ack(s, seg);
  if (seg.payload_len() > 0) handle_request_data(s, seg);
}

void MockOrigin::handle_syn(Session& s, const TcpSegment& seg) {
  if (s.synack_sent > 0) return;  // duplicate SYN, peer will see the old SYN/ACK
  s.peer_isn = seg.seq;
  s.peer_mss = seg.mss_option.value_or(536);
  s.peer_ws = seg.window_scale_option.value_or(0);
  s.my_isn = static_cast<std::uint32_t>(rng_());
  // window field in a SYN is never scaled
  s.peer_window = seg.window;

  std::uint16_t my_mss = 1460;
  if (config_.mss_policy.kind == MssPolicy::Kind::kFixed)
    my_mss = config_.mss_policy.fixed_bytes;
  else
    my_mss = s.peer_mss;
  s.segment_size = std::min<std::uint32_t>(my_mss, s.peer_mss);
  s.iw_bytes = config_.iw.in_bytes(s.segment_size);
  s.object_size = config_.object_size;
  s.log->segment_size = s.segment_size;
  s.log->iw_bytes = s.iw_bytes;

  TcpSegment synack;
  synack.seq = s.my_isn;
  synack.ack = s.peer_isn + 1;
  synack.flags = probe::kSyn | probe::kAck;
  synack.window = 65'535;
  if (config_.announce_mss_option) synack.mss_option = my_mss;
  synack.window_scale_option = 0;
  s.synack_sent = net_.world().now();
  net_.transmit(s.flow, synack, /*to_server=*/false,
                ms_to_ns(config_.artificial_rtt_ms));
}

void MockOrigin::handle_ack(Session& s, const TcpSegment& seg) {
  if (!s.established) {
    s.established = true;
    // The pacer derives its rate from this handshake RTT measurement.
    s.rtt_estimate = net_.world().now() - s.synack_sent;
  }
  s.peer_window = static_cast<std::uint64_t>(seg.window) << s.peer_ws;

  const std::uint64_t ack_off =
      static_cast<std::uint32_t>(seg.ack - (s.my_isn + 1));
  if (ack_off > s.snd_una && ack_off <= s.snd_nxt) {
    s.snd_una = ack_off;
    s.consecutive_retrans = 0;
    ++s.rto_generation;  // cancel outstanding timer
    if (s.snd_una < s.snd_nxt) arm_rto(s);
    send_new_data(s);
  }
}

void MockOrigin::handle_request_data(Session& s, const TcpSegment& seg) {
  if (s.responding) return;  // single-resource server, ignore extra data
  s.request_buf += seg.payload;
  if (s.request_buf.find("\r\n\r\n") == std::string::npos) return;

  const bool well_formed =
      s.request_buf.rfind("GET ", 0) == 0 &&
      s.request_buf.find(" HTTP/1.1\r\n") != std::string::npos &&
      s.request_buf.find("Host:") != std::string::npos;
  if (!well_formed) {
    const std::string reply = "HTTP/1.1 400 Bad Request\r\n\r\n";
    s.log->entries.push_back(LogEntry{net_.world().now(), LogKind::kReject, 0,
                                      static_cast<std::uint32_t>(reply.size())});
    TcpSegment out;
    out.seq = s.my_isn + 1;
    out.ack = s.peer_isn + 1 + static_cast<std::uint32_t>(s.request_buf.size());
    out.flags = probe::kAck | probe::kPsh;
    out.window = 65'535;
    out.payload = reply;
    net_.transmit(s.flow, out, false, ms_to_ns(config_.artificial_rtt_ms));
    close(s);
    return;
  }
  s.responding = true;
  start_response(s);
}

void MockOrigin::start_response(Session& s) {
  // Response header is part of the payload stream; everything past it is a
  // deterministic filler pattern. Total length is exactly object_size.
  std::string head = "HTTP/1.1 200 OK\r\nConnection: close\r\nContent-Length: ";
  const std::string tail = "\r\n\r\n";
  if (head.size() + tail.size() + 20 < s.object_size) {
    const std::uint64_t body =
        s.object_size - head.size() - tail.size() - 20;
    char digits[21];
    std::snprintf(digits, sizeof digits, "%020llu",
                  static_cast<unsigned long long>(body));
    s.response_head = head + digits + tail;
  } else {
    s.response_head.clear();  // tiny objects: raw filler only
  }

  const std::uint64_t flight =
      std::min({s.iw_bytes, s.object_size, s.peer_window});
  s.log->first_flight_bytes = flight;
  const std::uint32_t nsegs = static_cast<std::uint32_t>(
      (flight + s.segment_size - 1) / s.segment_size);
  const auto offsets = pacing_schedule(config_, s.segment_size, nsegs,
                                       s.iw_bytes, s.rtt_estimate);

  std::uint64_t off = 0;
  for (std::uint32_t i = 0; i < nsegs; ++i) {
    const std::uint32_t len = static_cast<std::uint32_t>(
        std::min<std::uint64_t>(s.segment_size, flight - off));
    s.sent.push_back(Session::SentSeg{off, len});
    const bool dropped = drop_first_transmission(s, i, nsegs);
    const TimeNs emit_at = offsets[i];
    if (dropped) {
      // "sent" from the server's perspective: sequence state advances
      s.log->entries.push_back(
          LogEntry{net_.world().now() + emit_at, LogKind::kDrop, off, len});
    } else {
      emit(s, off, len, /*retransmission=*/false, emit_at);
    }
    off += len;
  }
  s.snd_nxt = flight;
  arm_rto(s);
}

bool MockOrigin::drop_first_transmission(const Session&, std::uint32_t index,
                                         std::uint32_t total) {
  switch (config_.drop_plan.kind) {
    case DropPlan::Kind::kNone:
      return false;
    case DropPlan::Kind::kHead:
      return index == 0;
    case DropPlan::Kind::kWithin: {
      std::uint32_t k = std::min(config_.drop_plan.within_index, total);
      return index + 1 == k;
    }
    case DropPlan::Kind::kTail:
      return index + 1 == total;
    case DropPlan::Kind::kRandom:
      return std::uniform_real_distribution<double>(0.0, 1.0)(rng_) <
             config_.drop_plan.probability;
  }
  return false;
}

void MockOrigin::emit(Session& s, std::uint64_t offset, std::uint32_t len,
                      bool retransmission, TimeNs extra_delay) {
  TcpSegment out;
  out.seq = s.my_isn + 1 + static_cast<std::uint32_t>(offset);
  out.ack = s.peer_isn + 1 + static_cast<std::uint32_t>(s.request_buf.size());
  out.flags = probe::kAck;
  out.window = 65'535;
  out.payload = payload_at(s, offset, len);
  s.log->entries.push_back(
      LogEntry{net_.world().now() + extra_delay,
               retransmission ? LogKind::kRetransmit : LogKind::kSend, offset,
               len});
  net_.transmit(s.flow, out, /*to_server=*/false,
                extra_delay + ms_to_ns(config_.artificial_rtt_ms));
}

void MockOrigin::send_new_data(Session& s) {
  const std::uint64_t limit =
      std::min(s.object_size, s.snd_una + s.peer_window);
  while (s.snd_nxt < limit) {
    const std::uint32_t len = static_cast<std::uint32_t>(std::min<std::uint64_t>(
        s.segment_size, limit - s.snd_nxt));
    s.sent.push_back(Session::SentSeg{s.snd_nxt, len});
    bool dropped = false;
    if (config_.drop_plan.kind == DropPlan::Kind::kRandom)
      dropped = std::uniform_real_distribution<double>(0.0, 1.0)(rng_) <
                config_.drop_plan.probability;
    if (dropped)
      s.log->entries.push_back(
          LogEntry{net_.world().now(), LogKind::kDrop, s.snd_nxt, len});
    else
      emit(s, s.snd_nxt, len, false, 0);
    s.snd_nxt += len;
  }
  if (s.snd_una < s.snd_nxt) arm_rto(s);
}

void MockOrigin::arm_rto(Session& s) {
  const std::uint64_t generation = ++s.rto_generation;
  const TimeNs delay =
      ms_to_ns(config_.rto_ms) * (TimeNs{1} << s.consecutive_retrans);
  net_.world().schedule_after(delay,
                              [this, &s, generation] { on_rto(s, generation); });
}

void MockOrigin::on_rto(Session& s, std::uint64_t generation) {
  if (s.closed || generation != s.rto_generation) return;
  if (s.snd_una >= s.snd_nxt) return;  // nothing outstanding
  if (s.consecutive_retrans >= config_.max_retransmissions) {
    close(s);
    return;
  }
  ++s.consecutive_retrans;
  // earliest unacked segment, original segmentation
  for (const auto& seg : s.sent) {
    if (seg.offset == s.snd_una) {
      bool dropped = false;
      if (config_.drop_plan.kind == DropPlan::Kind::kRandom)
        dropped = std::uniform_real_distribution<double>(0.0, 1.0)(rng_) <
                  config_.drop_plan.probability;
      if (dropped)
        s.log->entries.push_back(LogEntry{net_.world().now(),
                                          LogKind::kRetransmitDrop, seg.offset,
                                          seg.len});
      else
        emit(s, seg.offset, seg.len, /*retransmission=*/true, 0);
      break;
    }
  }
  arm_rto(s);
}

void MockOrigin::close(Session& s) {
  if (s.closed) return;
  s.closed = true;
  ++s.rto_generation;
  s.log->closed = true;
  s.log->entries.push_back(LogEntry{net_.world().now(), LogKind::kClose, 0, 0});
}

std::string MockOrigin::payload_at(const Session& s, std::uint64_t offset,
                                   std::uint32_t len) const {
  static const char kPattern[] = "abcdefghijklmnopqrstuvwxyz0123456789";
  std::string out(len, '\0');
  for (std::uint32_t i = 0; i < len; ++i) {
    const std::uint64_t pos = offset + i;
    out[i] = pos < s.response_head.size()
                 ? s.response_head[pos]
                 : kPattern[pos % (sizeof kPattern - 1)];
  }
  return out;
}

}  // namespace iwprobe::origin
