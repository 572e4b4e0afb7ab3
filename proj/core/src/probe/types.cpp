#include "iwprobe/probe/types.hpp"

#include <stdexcept>

namespace iwprobe::probe {

std::string flags_to_string(TcpFlags flags) {
  std::string s;
  if (flags & kSyn) s += 'S';
  if (flags & kAck) s += 'A';
  if (flags & kFin) s += 'F';
  if (flags & kRst) s += 'R';
  if (flags & kPsh) s += 'P';
  return s;
}

TcpFlags flags_from_string(const std::string& s) {
  TcpFlags f = 0;
  for (char c : s) {
    switch (c) {
      case 'S': f |= kSyn; break;
      case 'A': f |= kAck; break;
      case 'F': f |= kFin; break;
      case 'R': f |= kRst; break;
      case 'P': f |= kPsh; break;
      default: throw std::invalid_argument("unknown flag char");
    }
  }
  return f;
}

void ProbeSpec::validate() const {
  if (announced_mss < 64 || announced_mss > 1460)
    throw std::invalid_argument("announced_mss must be in [64, 1460]");
  const std::uint64_t effective_window =
      static_cast<std::uint64_t>(announced_window) << window_scale;
  if (effective_window < (1u << 20))
    throw std::invalid_argument("announced window * 2^scale must be >= 1 MiB");
  if (retransmission_wait_ms >= probe_timeout_ms)
    throw std::invalid_argument("retransmission_wait must be < probe_timeout");
  if (retransmission_wait_ms <= 0 || probe_timeout_ms <= 0)
    throw std::invalid_argument("timeouts must be positive");
  if (target.host.empty()) throw std::invalid_argument("target host empty");
}

std::string to_string(ProbeOutcome o) {
  switch (o) {
    case ProbeOutcome::kCompleted: return "completed";
    case ProbeOutcome::kHandshakeFailed: return "handshake_failed";
    case ProbeOutcome::kNoData: return "no_data";
    case ProbeOutcome::kNoRetransmission: return "no_retransmission";
    case ProbeOutcome::kAborted: return "aborted";
  }
  return "unknown";
}

std::vector<SegmentEvent> ProbeTrace::inbound_payload() const {
  std::vector<SegmentEvent> out;
  for (const auto& ev : events)
    if (ev.dir == Direction::kInbound && ev.is_payload()) out.push_back(ev);
  return out;
}

}  // namespace iwprobe::probe
