#include "iwprobe/estimate/estimator.hpp"

#include <algorithm>
#include <map>

namespace iwprobe::estimate {

std::string to_string(TrialOutcome o) {
  switch (o) {
    case TrialOutcome::kIwLimited: return "iw_limited";
    case TrialOutcome::kDataLimited: return "data_limited";
    case TrialOutcome::kTailLossSuspected: return "tail_loss_suspected";
    case TrialOutcome::kInconclusive: return "inconclusive";
  }
  return "unknown";
}

std::string to_string(IwBasis b) {
  switch (b) {
    case IwBasis::kSegmentBased: return "segment_based";
    case IwBasis::kByteBased: return "byte_based";
    case IwBasis::kIndeterminate: return "indeterminate";
  }
  return "unknown";
}

bool RetransmissionDetector::feed(std::uint64_t offset, std::uint64_t len) {
  if (len == 0) return false;
  if (seen_.intersects(offset, offset + len)) return true;
  seen_.insert(offset, offset + len);
  return false;
}

std::optional<std::size_t> find_first_retransmission(
    std::span<const PayloadRange> events) {
  RetransmissionDetector det;
  for (std::size_t i = 0; i < events.size(); ++i)
    if (det.feed(events[i].offset, events[i].len)) return i;
  return std::nullopt;
}

FlightSummary summarize_first_flight(std::span<const PayloadRange> events) {
  FlightSummary out;
  out.terminal_index = find_first_retransmission(events);
  const std::size_t end = out.terminal_index.value_or(events.size());
  IntervalSet seen;
  for (std::size_t i = 0; i < end; ++i) {
    const auto& ev = events[i];
    if (ev.len == 0) continue;
    seen.insert(ev.offset, ev.offset + ev.len);
    ++out.segments_received;
    out.full_segment_len =
        std::max(out.full_segment_len, static_cast<std::uint32_t>(ev.len));
  }
  out.distinct_bytes = seen.coverage();
  out.span_bytes = seen.max_end();
  return out;
}

namespace {

std::vector<PayloadRange> payload_ranges(const probe::ProbeTrace& trace) {
  std::vector<PayloadRange> ranges;
  for (const auto& ev : trace.events)
    if (ev.dir == probe::Direction::kInbound && ev.is_payload())
      ranges.push_back(PayloadRange{ev.seq_offset, ev.payload_len});
  return ranges;
}

}  // namespace

TrialEstimate estimate_trial(const probe::ProbeTrace& trace) {
  TrialEstimate est;
  est.mss = trace.spec.announced_mss;

  const auto ranges = payload_ranges(trace);
  if (ranges.empty()) return est;  // inconclusive, iw_bytes = 0

  const FlightSummary flight = summarize_first_flight(ranges);
  est.iw_bytes = flight.span_bytes;
  est.distinct_bytes = flight.distinct_bytes;
  if (flight.full_segment_len > 0)
    est.iw_segments = static_cast<std::uint32_t>(
        (flight.span_bytes + flight.full_segment_len - 1) /
        flight.full_segment_len);

  if (!flight.terminal_index.has_value() ||
      trace.outcome != probe::ProbeOutcome::kCompleted) {
    est.outcome = TrialOutcome::kInconclusive;  // estimate is a lower bound
    return est;
  }

  est.verified_full = trace.verified_full.value_or(false);
  est.outcome = est.verified_full ? TrialOutcome::kIwLimited
                                  : TrialOutcome::kDataLimited;
  return est;
}

VotedEstimate vote(const std::vector<TrialEstimate>& trials, double threshold) {
  VotedEstimate out;
  if (!trials.empty()) out.mss = trials.front().mss;
  std::uint64_t candidate = 0;
  for (const auto& t : trials) {
    if (t.outcome == TrialOutcome::kInconclusive) continue;
    ++out.votes_total;
    candidate = std::max(candidate, t.iw_bytes);
  }
  if (out.votes_total == 0) return out;  // all inconclusive
  for (const auto& t : trials)
    if (t.outcome != TrialOutcome::kInconclusive && t.iw_bytes == candidate)
      ++out.votes_for;
  out.iw_bytes = candidate;
  out.valid = out.votes_for > threshold * out.votes_total;
  return out;
}

void flag_tail_loss_suspects(std::vector<TrialEstimate>& trials) {
  std::map<std::uint64_t, std::uint32_t> freq;
  for (const auto& t : trials)
    if (t.outcome != TrialOutcome::kInconclusive && t.iw_bytes > 0)
      ++freq[t.iw_bytes];
  if (freq.empty()) return;
  std::uint64_t modal = 0;
  std::uint32_t best = 0;
  for (const auto& [value, count] : freq) {
    // ties go to the larger value, consistent with the vote candidate
    if (count >= best) {
      best = count;
      modal = value;
    }
  }
  if (modal == 0) return;
  for (auto& t : trials)
    if (t.outcome == TrialOutcome::kIwLimited && t.iw_bytes % modal != 0)
      t.outcome = TrialOutcome::kTailLossSuspected;
}

namespace {

std::uint64_t round_half_up(std::uint64_t numer, std::uint64_t denom) {
  return (numer + denom / 2) / denom;
}

// Modal value; ties broken by the entry at the largest segment size, which
// carries the least quantization error.
template <typename T>
T modal_value(const std::map<std::uint32_t, T>& by_mss) {
  std::map<T, std::uint32_t> freq;
  for (const auto& [mss, v] : by_mss) ++freq[v];
  std::uint32_t best = 0;
  for (const auto& [v, count] : freq) best = std::max(best, count);
  T chosen{};
  for (const auto& [mss, v] : by_mss)  // ascending mss: last winner = largest
    if (freq[v] == best) chosen = v;
  return chosen;
}

}  // namespace

IWProfile classify_basis(
    const std::map<std::uint32_t, VotedEstimate>& per_mss) {
  IWProfile profile;
  profile.per_mss = per_mss;

  std::map<std::uint32_t, std::uint64_t> bytes_by_mss;
  for (const auto& [mss, voted] : per_mss)
    if (voted.valid && voted.iw_bytes > 0) bytes_by_mss[mss] = voted.iw_bytes;
  if (bytes_by_mss.size() < 2) return profile;  // indeterminate

  std::map<std::uint32_t, std::uint64_t> segs_by_mss;
  std::uint64_t seg_min = UINT64_MAX, seg_max = 0;
  std::uint64_t byte_min = UINT64_MAX, byte_max = 0;
  std::uint32_t largest_mss = 0;
  for (const auto& [mss, bytes] : bytes_by_mss) {
    const std::uint64_t s = round_half_up(bytes, mss);
    segs_by_mss[mss] = s;
    seg_min = std::min(seg_min, s);
    seg_max = std::max(seg_max, s);
    byte_min = std::min(byte_min, bytes);
    byte_max = std::max(byte_max, bytes);
    largest_mss = std::max(largest_mss, mss);
  }

  if (seg_max - seg_min <= 1) {
    profile.basis = IwBasis::kSegmentBased;
    profile.iw_segments_normalized =
        static_cast<std::uint32_t>(modal_value(segs_by_mss));
    profile.iw_bytes =
        static_cast<std::uint64_t>(profile.iw_segments_normalized) *
        kFullSegmentBytes;
    return profile;
  }
  if (byte_max - byte_min <= largest_mss) {
    profile.basis = IwBasis::kByteBased;
    profile.iw_bytes = modal_value(bytes_by_mss);
    profile.iw_segments_normalized = static_cast<std::uint32_t>(
        round_half_up(profile.iw_bytes, kFullSegmentBytes));
    return profile;
  }
  return profile;  // indeterminate
}

std::uint64_t effective_first_flight(std::uint64_t server_iw_bytes,
                                     const ClientWindowEntry& client) {
  return std::min(server_iw_bytes, client.window_bytes);
}

namespace {

const ClientWindowEntry kClientWindows[] = {
    {"Linux 4.4", 58, 9, 29'696, 20},
    {"Android 6.0 (Linux 3.4)", 685, 7, 87'680, 60},
    {"Android 7.0 (Linux 3.18)", 641, 7, 82'048, 56},
    {"iOS 11.2.5", 2'058, 6, 131'712, 90},
    {"Mac OS 10.9.5", 8'235, 4, 131'760, 90},
    {"Mac OS 10.13.2", 4'117, 5, 131'744, 90},
    {"Windows 7 (SP 1)", 256, 8, 65'536, 44},
    {"Windows 8.1 / 10", 1'024, 8, 262'144, 179},
};

}  // namespace

std::span<const ClientWindowEntry> client_window_table() {
  return kClientWindows;
}

std::optional<ClientWindowEntry> client_window_by_os(const std::string& name) {
  for (const auto& e : kClientWindows)
    if (e.os_name == name) return e;
  return std::nullopt;
}

}  // namespace iwprobe::estimate
