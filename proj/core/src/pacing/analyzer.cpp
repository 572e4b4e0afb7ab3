#include "iwprobe/pacing/analyzer.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>
#include <stdexcept>

#include "iwprobe/estimate/estimator.hpp"

namespace iwprobe::pacing {

using nlohmann::ordered_json;

std::string to_string(PacingClass c) {
  switch (c) {
    case PacingClass::kPaced: return "paced";
    case PacingClass::kBursty: return "bursty";
    case PacingClass::kIndeterminate: return "indeterminate";
  }
  return "unknown";
}

std::vector<std::vector<Arrival>> segment_trains(const TimingSample& sample,
                                                 TimeNs gap_threshold) {
  if (gap_threshold <= 0) throw std::invalid_argument("gap_threshold <= 0");
  std::vector<std::vector<Arrival>> trains;
  for (std::size_t i = 0; i < sample.arrivals.size(); ++i) {
    const bool split =
        trains.empty() ||
        sample.arrivals[i].ts - trains.back().back().ts > gap_threshold;
    if (split) trains.emplace_back();
    trains.back().push_back(sample.arrivals[i]);
  }
  return trains;
}

PacingVerdict detect_pacing(const TimingSample& sample,
                            const DetectionTuning& tuning) {
  PacingVerdict v;
  if (sample.arrivals.empty() || sample.rtt_ns <= 0) return v;

  const TimeNs gap_threshold =
      std::max(tuning.gap_floor_ns,
               static_cast<TimeNs>(tuning.gap_rtt_fraction *
                                   static_cast<double>(sample.rtt_ns)));
  const auto trains = segment_trains(sample, gap_threshold);
  v.train_count = static_cast<std::uint32_t>(trains.size());
  v.initial_burst = static_cast<std::uint32_t>(trains.front().size());

  std::vector<std::uint32_t> follow;
  for (std::size_t i = 1; i < trains.size(); ++i)
    follow.push_back(static_cast<std::uint32_t>(trains[i].size()));
  if (!follow.empty()) {
    std::sort(follow.begin(), follow.end());
    v.median_train = follow[(follow.size() - 1) / 2];  // lower median
  }

  const TimeNs spread = sample.arrivals.back().ts - sample.arrivals.front().ts;
  v.spread_ratio =
      static_cast<double>(spread) / static_cast<double>(sample.rtt_ns);

  if (sample.arrivals.size() < tuning.min_segments) return v;  // indeterminate
  if (v.spread_ratio < tuning.max_spread_bursty || v.train_count == 1) {
    v.classification = PacingClass::kBursty;
  } else if (v.spread_ratio >= tuning.min_spread_paced && v.train_count >= 3) {
    v.classification = PacingClass::kPaced;
  }
  return v;
}

TimingSample sample_from_trace(const probe::ProbeTrace& trace) {
  TimingSample sample;
  sample.rtt_ns =
      trace.handshake_rtt_ns + ms_to_ns(trace.spec.handshake_ack_delay_ms);

  std::vector<estimate::PayloadRange> ranges;
  const auto payload = trace.inbound_payload();
  ranges.reserve(payload.size());
  for (const auto& ev : payload)
    ranges.push_back(estimate::PayloadRange{ev.seq_offset, ev.payload_len});
  const auto terminal = estimate::find_first_retransmission(ranges);
  const std::size_t end = terminal.value_or(payload.size());
  for (std::size_t i = 0; i < end; ++i)
    sample.arrivals.push_back(Arrival{payload[i].ts, payload[i].payload_len});
  return sample;
}

TimingSample read_sample_jsonl(std::istream& is, std::string* host) {
  TimingSample sample;
  std::string line;
  bool have_header = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto j = ordered_json::parse(line);
    if (!have_header) {
      sample.rtt_ns = j.at("rtt_ns");
      if (host != nullptr && j.contains("host")) *host = j.at("host");
      have_header = true;
      continue;
    }
    sample.arrivals.push_back(Arrival{j.at("ts_ns"), j.at("len")});
  }
  if (!have_header) throw std::runtime_error("missing rtt_ns header record");
  return sample;
}

void write_sample_jsonl(std::ostream& os, const TimingSample& sample,
                        const std::string& host) {
  ordered_json header;
  header["rtt_ns"] = sample.rtt_ns;
  if (!host.empty()) header["host"] = host;
  os << header.dump() << '\n';
  for (const auto& a : sample.arrivals) {
    ordered_json j;
    j["ts_ns"] = a.ts;
    j["len"] = a.len;
    os << j.dump() << '\n';
  }
}

}  // namespace iwprobe::pacing
