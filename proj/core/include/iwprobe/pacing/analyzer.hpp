#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "iwprobe/common.hpp"
#include "iwprobe/probe/types.hpp"

namespace iwprobe::pacing {

struct Arrival {
  TimeNs ts = 0;
  std::uint32_t len = 0;
};

// First-flight packet arrivals plus the RTT the sender's pacer would have
// computed (handshake RTT including any induced ACK delay).
struct TimingSample {
  std::vector<Arrival> arrivals;  // non-decreasing in time
  TimeNs rtt_ns = 0;
};

enum class PacingClass : std::uint8_t { kPaced, kBursty, kIndeterminate };

std::string to_string(PacingClass c);

struct PacingVerdict {
  PacingClass classification = PacingClass::kIndeterminate;
  std::uint32_t initial_burst = 0;   // size of the first train
  std::uint32_t median_train = 0;    // median size of the following trains
  double spread_ratio = 0.0;         // (t_last - t_first) / rtt
  std::uint32_t train_count = 0;
};

struct DetectionTuning {
  double min_spread_paced = 0.2;    // spread_ratio at/above which "paced"
  double max_spread_bursty = 0.1;   // spread_ratio below which "bursty"
  double gap_rtt_fraction = 0.02;   // train split threshold, relative to rtt
  TimeNs gap_floor_ns = kMillisecond;
  std::uint32_t min_segments = 6;
};

// Splits the arrivals wherever the inter-arrival gap exceeds the threshold.
// Concatenating the trains yields the input.
std::vector<std::vector<Arrival>> segment_trains(const TimingSample& sample,
                                                 TimeNs gap_threshold);

PacingVerdict detect_pacing(const TimingSample& sample,
                            const DetectionTuning& tuning = {});

// First-flight arrivals of a completed probe trace; rtt is trace handshake
// RTT plus the configured handshake ACK delay.
TimingSample sample_from_trace(const probe::ProbeTrace& trace);

// Offline import: a header record {"rtt_ns":..[,"host":..]} followed by one
// {"ts_ns":..,"len":..} record per arrival.
TimingSample read_sample_jsonl(std::istream& is, std::string* host = nullptr);
void write_sample_jsonl(std::ostream& os, const TimingSample& sample,
                        const std::string& host = "");

}  // namespace iwprobe::pacing
