#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "iwprobe/common.hpp"

namespace iwprobe::origin {

struct IwConfig {
  enum class Kind : std::uint8_t { kSegments, kBytes };
  Kind kind = Kind::kSegments;
  std::uint64_t value = 10;

  static IwConfig segments(std::uint64_t n) {
    return {Kind::kSegments, n};
  }
  static IwConfig bytes(std::uint64_t b) { return {Kind::kBytes, b}; }

  std::uint64_t in_bytes(std::uint32_t segment_size) const {
    return kind == Kind::kSegments ? value * segment_size : value;
  }
};

struct MssPolicy {
  enum class Kind : std::uint8_t { kHonorClient, kFixed };
  Kind kind = Kind::kHonorClient;
  std::uint16_t fixed_bytes = 1460;

  static MssPolicy honor() { return {}; }
  static MssPolicy fixed(std::uint16_t b) { return {Kind::kFixed, b}; }
};

// Which first-flight segments never reach the wire. Positional plans apply to
// first transmissions only; random applies to every emission.
struct DropPlan {
  enum class Kind : std::uint8_t { kNone, kHead, kWithin, kTail, kRandom };
  Kind kind = Kind::kNone;
  std::uint32_t within_index = 0;  // 1-based segment number for kWithin
  double probability = 0.0;        // for kRandom, per segment

  static DropPlan none() { return {}; }
  static DropPlan head() { return {Kind::kHead, 0, 0.0}; }
  static DropPlan within(std::uint32_t k) { return {Kind::kWithin, k, 0.0}; }
  static DropPlan tail() { return {Kind::kTail, 0, 0.0}; }
  static DropPlan random(double p) { return {Kind::kRandom, 0, p}; }
};

struct PacingConfig {
  bool enabled = false;
  std::uint32_t initial_burst = 10;
  std::uint32_t train = 2;
  double rate_multiplier = 1.0;

  static PacingConfig off() { return {}; }
  static PacingConfig linux_like(double multiplier = 1.0) {
    return {true, 10, 2, multiplier};
  }
};

struct OriginConfig {
  IwConfig iw = IwConfig::segments(10);
  std::uint64_t object_size = 100'000;
  MssPolicy mss_policy = MssPolicy::honor();
  DropPlan drop_plan = DropPlan::none();
  PacingConfig pacing = PacingConfig::off();
  std::int64_t rto_ms = 1'000;             // exponential backoff x2
  std::uint32_t max_retransmissions = 3;
  std::int64_t artificial_rtt_ms = 0;      // emulated transport only
  bool announce_mss_option = true;

  void validate() const;  // throws std::invalid_argument

  std::string to_json() const;
  static OriginConfig from_json(const std::string& text);
};

// Emission offsets relative to the moment the request is accepted, one per
// segment. An initial burst leaves at offset zero; the rest go out in trains
// whose spacing matches a rate of iw_bytes * rate_multiplier per RTT.
std::vector<TimeNs> pacing_schedule(const OriginConfig& config,
                                    std::uint32_t segment_size,
                                    std::uint32_t num_segments,
                                    std::uint64_t iw_bytes, TimeNs rtt);

}  // namespace iwprobe::origin
