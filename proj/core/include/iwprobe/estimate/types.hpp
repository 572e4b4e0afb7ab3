#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace iwprobe::estimate {

struct PayloadRange {
  std::uint64_t offset = 0;
  std::uint64_t len = 0;
};

enum class TrialOutcome : std::uint8_t {
  kIwLimited,
  kDataLimited,
  kTailLossSuspected,
  kInconclusive,
};

std::string to_string(TrialOutcome o);

// One probe attempt reduced to numbers. iw_bytes is the sequence-space
// extent delivered before the terminal retransmission (what the server's
// window allowed); distinct_bytes is the union of ranges actually received,
// which is smaller when an in-flight segment was lost.
struct TrialEstimate {
  std::uint32_t mss = 0;             // announced segment size of the trial
  std::uint64_t iw_bytes = 0;
  std::uint32_t iw_segments = 0;
  std::uint64_t distinct_bytes = 0;
  bool verified_full = false;
  TrialOutcome outcome = TrialOutcome::kInconclusive;
};

struct VotedEstimate {
  std::uint32_t mss = 0;
  std::uint64_t iw_bytes = 0;   // the agreed (largest observed) value
  std::uint32_t votes_for = 0;
  std::uint32_t votes_total = 0;  // conclusive trials only
  bool valid = false;
};

enum class IwBasis : std::uint8_t {
  kSegmentBased,
  kByteBased,
  kIndeterminate,
};

std::string to_string(IwBasis b);

constexpr std::uint32_t kFullSegmentBytes = 1460;

struct IWProfile {
  IwBasis basis = IwBasis::kIndeterminate;
  std::uint32_t iw_segments_normalized = 0;  // at 1460-byte segments
  std::uint64_t iw_bytes = 0;
  std::map<std::uint32_t, VotedEstimate> per_mss;
};

// Initial receive window advertised by a client OS on an HTTP GET from an
// otherwise idle system. window_bytes/window_segments are stored as shipped
// and must equal rwin * 2^window_scale and window_bytes / 1460.
struct ClientWindowEntry {
  std::string os_name;
  std::uint32_t rwin = 0;
  std::uint8_t window_scale = 0;  // exponent
  std::uint64_t window_bytes = 0;
  std::uint32_t window_segments = 0;

  std::uint64_t computed_window_bytes() const {
    return static_cast<std::uint64_t>(rwin) << window_scale;
  }
};

}  // namespace iwprobe::estimate
