#pragma once

#include <optional>
#include <span>
#include <vector>

#include "iwprobe/estimate/types.hpp"
#include "iwprobe/interval_set.hpp"
#include "iwprobe/probe/types.hpp"

namespace iwprobe::estimate {

// Incremental form of the overlap rule, shared between the live probe loop
// and offline trace analysis so both use one definition of "retransmission".
// A range that revisits any already-seen byte is terminal; a range that only
// fills a gap is new data and extends the window.
class RetransmissionDetector {
 public:
  // Returns true if [offset, offset+len) overlaps previously fed bytes.
  bool feed(std::uint64_t offset, std::uint64_t len);
  const IntervalSet& seen() const { return seen_; }

 private:
  IntervalSet seen_;
};

// Index of the first event whose range intersects the union of all earlier
// ranges; nullopt when no event does.
std::optional<std::size_t> find_first_retransmission(
    std::span<const PayloadRange> events);

struct FlightSummary {
  std::optional<std::size_t> terminal_index;
  std::uint64_t span_bytes = 0;       // highest byte offset reached
  std::uint64_t distinct_bytes = 0;   // union of received ranges
  std::uint32_t segments_received = 0;
  std::uint32_t full_segment_len = 0;  // largest payload seen in the flight
};

// Aggregates everything strictly before the terminal index (or the whole
// list when no retransmission was seen).
FlightSummary summarize_first_flight(std::span<const PayloadRange> events);

TrialEstimate estimate_trial(const probe::ProbeTrace& trace);

// Majority vote over repetitions at one segment size. The candidate is the
// largest iw_bytes among conclusive trials; the vote is valid when strictly
// more than `threshold` of the conclusive trials observed that value.
VotedEstimate vote(const std::vector<TrialEstimate>& trials,
                   double threshold = 0.5);

// Marks verified trials whose value is incompatible with the modal value of
// the repetition set. Flagged, never corrected.
void flag_tail_loss_suspects(std::vector<TrialEstimate>& trials);

// Decides whether the host caps its first flight by segment count or by a
// fixed byte total, and normalizes to 1460-byte segments.
IWProfile classify_basis(const std::map<std::uint32_t, VotedEstimate>& per_mss);

std::uint64_t effective_first_flight(std::uint64_t server_iw_bytes,
                                     const ClientWindowEntry& client);

// Built-in reference table of client OS receive windows.
std::span<const ClientWindowEntry> client_window_table();
std::optional<ClientWindowEntry> client_window_by_os(const std::string& name);

}  // namespace iwprobe::estimate
