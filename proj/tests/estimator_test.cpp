#include "iwprobe/estimate/estimator.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

namespace {

using namespace iwprobe;
using namespace iwprobe::estimate;

// Brute-force reference for the overlap rule: a byte is terminal when seen
// twice. Deliberately independent of IntervalSet.
std::optional<std::size_t> first_retransmission_oracle(
    const std::vector<PayloadRange>& events) {
  std::set<std::uint64_t> seen;
  for (std::size_t i = 0; i < events.size(); ++i) {
    bool overlap = false;
    for (std::uint64_t b = events[i].offset;
         b < events[i].offset + events[i].len; ++b)
      if (seen.count(b)) {
        overlap = true;
        break;
      }
    if (overlap) return i;
    for (std::uint64_t b = events[i].offset;
         b < events[i].offset + events[i].len; ++b)
      seen.insert(b);
  }
  return std::nullopt;
}

std::uint64_t union_bytes_oracle(const std::vector<PayloadRange>& events,
                                 std::size_t end) {
  std::set<std::uint64_t> seen;
  for (std::size_t i = 0; i < end; ++i)
    for (std::uint64_t b = events[i].offset;
         b < events[i].offset + events[i].len; ++b)
      seen.insert(b);
  return seen.size();
}

std::uint64_t span_oracle(const std::vector<PayloadRange>& events,
                          std::size_t end) {
  std::uint64_t top = 0;
  for (std::size_t i = 0; i < end; ++i)
    top = std::max(top, events[i].offset + events[i].len);
  return top;
}

probe::ProbeTrace make_trace(std::uint16_t mss,
                             const std::vector<PayloadRange>& ranges,
                             bool verified_full = true) {
  probe::ProbeTrace trace;
  trace.spec.announced_mss = mss;
  trace.spec.target = Endpoint{"host", 80};
  trace.outcome = probe::ProbeOutcome::kCompleted;
  trace.verified_full = verified_full;
  trace.handshake_rtt_ns = kMillisecond;
  TimeNs t = kMillisecond;
  for (const auto& r : ranges) {
    trace.events.push_back(probe::SegmentEvent{
        probe::Direction::kInbound, r.offset, static_cast<std::uint32_t>(r.len),
        probe::kAck, t, 65'535});
    t += kMicrosecond;
  }
  return trace;
}

TEST(FindFirstRetransmission, ExactRepeat) {
  const std::vector<PayloadRange> events = {{0, 1460}, {1460, 1460}, {0, 1460}};
  EXPECT_EQ(find_first_retransmission(events), std::optional<std::size_t>(2));
}

TEST(FindFirstRetransmission, GapFillIsNotTerminal) {
  // head gap fill extends the window; only its repeat overlaps
  const std::vector<PayloadRange> events = {
      {1460, 1460}, {2920, 1460}, {0, 1460}, {0, 1460}};
  const auto expected = first_retransmission_oracle(events);
  ASSERT_EQ(expected, std::optional<std::size_t>(3));
  EXPECT_EQ(find_first_retransmission(events), expected);
}

TEST(FindFirstRetransmission, NoOverlapMeansNone) {
  const std::vector<PayloadRange> events = {{0, 100}, {100, 100}, {200, 100}};
  EXPECT_EQ(find_first_retransmission(events), std::nullopt);
}

TEST(FindFirstRetransmission, MatchesOracleOnRandomTraces) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::uint64_t> off(0, 40);
  std::uniform_int_distribution<std::uint64_t> len(1, 12);
  for (int round = 0; round < 500; ++round) {
    std::vector<PayloadRange> events;
    const int n = 1 + static_cast<int>(rng() % 12);
    for (int i = 0; i < n; ++i) events.push_back({off(rng), len(rng)});
    EXPECT_EQ(find_first_retransmission(events),
              first_retransmission_oracle(events))
        << "round " << round;
  }
}

TEST(EstimateTrial, TenFullSegmentsThenOverlap) {
  std::vector<PayloadRange> ranges;
  for (int i = 0; i < 10; ++i)
    ranges.push_back({static_cast<std::uint64_t>(i) * 1200, 1200});
  ranges.push_back({0, 1200});  // RTO retransmission
  const auto est = estimate_trial(make_trace(1200, ranges));
  EXPECT_EQ(est.iw_bytes, 12'000u);
  EXPECT_EQ(est.iw_segments, 10u);
  EXPECT_EQ(est.distinct_bytes, 12'000u);
  EXPECT_EQ(est.outcome, TrialOutcome::kIwLimited);
}

TEST(EstimateTrial, ByteCappedWindowCountsPartialSegment) {
  // 105000-byte cap at mss 1200: 87 full segments plus a 600-byte one
  std::vector<PayloadRange> ranges;
  std::uint64_t off = 0;
  while (off < 105'000) {
    const std::uint64_t len = std::min<std::uint64_t>(1200, 105'000 - off);
    ranges.push_back({off, len});
    off += len;
  }
  ranges.push_back({0, 1200});
  const std::uint64_t expected_segments = (105'000 + 1200 - 1) / 1200;  // oracle
  ASSERT_EQ(expected_segments, 88u);
  const auto est = estimate_trial(make_trace(1200, ranges));
  EXPECT_EQ(est.iw_bytes, 105'000u);
  EXPECT_EQ(est.iw_segments, expected_segments);
}

TEST(EstimateTrial, WithinLossKeepsSequenceSpaceEstimate) {
  // segment 3 of 5 lost in flight; the seg-1 retransmission is terminal.
  // The sequence space still shows 5 segments; the union only 4.
  std::vector<PayloadRange> ranges = {
      {0, 1200}, {1200, 1200}, {3600, 1200}, {4800, 1200}, {0, 1200}};
  const auto est = estimate_trial(make_trace(1200, ranges));
  EXPECT_EQ(est.iw_bytes, 6'000u);
  EXPECT_EQ(est.iw_segments, 5u);
  EXPECT_EQ(est.distinct_bytes, 4'800u);
}

TEST(EstimateTrial, NoPayloadIsInconclusive) {
  probe::ProbeTrace trace;
  trace.spec.announced_mss = 1200;
  trace.outcome = probe::ProbeOutcome::kNoData;
  const auto est = estimate_trial(trace);
  EXPECT_EQ(est.outcome, TrialOutcome::kInconclusive);
  EXPECT_EQ(est.iw_bytes, 0u);
}

TEST(EstimateTrial, VerificationOutcomeMapping) {
  std::vector<PayloadRange> ranges = {{0, 500}, {0, 500}};
  auto limited = estimate_trial(make_trace(536, ranges, true));
  EXPECT_EQ(limited.outcome, TrialOutcome::kIwLimited);
  auto exhausted = estimate_trial(make_trace(536, ranges, false));
  EXPECT_EQ(exhausted.outcome, TrialOutcome::kDataLimited);
}

TEST(EstimateTrial, MatchesOraclesOnRandomTraces) {
  std::mt19937_64 rng(23);
  for (int round = 0; round < 400; ++round) {
    std::vector<PayloadRange> ranges;
    const int n = 1 + static_cast<int>(rng() % 15);
    std::uniform_int_distribution<std::uint64_t> slot(0, 14);
    std::uniform_int_distribution<std::uint64_t> len(1, 700);
    for (int i = 0; i < n; ++i) ranges.push_back({slot(rng) * 700, len(rng)});
    const auto trace = make_trace(700, ranges);
    const auto est = estimate_trial(trace);
    const std::size_t end =
        first_retransmission_oracle(ranges).value_or(ranges.size());
    EXPECT_EQ(est.distinct_bytes, union_bytes_oracle(ranges, end));
    EXPECT_EQ(est.iw_bytes, span_oracle(ranges, end));
  }
}

TEST(EstimateTrial, RemovingTailSegmentNeverIncreasesEstimate) {
  std::mt19937_64 rng(31);
  for (int round = 0; round < 200; ++round) {
    const int n = 2 + static_cast<int>(rng() % 10);
    std::vector<PayloadRange> flight;
    for (int i = 0; i < n; ++i)
      flight.push_back({static_cast<std::uint64_t>(i) * 1000, 1000});
    auto shorter = flight;
    shorter.pop_back();
    flight.push_back({0, 1000});
    shorter.push_back({0, 1000});
    const auto full = estimate_trial(make_trace(1000, flight));
    const auto cut = estimate_trial(make_trace(1000, shorter));
    EXPECT_LE(cut.iw_bytes, full.iw_bytes);
    EXPECT_LE(cut.iw_segments, full.iw_segments);
  }
}

TrialEstimate trial(std::uint64_t iw_bytes,
                    TrialOutcome outcome = TrialOutcome::kIwLimited) {
  TrialEstimate t;
  t.mss = 1460;
  t.iw_bytes = iw_bytes;
  t.distinct_bytes = iw_bytes;
  t.iw_segments = static_cast<std::uint32_t>(iw_bytes / 1460);
  t.verified_full = outcome == TrialOutcome::kIwLimited;
  t.outcome = outcome;
  return t;
}

TEST(Vote, MajorityOnLargestObserved) {
  std::vector<TrialEstimate> trials;
  for (int i = 0; i < 7; ++i) trials.push_back(trial(14'600));
  for (int i = 0; i < 3; ++i) trials.push_back(trial(11'680));
  const auto v = vote(trials);
  EXPECT_EQ(v.iw_bytes, 14'600u);
  EXPECT_EQ(v.votes_for, 7u);
  EXPECT_EQ(v.votes_total, 10u);
  EXPECT_TRUE(v.valid);
}

TEST(Vote, ExactHalfIsInvalid) {
  std::vector<TrialEstimate> trials;
  for (int i = 0; i < 5; ++i) trials.push_back(trial(14'600));
  for (int i = 0; i < 5; ++i) trials.push_back(trial(11'680));
  const auto v = vote(trials);
  EXPECT_EQ(v.iw_bytes, 14'600u);
  EXPECT_FALSE(v.valid);  // 5/10 is not > 50 %
}

TEST(Vote, InconclusiveTrialsDoNotCount) {
  std::vector<TrialEstimate> trials;
  for (int i = 0; i < 6; ++i) trials.push_back(trial(14'600));
  for (int i = 0; i < 4; ++i)
    trials.push_back(trial(0, TrialOutcome::kInconclusive));
  const auto v = vote(trials);
  EXPECT_EQ(v.votes_total, 6u);
  EXPECT_EQ(v.votes_for, 6u);
  EXPECT_TRUE(v.valid);
}

TEST(Vote, AllInconclusive) {
  std::vector<TrialEstimate> trials(4, trial(0, TrialOutcome::kInconclusive));
  const auto v = vote(trials);
  EXPECT_FALSE(v.valid);
  EXPECT_EQ(v.votes_total, 0u);
}

TEST(Vote, PermutationInvariant) {
  std::vector<TrialEstimate> trials;
  for (std::uint64_t b : {14'600, 11'680, 14'600, 14'600, 8'760, 14'600})
    trials.push_back(trial(b));
  const auto reference = vote(trials);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    std::shuffle(trials.begin(), trials.end(), rng);
    const auto v = vote(trials);
    EXPECT_EQ(v.iw_bytes, reference.iw_bytes);
    EXPECT_EQ(v.votes_for, reference.votes_for);
    EXPECT_EQ(v.valid, reference.valid);
  }
}

VotedEstimate voted(std::uint32_t mss, std::uint64_t bytes) {
  VotedEstimate v;
  v.mss = mss;
  v.iw_bytes = bytes;
  v.votes_for = 10;
  v.votes_total = 10;
  v.valid = true;
  return v;
}

TEST(ClassifyBasis, SegmentConfiguredHost) {
  std::map<std::uint32_t, VotedEstimate> per_mss = {
      {64, voted(64, 640)},
      {128, voted(128, 1'280)},
      {536, voted(536, 5'360)},
      {1200, voted(1200, 12'000)},
  };
  const auto profile = classify_basis(per_mss);
  EXPECT_EQ(profile.basis, IwBasis::kSegmentBased);
  EXPECT_EQ(profile.iw_segments_normalized, 10u);
  EXPECT_EQ(profile.iw_bytes, 14'600u);
}

TEST(ClassifyBasis, ByteConfiguredHost) {
  std::map<std::uint32_t, VotedEstimate> per_mss;
  for (std::uint32_t mss : {64u, 128u, 536u, 1200u})
    per_mss[mss] = voted(mss, 105'000);
  const auto profile = classify_basis(per_mss);
  EXPECT_EQ(profile.basis, IwBasis::kByteBased);
  EXPECT_EQ(profile.iw_bytes, 105'000u);
  EXPECT_EQ(profile.iw_segments_normalized, 72u);  // at 1460-byte segments
}

TEST(ClassifyBasis, MixedEvidenceIsIndeterminate) {
  std::map<std::uint32_t, VotedEstimate> per_mss = {
      {64, voted(64, 640)},
      {1200, voted(1200, 105'000)},
  };
  EXPECT_EQ(classify_basis(per_mss).basis, IwBasis::kIndeterminate);
}

TEST(ClassifyBasis, TooFewValidEntriesIsIndeterminate) {
  std::map<std::uint32_t, VotedEstimate> per_mss = {{1200, voted(1200, 12'000)}};
  EXPECT_EQ(classify_basis(per_mss).basis, IwBasis::kIndeterminate);
  per_mss[64] = VotedEstimate{};  // invalid entry does not help
  EXPECT_EQ(classify_basis(per_mss).basis, IwBasis::kIndeterminate);
}

TEST(ClassifyBasis, RecoversGroundTruthAcrossSweep) {
  const std::uint32_t sweep[] = {64, 128, 536, 1200};
  for (std::uint32_t n = 1; n <= 100; n += 3) {
    std::map<std::uint32_t, VotedEstimate> per_mss;
    for (auto mss : sweep) per_mss[mss] = voted(mss, std::uint64_t{n} * mss);
    const auto profile = classify_basis(per_mss);
    ASSERT_EQ(profile.basis, IwBasis::kSegmentBased) << "n=" << n;
    ASSERT_EQ(profile.iw_segments_normalized, n);
    ASSERT_EQ(profile.iw_bytes, std::uint64_t{n} * 1460);
  }
  for (std::uint64_t bytes = 1'000; bytes <= 200'000; bytes += 7'321) {
    std::map<std::uint32_t, VotedEstimate> per_mss;
    for (auto mss : sweep) per_mss[mss] = voted(mss, bytes);
    const auto profile = classify_basis(per_mss);
    ASSERT_EQ(profile.basis, IwBasis::kByteBased) << "bytes=" << bytes;
    ASSERT_EQ(profile.iw_bytes, bytes);
  }
}

TEST(FlagTailLoss, ShortVerifiedTrialGetsFlagged) {
  std::vector<TrialEstimate> trials;
  for (int i = 0; i < 9; ++i) trials.push_back(trial(12'000));
  trials.push_back(trial(10'800));  // verified but one segment short
  flag_tail_loss_suspects(trials);
  EXPECT_EQ(trials.back().outcome, TrialOutcome::kTailLossSuspected);
  for (int i = 0; i < 9; ++i)
    EXPECT_EQ(trials[i].outcome, TrialOutcome::kIwLimited);
}

TEST(EffectiveFirstFlight, TableRows) {
  const auto linux44 = client_window_by_os("Linux 4.4");
  ASSERT_TRUE(linux44.has_value());
  // server IW32 at full segments = 46720 bytes
  EXPECT_EQ(effective_first_flight(46'720, *linux44), 29'696u);
  EXPECT_EQ(29'696u / 1460u, 20u);

  const auto win10 = client_window_by_os("Windows 8.1 / 10");
  ASSERT_TRUE(win10.has_value());
  EXPECT_EQ(effective_first_flight(46'720, *win10), 46'720u);
}

TEST(EffectiveFirstFlight, MinSemantics) {
  const auto entry = client_window_by_os("Windows 7 (SP 1)");
  ASSERT_TRUE(entry.has_value());
  EXPECT_EQ(effective_first_flight(entry->window_bytes, *entry),
            entry->window_bytes);  // equal inputs
  const auto capped = effective_first_flight(1'000'000, *entry);
  EXPECT_EQ(effective_first_flight(capped, *entry), capped);  // idempotent
}

TEST(ClientWindowTable, StoredColumnsAreConsistent) {
  const auto table = client_window_table();
  ASSERT_EQ(table.size(), 8u);
  for (const auto& row : table) {
    EXPECT_EQ(row.window_bytes, row.computed_window_bytes()) << row.os_name;
    EXPECT_EQ(row.window_segments, row.window_bytes / 1460) << row.os_name;
  }
}

}  // namespace
