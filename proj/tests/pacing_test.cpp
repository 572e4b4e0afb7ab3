#include "iwprobe/pacing/analyzer.hpp"

#include <gtest/gtest.h>

#include <sstream>

#include "iwprobe/probe/engine.hpp"
#include "sim_rig.hpp"

namespace {

using namespace iwprobe;
using namespace iwprobe::pacing;

TimingSample linux_pacer_pattern(std::uint32_t segments, TimeNs rtt,
                                 double rate_multiplier = 1.0,
                                 TimeNs t0 = 0) {
  // burst of ten, then trains of two spaced per the pacer rate
  TimingSample s;
  s.rtt_ns = rtt;
  const double gap =
      2.0 * 1460.0 / (segments * 1460.0 * rate_multiplier) *
      static_cast<double>(rtt);
  for (std::uint32_t i = 0; i < segments; ++i) {
    TimeNs ts = t0;
    if (i >= 10) ts += static_cast<TimeNs>(((i - 10) / 2 + 1) * gap);
    s.arrivals.push_back(Arrival{ts, 1460});
  }
  return s;
}

TEST(SegmentTrains, SplitsOnGaps) {
  TimingSample s;
  s.rtt_ns = 65 * kMillisecond;
  for (int i = 0; i < 10; ++i)
    s.arrivals.push_back(Arrival{i * 10 * kMicrosecond, 1460});
  TimeNs t = 5 * kMillisecond;
  for (int train = 0; train < 4; ++train) {
    s.arrivals.push_back(Arrival{t, 1460});
    s.arrivals.push_back(Arrival{t + 20 * kMicrosecond, 1460});
    t += 5 * kMillisecond;
  }
  const auto trains = segment_trains(s, kMillisecond);
  ASSERT_EQ(trains.size(), 5u);
  EXPECT_EQ(trains[0].size(), 10u);
  for (std::size_t i = 1; i < trains.size(); ++i)
    EXPECT_EQ(trains[i].size(), 2u);
}

TEST(SegmentTrains, NoGapsMeansOneTrain) {
  TimingSample s;
  s.rtt_ns = 65 * kMillisecond;
  for (int i = 0; i < 20; ++i)
    s.arrivals.push_back(Arrival{i * 5 * kMicrosecond, 1460});
  EXPECT_EQ(segment_trains(s, kMillisecond).size(), 1u);
}

TEST(SegmentTrains, SingleArrival) {
  TimingSample s;
  s.rtt_ns = kMillisecond;
  s.arrivals.push_back(Arrival{0, 1460});
  const auto trains = segment_trains(s, kMillisecond);
  ASSERT_EQ(trains.size(), 1u);
  EXPECT_EQ(trains[0].size(), 1u);
}

TEST(SegmentTrains, SizesSumToArrivalCount) {
  std::mt19937_64 rng(5);
  for (int round = 0; round < 100; ++round) {
    TimingSample s;
    s.rtt_ns = 100 * kMillisecond;
    TimeNs t = 0;
    const int n = 1 + static_cast<int>(rng() % 40);
    for (int i = 0; i < n; ++i) {
      t += static_cast<TimeNs>(rng() % (3 * kMillisecond));
      s.arrivals.push_back(Arrival{t, 1460});
    }
    std::size_t total = 0;
    for (const auto& train : segment_trains(s, kMillisecond))
      total += train.size();
    EXPECT_EQ(total, s.arrivals.size());
  }
}

TEST(DetectPacing, LinuxPatternIsPaced) {
  const auto s = linux_pacer_pattern(25, 65 * kMillisecond);
  const auto v = detect_pacing(s);
  EXPECT_EQ(v.classification, PacingClass::kPaced);
  EXPECT_EQ(v.initial_burst, 10u);
  EXPECT_EQ(v.median_train, 2u);
  EXPECT_GE(v.train_count, 3u);
}

TEST(DetectPacing, PointBurstIsBursty) {
  TimingSample s;
  s.rtt_ns = 65 * kMillisecond;
  for (int i = 0; i < 25; ++i)
    s.arrivals.push_back(Arrival{i * 40 * kMicrosecond, 1460});
  const auto v = detect_pacing(s);
  EXPECT_EQ(v.classification, PacingClass::kBursty);
  EXPECT_LT(v.spread_ratio, 0.05);
}

TEST(DetectPacing, SpreadRatioTracksConfiguredSpread) {
  for (double target : {1.5, 2.5}) {
    TimingSample s;
    s.rtt_ns = 65 * kMillisecond;
    const int trains = 20;
    const TimeNs gap =
        static_cast<TimeNs>(target * s.rtt_ns / trains);
    for (int i = 0; i < 10; ++i) s.arrivals.push_back(Arrival{0, 1460});
    for (int t = 1; t <= trains; ++t) {
      s.arrivals.push_back(Arrival{t * gap, 1460});
      s.arrivals.push_back(Arrival{t * gap + 30 * kMicrosecond, 1460});
    }
    const auto v = detect_pacing(s);
    EXPECT_EQ(v.classification, PacingClass::kPaced);
    EXPECT_NEAR(v.spread_ratio, target, target * 0.1);
  }
}

TEST(DetectPacing, FewSegmentsAreIndeterminateWithMetrics) {
  TimingSample s;
  s.rtt_ns = 65 * kMillisecond;
  for (int i = 0; i < 5; ++i)
    s.arrivals.push_back(Arrival{i * 10 * kMillisecond, 1460});
  const auto v = detect_pacing(s);
  EXPECT_EQ(v.classification, PacingClass::kIndeterminate);
  EXPECT_GT(v.spread_ratio, 0.0);
  EXPECT_GE(v.train_count, 1u);
}

TEST(DetectPacing, InvariantUnderTimeTranslation) {
  const auto base = linux_pacer_pattern(32, 80 * kMillisecond);
  const auto shifted = linux_pacer_pattern(32, 80 * kMillisecond, 1.0,
                                           123 * kSecond);
  const auto a = detect_pacing(base);
  const auto b = detect_pacing(shifted);
  EXPECT_EQ(a.classification, b.classification);
  EXPECT_DOUBLE_EQ(a.spread_ratio, b.spread_ratio);
  EXPECT_EQ(a.train_count, b.train_count);
}

TEST(DetectPacing, InvariantUnderJointTimeScaling) {
  // above 50 ms rtt the split threshold is rtt-relative, so scaling every
  // gap and the rtt by the same factor must not change the verdict
  for (double scale : {1.0, 2.0, 3.5}) {
    const auto s = linux_pacer_pattern(
        25, static_cast<TimeNs>(scale * 60 * kMillisecond));
    const auto v = detect_pacing(s);
    EXPECT_EQ(v.classification, PacingClass::kPaced) << "scale " << scale;
    EXPECT_EQ(v.initial_burst, 10u);
  }
}

TEST(DetectPacing, MockEmulationOnOff) {
  for (std::uint32_t iw : {16u, 32u, 50u}) {
    for (bool paced : {true, false}) {
      origin::OriginConfig cfg;
      cfg.iw = origin::IwConfig::segments(iw);
      cfg.object_size = 1'000'000;
      cfg.artificial_rtt_ms = 15;
      if (paced) cfg.pacing = origin::PacingConfig::linux_like(0.5);
      test::SimRig rig(cfg);
      auto transport = rig.connect();
      auto spec = rig.spec(1200);
      spec.handshake_ack_delay_ms = 50;
      const auto trace = probe::probe_once(spec, *transport);
      ASSERT_EQ(trace.outcome, probe::ProbeOutcome::kCompleted);
      const auto sample = sample_from_trace(trace);
      ASSERT_EQ(sample.arrivals.size(), iw);
      EXPECT_EQ(sample.rtt_ns, trace.handshake_rtt_ns + ms_to_ns(50));
      const auto v = detect_pacing(sample);
      EXPECT_EQ(v.classification,
                paced ? PacingClass::kPaced : PacingClass::kBursty)
          << "iw " << iw << " paced " << paced;
      if (paced) EXPECT_EQ(v.initial_burst, 10u);
    }
  }
}

TEST(SampleIo, JsonlRoundTrip) {
  auto sample = linux_pacer_pattern(16, 65 * kMillisecond);
  std::stringstream ss;
  write_sample_jsonl(ss, sample, "cdn.example");
  std::string host;
  const auto back = read_sample_jsonl(ss, &host);
  EXPECT_EQ(host, "cdn.example");
  EXPECT_EQ(back.rtt_ns, sample.rtt_ns);
  ASSERT_EQ(back.arrivals.size(), sample.arrivals.size());
  for (std::size_t i = 0; i < back.arrivals.size(); ++i) {
    EXPECT_EQ(back.arrivals[i].ts, sample.arrivals[i].ts);
    EXPECT_EQ(back.arrivals[i].len, sample.arrivals[i].len);
  }
}

}  // namespace
