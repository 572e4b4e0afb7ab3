#include "iwprobe/origin/mock_origin.hpp"

#include <gtest/gtest.h>

#include "iwprobe/estimate/estimator.hpp"
#include "iwprobe/probe/engine.hpp"
#include "sim_rig.hpp"

namespace {

using namespace iwprobe;
using origin::DropPlan;
using origin::IwConfig;
using origin::MockOrigin;
using origin::OriginConfig;
using test::SimRig;

TEST(PacingSchedule, GapMatchesRateFormula) {
  OriginConfig cfg;
  cfg.pacing = origin::PacingConfig::linux_like(1.0);
  const std::uint64_t iw_bytes = 25ull * 1460;
  const TimeNs rtt = 65 * kMillisecond;
  const auto offsets = pacing_schedule(cfg, 1460, 25, iw_bytes, rtt);
  ASSERT_EQ(offsets.size(), 25u);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(offsets[i], 0);

  // oracle: gap = train_bytes / (iw_bytes * mult) * rtt = 2*1460/25*1460 * 65ms
  const double gap_oracle =
      2.0 * 1460.0 / (static_cast<double>(iw_bytes) * 1.0) * 65e6;
  EXPECT_NEAR(gap_oracle, 5.2e6, 1e-3);  // ~5.2 ms
  for (std::uint32_t i = 10; i < 25; ++i) {
    const std::uint32_t train = (i - 10) / 2 + 1;
    EXPECT_NEAR(static_cast<double>(offsets[i]), train * gap_oracle, 2.0)
        << "segment " << i;
  }
}

TEST(PacingSchedule, DisabledMeansAllZero) {
  OriginConfig cfg;  // pacing off
  for (auto off : pacing_schedule(cfg, 1460, 40, 40ull * 1460, 65 * kMillisecond))
    EXPECT_EQ(off, 0);
}

TEST(PacingSchedule, MultiplierScalesGapsLinearly) {
  OriginConfig one, two;
  one.pacing = origin::PacingConfig::linux_like(1.0);
  two.pacing = origin::PacingConfig::linux_like(2.0);
  const auto a = pacing_schedule(one, 1460, 30, 30ull * 1460, 100 * kMillisecond);
  const auto b = pacing_schedule(two, 1460, 30, 30ull * 1460, 100 * kMillisecond);
  for (std::size_t i = 10; i < 30; ++i)
    EXPECT_NEAR(static_cast<double>(a[i]),
                2.0 * static_cast<double>(b[i]), 2.0);
}

TEST(Serve, SegmentConfiguredWindowIsRecovered) {
  OriginConfig cfg;
  cfg.iw = IwConfig::segments(10);
  cfg.object_size = 100'000;
  SimRig rig(cfg);
  auto transport = rig.connect();
  const auto trace = probe::probe_once(rig.spec(1200), *transport);
  const auto est = estimate::estimate_trial(trace);
  EXPECT_EQ(est.iw_bytes, 12'000u);
  EXPECT_EQ(est.iw_segments, 10u);
}

TEST(Serve, ByteConfiguredWindowAcrossSweepClassifiesByteBased) {
  std::map<std::uint32_t, estimate::VotedEstimate> per_mss;
  for (std::uint16_t mss : probe::kMssSweepDefault) {
    OriginConfig cfg;
    cfg.iw = IwConfig::bytes(105'000);
    cfg.object_size = 200'000;
    SimRig rig(cfg);
    auto transport = rig.connect();
    const auto trace = probe::probe_once(rig.spec(mss), *transport);
    std::vector<estimate::TrialEstimate> trials = {
        estimate::estimate_trial(trace)};
    per_mss[mss] = estimate::vote(trials);
    EXPECT_EQ(trials[0].iw_bytes, 105'000u) << "mss " << mss;
  }
  const auto profile = estimate::classify_basis(per_mss);
  EXPECT_EQ(profile.basis, estimate::IwBasis::kByteBased);
  EXPECT_EQ(profile.iw_bytes, 105'000u);
}

TEST(Serve, TailDropYieldsOneSegmentLess) {
  OriginConfig cfg;
  cfg.iw = IwConfig::segments(10);
  cfg.object_size = 100'000;
  cfg.drop_plan = DropPlan::tail();
  SimRig rig(cfg);
  auto transport = rig.connect();
  const auto trace = probe::probe_once(rig.spec(1200), *transport);
  EXPECT_EQ(estimate::estimate_trial(trace).iw_segments, 9u);
}

TEST(Serve, NeverMoreThanWindowUnackedBeforeFirstAck) {
  for (auto iw : {IwConfig::segments(4), IwConfig::segments(32),
                  IwConfig::bytes(14'600), IwConfig::bytes(105'000)}) {
    OriginConfig cfg;
    cfg.iw = iw;
    cfg.object_size = 500'000;
    SimRig rig(cfg);
    auto transport = rig.connect();
    (void)probe::probe_once(rig.spec(536), *transport);
    const auto& log = rig.origin->sessions().front();

    // bytes "sent" (including plan drops) before the first inbound ACK that
    // advances the window must not exceed the configured IW
    std::uint64_t sent = 0;
    for (const auto& e : log.entries) {
      if (e.kind == MockOrigin::LogKind::kSend ||
          e.kind == MockOrigin::LogKind::kDrop)
        sent += e.len;
      if (e.kind == MockOrigin::LogKind::kRetransmit) break;
    }
    EXPECT_LE(sent, log.iw_bytes);
    EXPECT_EQ(log.first_flight_bytes, std::min(log.iw_bytes, cfg.object_size));
  }
}

TEST(Serve, PositionalPlansNeverDropRetransmissions) {
  for (auto plan : {DropPlan::head(), DropPlan::within(3), DropPlan::tail()}) {
    OriginConfig cfg;
    cfg.iw = IwConfig::segments(6);
    cfg.object_size = 50'000;
    cfg.drop_plan = plan;
    SimRig rig(cfg);
    auto transport = rig.connect();
    (void)probe::probe_once(rig.spec(1200), *transport);
    const auto& log = rig.origin->sessions().front();
    EXPECT_EQ(log.count(MockOrigin::LogKind::kDrop), 1u);
    EXPECT_EQ(log.count(MockOrigin::LogKind::kRetransmitDrop), 0u);
    EXPECT_GE(log.count(MockOrigin::LogKind::kRetransmit), 1u);
  }
}

TEST(Serve, VerificationWindowLimitsContinuationToTwoSegments) {
  OriginConfig cfg;
  cfg.iw = IwConfig::segments(10);
  cfg.object_size = 100'000;
  SimRig rig(cfg);
  auto transport = rig.connect();
  const auto trace = probe::probe_once(rig.spec(1200), *transport);
  ASSERT_TRUE(trace.verified_full.value_or(false));
  const auto& log = rig.origin->sessions().front();

  // continuation sends: first transmissions beyond the first flight
  std::uint32_t continuation = 0;
  for (const auto& e : log.entries)
    if (e.kind == MockOrigin::LogKind::kSend &&
        e.seq_offset >= log.first_flight_bytes)
      ++continuation;
  EXPECT_GE(continuation, 1u);
  EXPECT_LE(continuation, 2u);  // SEG n+1, SEG n+2 at most
}

TEST(Serve, MalformedRequestGets400) {
  OriginConfig cfg;
  SimRig rig(cfg);
  auto transport = rig.connect();
  probe::ProbeTrace trace;
  trace.spec = rig.spec();
  auto conn = probe::open_handshake(trace.spec, *transport, trace);
  ASSERT_TRUE(conn.has_value());

  probe::TcpSegment bad;
  bad.seq = conn->snd_nxt;
  bad.ack = conn->server_isn + 1;
  bad.flags = probe::kAck | probe::kPsh;
  bad.window = 65'535;
  bad.payload = "NONSENSE /x\r\n\r\n";
  transport->send(bad);

  auto reply = transport->receive(transport->now() + kSecond);
  ASSERT_TRUE(reply.has_value());
  EXPECT_EQ(reply->segment.payload.substr(0, 12), "HTTP/1.1 400");
  const auto& log = rig.origin->sessions().front();
  EXPECT_EQ(log.count(MockOrigin::LogKind::kReject), 1u);
  EXPECT_TRUE(log.closed);
}

TEST(Serve, SessionLogsAreReproducibleUnderFixedSeed) {
  auto run = [](std::uint64_t seed) {
    OriginConfig cfg;
    cfg.iw = IwConfig::segments(12);
    cfg.object_size = 80'000;
    cfg.drop_plan = DropPlan::random(0.3);
    SimRig rig(cfg, seed);
    auto transport = rig.connect();
    probe::ProbeSpec spec = rig.spec(1200);
    spec.rng_seed = 7;
    (void)probe::probe_once(spec, *transport);
    std::vector<std::tuple<TimeNs, int, std::uint64_t, std::uint32_t>> flat;
    for (const auto& e : rig.origin->sessions().front().entries)
      flat.emplace_back(e.t, static_cast<int>(e.kind), e.seq_offset, e.len);
    return flat;
  };
  EXPECT_EQ(run(42), run(42));
  EXPECT_NE(run(42), run(43));  // different loss pattern
}

TEST(Serve, RstFreesTheConnectionSlot) {
  OriginConfig cfg;
  SimRig rig(cfg);
  auto transport = rig.connect();
  const auto trace = probe::probe_once(rig.spec(), *transport);
  ASSERT_EQ(trace.outcome, probe::ProbeOutcome::kCompleted);
  ASSERT_EQ(rig.origin->sessions().size(), 1u);
  EXPECT_TRUE(rig.origin->sessions().front().closed);
}

TEST(Config, JsonRoundTrip) {
  OriginConfig cfg;
  cfg.iw = IwConfig::bytes(105'000);
  cfg.object_size = 420'000;
  cfg.mss_policy = origin::MssPolicy::fixed(1100);
  cfg.drop_plan = DropPlan::random(0.15);
  cfg.pacing = origin::PacingConfig::linux_like(0.5);
  cfg.artificial_rtt_ms = 35;
  const auto round = OriginConfig::from_json(cfg.to_json());
  EXPECT_EQ(round.iw.kind, IwConfig::Kind::kBytes);
  EXPECT_EQ(round.iw.value, 105'000u);
  EXPECT_EQ(round.object_size, 420'000u);
  EXPECT_EQ(round.mss_policy.fixed_bytes, 1100);
  EXPECT_DOUBLE_EQ(round.drop_plan.probability, 0.15);
  EXPECT_TRUE(round.pacing.enabled);
  EXPECT_DOUBLE_EQ(round.pacing.rate_multiplier, 0.5);
  EXPECT_EQ(round.artificial_rtt_ms, 35);
}

TEST(Config, ValidationCatchesBadValues) {
  OriginConfig cfg;
  cfg.iw = IwConfig::segments(0);
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = OriginConfig{};
  cfg.drop_plan = DropPlan::random(1.0);
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = OriginConfig{};
  cfg.object_size = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

}  // namespace
