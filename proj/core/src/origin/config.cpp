#include "iwprobe/origin/config.hpp"

#include <nlohmann/json.hpp>
#include <stdexcept>

namespace iwprobe::origin {

using nlohmann::ordered_json;

void OriginConfig::validate() const {
  if (iw.value < 1) throw std::invalid_argument("iw must be >= 1");
  if (object_size < 1) throw std::invalid_argument("object_size must be >= 1");
  if (drop_plan.kind == DropPlan::Kind::kRandom &&
      (drop_plan.probability < 0.0 || drop_plan.probability >= 1.0))
    throw std::invalid_argument("random drop probability must be in [0, 1)");
  if (drop_plan.kind == DropPlan::Kind::kWithin && drop_plan.within_index < 1)
    throw std::invalid_argument("within index is 1-based");
  if (rto_ms <= 0) throw std::invalid_argument("rto must be positive");
  if (pacing.enabled && (pacing.train < 1 || pacing.rate_multiplier <= 0.0))
    throw std::invalid_argument("bad pacing parameters");
}

std::string OriginConfig::to_json() const {
  ordered_json j;
  j["iw"] = iw.kind == IwConfig::Kind::kSegments
                ? ordered_json{{"segments", iw.value}}
                : ordered_json{{"bytes", iw.value}};
  j["object_size"] = object_size;
  if (mss_policy.kind == MssPolicy::Kind::kHonorClient)
    j["mss_policy"] = "honor";
  else
    j["mss_policy"] = ordered_json{{"fixed", mss_policy.fixed_bytes}};
  switch (drop_plan.kind) {
    case DropPlan::Kind::kNone: j["drop_plan"] = "none"; break;
    case DropPlan::Kind::kHead: j["drop_plan"] = "head"; break;
    case DropPlan::Kind::kTail: j["drop_plan"] = "tail"; break;
    case DropPlan::Kind::kWithin:
      j["drop_plan"] = ordered_json{{"within", drop_plan.within_index}};
      break;
    case DropPlan::Kind::kRandom:
      j["drop_plan"] = ordered_json{{"random", drop_plan.probability}};
      break;
  }
  if (!pacing.enabled)
    j["pacing"] = "off";
  else
    j["pacing"] = ordered_json{{"initial_burst", pacing.initial_burst},
                               {"train", pacing.train},
                               {"rate_multiplier", pacing.rate_multiplier}};
  j["rto_ms"] = rto_ms;
  j["max_retransmissions"] = max_retransmissions;
  j["artificial_rtt_ms"] = artificial_rtt_ms;
  j["announce_mss_option"] = announce_mss_option;
  return j.dump();
}

OriginConfig OriginConfig::from_json(const std::string& text) {
  const auto j = ordered_json::parse(text);
  OriginConfig c;
  if (j.contains("iw")) {
    const auto& iw = j.at("iw");
    if (iw.contains("segments"))
      c.iw = IwConfig::segments(iw.at("segments").get<std::uint64_t>());
    else
      c.iw = IwConfig::bytes(iw.at("bytes").get<std::uint64_t>());
  }
  if (j.contains("object_size")) c.object_size = j.at("object_size");
  if (j.contains("mss_policy")) {
    const auto& p = j.at("mss_policy");
    c.mss_policy = p.is_string() ? MssPolicy::honor()
                                 : MssPolicy::fixed(p.at("fixed"));
  }
  if (j.contains("drop_plan")) {
    const auto& d = j.at("drop_plan");
    if (d.is_string()) {
      const std::string s = d.get<std::string>();
      if (s == "none") c.drop_plan = DropPlan::none();
      else if (s == "head") c.drop_plan = DropPlan::head();
      else if (s == "tail") c.drop_plan = DropPlan::tail();
      else throw std::invalid_argument("unknown drop_plan: " + s);
    } else if (d.contains("within")) {
      c.drop_plan = DropPlan::within(d.at("within"));
    } else {
      c.drop_plan = DropPlan::random(d.at("random"));
    }
  }
  if (j.contains("pacing")) {
    const auto& p = j.at("pacing");
    if (p.is_string()) {
      c.pacing = PacingConfig::off();
    } else {
      c.pacing.enabled = true;
      c.pacing.initial_burst = p.value("initial_burst", 10u);
      c.pacing.train = p.value("train", 2u);
      c.pacing.rate_multiplier = p.value("rate_multiplier", 1.0);
    }
  }
  c.rto_ms = j.value("rto_ms", std::int64_t{1'000});
  c.max_retransmissions = j.value("max_retransmissions", 3u);
  c.artificial_rtt_ms = j.value("artificial_rtt_ms", std::int64_t{0});
  c.announce_mss_option = j.value("announce_mss_option", true);
  c.validate();
  return c;
}

std::vector<TimeNs> pacing_schedule(const OriginConfig& config,
                                    std::uint32_t segment_size,
                                    std::uint32_t num_segments,
                                    std::uint64_t iw_bytes, TimeNs rtt) {
  std::vector<TimeNs> offsets(num_segments, 0);
  if (!config.pacing.enabled || iw_bytes == 0) return offsets;
  const auto& p = config.pacing;
  const double train_bytes = static_cast<double>(p.train) * segment_size;
  const double gap_ns = static_cast<double>(rtt) * train_bytes /
                        (static_cast<double>(iw_bytes) * p.rate_multiplier);
  for (std::uint32_t i = p.initial_burst; i < num_segments; ++i) {
    const std::uint32_t train_index = (i - p.initial_burst) / p.train + 1;
    offsets[i] = static_cast<TimeNs>(train_index * gap_ns);
  }
  return offsets;
}

}  // namespace iwprobe::origin
