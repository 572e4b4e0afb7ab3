#include "iwprobe/pipeline/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <mutex>
#include <nlohmann/json.hpp>
#include <ostream>
#include <thread>

#include "iwprobe/origin/mock_origin.hpp"
#include "iwprobe/sim/net.hpp"

namespace iwprobe::pipeline {

using nlohmann::ordered_json;

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                       std::uint64_t c) {
  std::uint64_t h = seed ^ 0x9e3779b97f4a7c15ULL;
  for (std::uint64_t v : {a, b, c}) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h *= 0xff51afd7ed558ccdULL;
  }
  return h;
}

std::string url_path(const std::string& url) {
  auto scheme = url.find("://");
  const std::size_t host_start = scheme == std::string::npos ? 0 : scheme + 3;
  const auto slash = url.find('/', host_start);
  return slash == std::string::npos ? "/" : url.substr(slash);
}

ordered_json trial_to_json(const TrialRecord& t) {
  ordered_json j;
  j["mss"] = t.mss;
  j["rep"] = t.repetition;
  j["probe_outcome"] = probe::to_string(t.probe_outcome);
  j["outcome"] = estimate::to_string(t.estimate.outcome);
  j["iw_bytes"] = t.estimate.iw_bytes;
  j["iw_segments"] = t.estimate.iw_segments;
  j["distinct_bytes"] = t.estimate.distinct_bytes;
  j["verified_full"] = t.estimate.verified_full;
  return j;
}

TrialRecord trial_from_json(const ordered_json& j) {
  TrialRecord t;
  t.mss = j.at("mss");
  t.repetition = j.at("rep");
  const std::string outcome = j.at("outcome");
  t.estimate.mss = t.mss;
  t.estimate.iw_bytes = j.at("iw_bytes");
  t.estimate.iw_segments = j.at("iw_segments");
  t.estimate.distinct_bytes = j.at("distinct_bytes");
  t.estimate.verified_full = j.at("verified_full");
  if (outcome == "iw_limited") t.estimate.outcome = estimate::TrialOutcome::kIwLimited;
  else if (outcome == "data_limited") t.estimate.outcome = estimate::TrialOutcome::kDataLimited;
  else if (outcome == "tail_loss_suspected") t.estimate.outcome = estimate::TrialOutcome::kTailLossSuspected;
  else t.estimate.outcome = estimate::TrialOutcome::kInconclusive;
  return t;
}

}  // namespace

std::string result_to_json(const ScanResult& r) {
  ordered_json j;
  j["url"] = r.target.record.url;
  j["domain"] = r.target.record.domain;
  j["cdn"] = r.target.cdn;
  j["vantage"] = r.vantage;
  j["mime_type"] = r.target.record.mime_type;
  j["object_size"] = r.target.record.object_size;

  ordered_json prof;
  prof["basis"] = estimate::to_string(r.profile.basis);
  prof["iw_segments"] = r.profile.iw_segments_normalized;
  prof["iw_bytes"] = r.profile.iw_bytes;
  ordered_json per_mss = ordered_json::array();
  for (const auto& [mss, voted] : r.profile.per_mss) {
    ordered_json v;
    v["mss"] = mss;
    v["iw_bytes"] = voted.iw_bytes;
    v["votes_for"] = voted.votes_for;
    v["votes_total"] = voted.votes_total;
    v["valid"] = voted.valid;
    per_mss.push_back(v);
  }
  prof["per_mss"] = per_mss;
  j["profile"] = prof;

  ordered_json trials = ordered_json::array();
  for (const auto& t : r.trials) trials.push_back(trial_to_json(t));
  j["trials"] = trials;

  if (r.pacing) {
    ordered_json p;
    p["classification"] = pacing::to_string(r.pacing->classification);
    p["initial_burst"] = r.pacing->initial_burst;
    p["median_train"] = r.pacing->median_train;
    p["spread_ratio"] = r.pacing->spread_ratio;
    p["train_count"] = r.pacing->train_count;
    j["pacing"] = p;
  } else {
    j["pacing"] = nullptr;
  }
  j["started_ns"] = r.started_ns;
  j["finished_ns"] = r.finished_ns;
  j["error"] = r.error;
  return j.dump();
}

std::vector<ScanResult> read_results_jsonl(std::istream& is) {
  std::vector<ScanResult> results;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto j = ordered_json::parse(line);
    ScanResult r;
    r.target.record.url = j.at("url");
    r.target.record.domain = j.at("domain");
    r.target.cdn = j.at("cdn");
    r.vantage = j.at("vantage");
    r.target.record.mime_type = j.value("mime_type", std::string{});
    r.target.record.object_size = j.value("object_size", std::uint64_t{0});

    const auto& prof = j.at("profile");
    const std::string basis = prof.at("basis");
    if (basis == "segment_based") r.profile.basis = estimate::IwBasis::kSegmentBased;
    else if (basis == "byte_based") r.profile.basis = estimate::IwBasis::kByteBased;
    else r.profile.basis = estimate::IwBasis::kIndeterminate;
    r.profile.iw_segments_normalized = prof.at("iw_segments");
    r.profile.iw_bytes = prof.at("iw_bytes");
    for (const auto& v : prof.at("per_mss")) {
      estimate::VotedEstimate voted;
      voted.mss = v.at("mss");
      voted.iw_bytes = v.at("iw_bytes");
      voted.votes_for = v.at("votes_for");
      voted.votes_total = v.at("votes_total");
      voted.valid = v.at("valid");
      r.profile.per_mss[voted.mss] = voted;
    }
    for (const auto& t : j.at("trials")) r.trials.push_back(trial_from_json(t));
    if (j.contains("pacing") && !j.at("pacing").is_null()) {
      const auto& p = j.at("pacing");
      pacing::PacingVerdict v;
      const std::string c = p.at("classification");
      v.classification = c == "paced" ? pacing::PacingClass::kPaced
                         : c == "bursty" ? pacing::PacingClass::kBursty
                                         : pacing::PacingClass::kIndeterminate;
      v.initial_burst = p.at("initial_burst");
      v.median_train = p.at("median_train");
      v.spread_ratio = p.at("spread_ratio");
      v.train_count = p.at("train_count");
      r.pacing = v;
    }
    r.started_ns = j.value("started_ns", TimeNs{0});
    r.finished_ns = j.value("finished_ns", TimeNs{0});
    r.error = j.value("error", std::string{});
    results.push_back(std::move(r));
  }
  return results;
}

namespace {

ScanResult scan_target(const CampaignConfig& config, const Target& target,
                       std::size_t index, const Vantage& vantage,
                       probe::SendPermitter* shaper,
                       const CampaignHooks* hooks) {
  ScanResult result;
  result.target = target;
  result.vantage = vantage.label;

  std::map<std::uint32_t, estimate::VotedEstimate> per_mss;
  bool have_time = false;
  std::optional<pacing::PacingVerdict> pacing_verdict;
  std::uint16_t largest_mss = 0;
  for (auto mss : config.mss_sweep) largest_mss = std::max(largest_mss, mss);

  for (const std::uint16_t mss : config.mss_sweep) {
    std::vector<estimate::TrialEstimate> estimates;
    for (std::uint32_t rep = 0; rep < config.repetitions; ++rep) {
      ProbeContext ctx{index, mss, rep,
                       mix_seed(config.seed, index, mss, rep)};
      probe::ProbeSpec spec;
      spec.target = Endpoint{target.record.domain, 80};
      spec.host_name = target.record.domain;
      spec.resource_path = url_path(target.record.url);
      spec.announced_mss = mss;
      spec.handshake_ack_delay_ms = config.handshake_ack_delay_ms;
      spec.retransmission_wait_ms = config.retransmission_wait_ms;
      spec.probe_timeout_ms = config.probe_timeout_ms;
      spec.rng_seed = ctx.seed;

      auto transport = vantage.factory(target, ctx);
      if (!transport) {
        result.error = "transport factory returned null";
        continue;
      }
      if (hooks != nullptr && hooks->on_probe_start) hooks->on_probe_start();
      probe::ProbeTrace trace = probe::probe_once(spec, *transport, shaper);
      if (hooks != nullptr && hooks->on_probe_end) hooks->on_probe_end();

      if (!trace.events.empty()) {
        if (!have_time) {
          result.started_ns = trace.events.front().ts;
          have_time = true;
        }
        result.finished_ns =
            std::max(result.finished_ns, trace.events.back().ts);
      }

      TrialRecord rec;
      rec.mss = mss;
      rec.repetition = rep;
      rec.probe_outcome = trace.outcome;
      rec.estimate = estimate::estimate_trial(trace);
      estimates.push_back(rec.estimate);
      result.trials.push_back(rec);

      if (config.analyze_pacing && !pacing_verdict && mss == largest_mss &&
          trace.outcome == probe::ProbeOutcome::kCompleted) {
        auto sample = pacing::sample_from_trace(trace);
        if (sample.arrivals.size() >= 6)
          pacing_verdict = pacing::detect_pacing(sample);
      }
    }
    estimate::flag_tail_loss_suspects(estimates);
    // carry flags back into the recorded trials of this segment size
    std::size_t k = 0;
    for (auto& t : result.trials)
      if (t.mss == mss) t.estimate.outcome = estimates[k++].outcome;
    per_mss[mss] = estimate::vote(estimates, config.vote_threshold);
  }

  result.profile = estimate::classify_basis(per_mss);
  result.pacing = pacing_verdict;
  return result;
}

}  // namespace

std::vector<ScanResult> run_campaign(const CampaignConfig& config,
                                     const std::vector<Target>& targets,
                                     const Vantage& vantage,
                                     std::ostream& results_out,
                                     probe::SendPermitter* shaper,
                                     const CampaignHooks* hooks) {
  config.validate();
  if (targets.empty()) throw std::invalid_argument("no targets");

  std::vector<ScanResult> results(targets.size());
  std::vector<bool> done(targets.size(), false);
  std::mutex out_mutex;
  std::size_t next_to_write = 0;
  std::atomic<std::size_t> next_target{0};
  std::atomic<bool> write_failed{false};

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next_target.fetch_add(1);
      if (i >= targets.size() || write_failed.load()) return;
      ScanResult result;
      try {
        result = scan_target(config, targets[i], i, vantage, shaper, hooks);
      } catch (const std::exception& e) {
        result.target = targets[i];
        result.vantage = vantage.label;
        result.error = e.what();
      }
      std::lock_guard<std::mutex> lock(out_mutex);
      results[i] = std::move(result);
      done[i] = true;
      while (next_to_write < targets.size() && done[next_to_write]) {
        results_out << result_to_json(results[next_to_write]) << '\n';
        if (!results_out) {
          write_failed.store(true);
          return;
        }
        ++next_to_write;
      }
    }
  };

  const std::size_t nthreads =
      std::min<std::size_t>(config.max_parallel, targets.size());
  std::vector<std::thread> pool;
  for (std::size_t i = 0; i < nthreads; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  if (write_failed.load())
    throw std::runtime_error("failed writing campaign results");
  results_out.flush();
  return results;
}

namespace {

// Self-contained emulated endpoint: world + net + origin, one per probe.
class SimProbeLink final : public probe::Transport {
 public:
  SimProbeLink(const std::string& host, const SimHost& sim_host,
               std::uint64_t seed, std::uint16_t client_port)
      : net_(world_) {
    origin::OriginConfig cfg = sim_host.origin;
    cfg.artificial_rtt_ms = sim_host.rtt_ms;
    origin_ = std::make_unique<origin::MockOrigin>(
        net_, Endpoint{host, 80}, cfg, seed);
    inner_ = net_.connect(
        sim::Flow{Endpoint{"client", client_port}, Endpoint{host, 80}});
  }

  TimeNs now() override { return inner_->now(); }
  void send(const probe::TcpSegment& s) override { inner_->send(s); }
  std::optional<probe::Delivered> receive(TimeNs deadline) override {
    return inner_->receive(deadline);
  }
  void sleep_until(TimeNs t) override { inner_->sleep_until(t); }

 private:
  sim::World world_;
  sim::Net net_;
  std::unique_ptr<origin::MockOrigin> origin_;
  std::unique_ptr<probe::Transport> inner_;
};

}  // namespace

Vantage make_sim_vantage(std::string label,
                         std::map<std::string, SimHost> fleet) {
  auto shared = std::make_shared<std::map<std::string, SimHost>>(std::move(fleet));
  Vantage v;
  v.label = std::move(label);
  v.factory = [shared](const Target& target,
                       const ProbeContext& ctx) -> std::unique_ptr<probe::Transport> {
    auto it = shared->find(target.record.domain);
    if (it == shared->end()) return nullptr;
    const auto port = static_cast<std::uint16_t>(
        10'000 + (ctx.target_index * 131 + ctx.repetition * 7 + ctx.mss) % 50'000);
    return std::make_unique<SimProbeLink>(target.record.domain, it->second,
                                          ctx.seed, port);
  };
  return v;
}

}  // namespace iwprobe::pipeline
