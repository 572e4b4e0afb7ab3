// Command-line front end: target preparation, scan campaigns, reports,
// pacing analysis and the flow model, one subcommand each.

#include <CLI11.hpp>
#include <atomic>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "iwprobe/flowmodel/model.hpp"
#include "iwprobe/pacing/analyzer.hpp"
#include "iwprobe/pipeline/campaign.hpp"
#include "iwprobe/pipeline/classify.hpp"
#include "iwprobe/pipeline/report.hpp"
#include "iwprobe/pipeline/shaper.hpp"
#include "iwprobe/probe/raw_transport.hpp"

namespace {

using namespace iwprobe;

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return is;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  return os;
}

std::string slurp(const std::string& path) {
  auto is = open_in(path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::map<std::string, pipeline::SimHost> load_fleet(const std::string& path) {
  const auto j = nlohmann::ordered_json::parse(slurp(path));
  std::map<std::string, pipeline::SimHost> fleet;
  for (const auto& [host, cfg] : j.items()) {
    pipeline::SimHost sim_host;
    sim_host.origin = origin::OriginConfig::from_json(cfg.at("origin").dump());
    sim_host.rtt_ms = cfg.value("rtt_ms", std::int64_t{20});
    fleet[host] = sim_host;
  }
  return fleet;
}

int cmd_classify(const std::string& records_path, const std::string& patterns_path,
                 const std::string& out_path) {
  auto records_in = open_in(records_path);
  const auto records = pipeline::read_records(records_in);
  const auto patterns = pipeline::CdnPatternSet::from_json(slurp(patterns_path));

  auto os = open_out(out_path);
  std::size_t matched = 0;
  std::vector<pipeline::Target> classified;
  for (const auto& r : records) {
    auto cdn = pipeline::classify_cdn(r.domain, r.cname_chain, patterns);
    if (!cdn) continue;
    ++matched;
    classified.push_back(pipeline::Target{r, *cdn});
  }
  pipeline::write_targets_jsonl(os, classified);
  std::cerr << "classified " << matched << " of " << records.size()
            << " records\n";
  return 0;
}

int cmd_select(const std::string& records_path, const std::string& patterns_path,
               std::uint64_t min_bytes, const std::string& sample_from,
               std::uint32_t sample_k, std::uint64_t seed,
               const std::string& out_path) {
  auto records_in = open_in(records_path);
  const auto records = pipeline::read_records(records_in);
  const auto patterns = pipeline::CdnPatternSet::from_json(slurp(patterns_path));

  auto targets = pipeline::select_targets(records, patterns);
  pipeline::FilterStats stats;
  targets = pipeline::filter_small_objects(targets, min_bytes, &stats);
  std::cerr << "kept " << targets.size() << " targets, removed "
            << stats.removed << " small objects (" << stats.cdns_lost
            << " CDNs lost)\n";

  if (!sample_from.empty()) {
    auto results_in = open_in(sample_from);
    const auto results = pipeline::read_results_jsonl(results_in);
    std::vector<std::pair<pipeline::Target, estimate::IWProfile>> profiled;
    for (const auto& t : targets)
      for (const auto& r : results)
        if (r.target.record.url == t.record.url && r.error.empty()) {
          profiled.emplace_back(t, r.profile);
          break;
        }
    targets = pipeline::group_and_sample(profiled, sample_k, seed);
    std::cerr << "sampled " << targets.size()
              << " targets across (cdn, iw) groups\n";
  }

  auto os = open_out(out_path);
  pipeline::write_targets_jsonl(os, targets);
  return 0;
}

int cmd_campaign(const std::string& targets_path, const std::string& out_path,
                 const std::string& transport, const std::string& fleet_path,
                 const std::string& local_ip, pipeline::CampaignConfig config,
                 const std::string& vantage_label) {
  auto targets_in = open_in(targets_path);
  const auto targets = pipeline::read_targets_jsonl(targets_in);

  pipeline::Vantage vantage;
  if (transport == "sim") {
    if (fleet_path.empty())
      throw std::runtime_error("--fleet is required with --transport sim");
    vantage = pipeline::make_sim_vantage(vantage_label, load_fleet(fleet_path));
  } else if (transport == "raw") {
    if (!probe::raw_transport_supported())
      throw std::runtime_error("raw transport unsupported on this platform");
    auto counter = std::make_shared<std::atomic<std::uint16_t>>(0);
    vantage.label = vantage_label;
    vantage.factory = [local_ip, counter](const pipeline::Target& target,
                                          const pipeline::ProbeContext&) {
      if (target.record.ip.empty())
        throw std::runtime_error("target has no resolved ip: " +
                                 target.record.url);
      const std::uint16_t port =
          static_cast<std::uint16_t>(40'000 + counter->fetch_add(1) % 20'000);
      return probe::make_raw_transport(Endpoint{local_ip, port},
                                       Endpoint{target.record.ip, 80});
    };
  } else {
    throw std::runtime_error("unknown transport: " + transport);
  }

  pipeline::TokenBucket shaper(config.pps_limit);
  auto os = open_out(out_path);
  const auto results =
      pipeline::run_campaign(config, targets, vantage, os, &shaper);
  std::size_t failures = 0;
  for (const auto& r : results)
    if (!r.error.empty()) ++failures;
  std::cerr << "campaign finished: " << results.size() << " targets, "
            << failures << " failures\n";
  return 0;
}

int cmd_report(const std::string& results_path, const std::string& out_dir) {
  auto is = open_in(results_path);
  const auto results = pipeline::read_results_jsonl(is);
  pipeline::write_report_files(results, out_dir);
  std::cerr << "wrote report_a.csv, report_b.csv, report_c.csv to " << out_dir
            << "\n";
  return 0;
}

int cmd_pace(const std::vector<std::string>& inputs, const std::string& out_path) {
  auto os = open_out(out_path);
  os << "host,classification,initial_burst,median_train,spread_ratio\n";
  char buf[64];
  for (const auto& path : inputs) {
    auto is = open_in(path);
    std::string host = path;
    const auto sample = pacing::read_sample_jsonl(is, &host);
    const auto verdict = pacing::detect_pacing(sample);
    std::snprintf(buf, sizeof buf, "%.4f", verdict.spread_ratio);
    os << host << ',' << pacing::to_string(verdict.classification) << ','
       << verdict.initial_burst << ',' << verdict.median_train << ',' << buf
       << '\n';
  }
  return 0;
}

int cmd_model(const std::vector<std::uint32_t>& iws,
              const std::vector<double>& bandwidths,
              const std::vector<double>& rtts,
              const std::vector<std::uint32_t>& qlims, std::uint64_t flow,
              double ingress, const std::string& out_path) {
  flowmodel::GridSpec grid;
  grid.iws = iws;
  grid.flows = {flow};
  grid.ingress_rate_mbps = ingress;
  for (double bw : bandwidths)
    for (double rtt : rtts)
      for (std::uint32_t qlim : qlims) {
        flowmodel::NetworkConfig net;
        net.bandwidth_mbps = bw;
        net.rtt_ms = rtt;
        net.queue_limit = qlim;
        grid.nets.push_back(net);
      }
  std::ostringstream csv;
  flowmodel::sweep_grid(grid, csv);  // throws before the file is touched
  auto os = open_out(out_path);
  os << csv.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TCP initial congestion window measurement toolkit"};
  app.require_subcommand(1);

  std::string records_path, patterns_path, out_path, results_path;
  std::string targets_path, transport = "sim", fleet_path, local_ip = "0.0.0.0";
  std::string out_dir = "reports", vantage_label = "local";
  std::string sample_from;
  std::uint64_t min_bytes = pipeline::kDefaultMinObjectBytes;
  std::uint32_t sample_k = 5;
  std::vector<std::string> pace_inputs;
  pipeline::CampaignConfig config;

  auto* classify = app.add_subcommand("classify", "tag records with their CDN");
  classify->add_option("--records", records_path)->required();
  classify->add_option("--patterns", patterns_path)->required();
  classify->add_option("--out", out_path)->required();

  auto* select = app.add_subcommand(
      "select", "one largest-object URL per domain, small objects removed");
  select->add_option("--records", records_path)->required();
  select->add_option("--patterns", patterns_path)->required();
  select->add_option("--min-bytes", min_bytes, "object size floor");
  select->add_option("--sample-from", sample_from,
                     "prior results JSONL for (cdn, iw) group sampling");
  select->add_option("--sample-k", sample_k, "targets per (cdn, iw) group");
  select->add_option("--seed", config.seed);
  select->add_option("--out", out_path)->required();

  auto* campaign = app.add_subcommand("campaign", "run the IW scan campaign");
  campaign->add_option("--targets", targets_path)->required();
  campaign->add_option("--out", out_path)->required();
  campaign->add_option("--transport", transport, "sim | raw");
  campaign->add_option("--fleet", fleet_path, "sim fleet JSON");
  campaign->add_option("--local-ip", local_ip, "source address (raw)");
  campaign->add_option("--mss", config.mss_sweep, "segment size sweep");
  campaign->add_option("--reps", config.repetitions);
  campaign->add_option("--pps", config.pps_limit, "packets per second limit");
  campaign->add_option("--parallel", config.max_parallel);
  campaign->add_option("--seed", config.seed);
  campaign->add_option("--ack-delay-ms", config.handshake_ack_delay_ms,
                       "handshake ACK delay (pacing runs)");
  campaign->add_option("--vote-threshold", config.vote_threshold);
  campaign->add_option("--vantage", vantage_label);
  bool no_pacing = false;
  campaign->add_flag("--no-pacing", no_pacing, "skip pacing analysis");

  auto* report = app.add_subcommand("report", "CSV reports from results");
  report->add_option("--results", results_path)->required();
  report->add_option("--out-dir", out_dir);

  auto* pace = app.add_subcommand("pace", "classify arrival timing imports");
  pace->add_option("--input", pace_inputs, "JSONL timing files")->required();
  pace->add_option("--out", out_path)->required();

  std::vector<std::uint32_t> iws = {4, 10, 16, 20, 32, 50};
  std::vector<double> bandwidths = {4, 7, 26, 100};
  std::vector<double> rtts = {30, 100, 250};
  std::vector<std::uint32_t> qlims = {16};
  std::uint64_t flow = 71'000;
  double ingress = 1'000.0;
  auto* model = app.add_subcommand("model", "roundtrip/AFCT/loss model sweep");
  model->add_option("--iws", iws);
  model->add_option("--bandwidths", bandwidths, "Mbit/s");
  model->add_option("--rtts", rtts, "ms");
  model->add_option("--qlims", qlims, "bottleneck queue packets");
  model->add_option("--flow", flow, "flow size in bytes");
  model->add_option("--ingress", ingress, "ingress rate Mbit/s");
  model->add_option("--out", out_path)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*classify) return cmd_classify(records_path, patterns_path, out_path);
    if (*select)
      return cmd_select(records_path, patterns_path, min_bytes, sample_from,
                        sample_k, config.seed, out_path);
    if (*campaign) {
      config.analyze_pacing = !no_pacing;
      return cmd_campaign(targets_path, out_path, transport, fleet_path,
                          local_ip, config, vantage_label);
    }
    if (*report) return cmd_report(results_path, out_dir);
    if (*pace) return cmd_pace(pace_inputs, out_path);
    if (*model)
      return cmd_model(iws, bandwidths, rtts, qlims, flow, ingress, out_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
