#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>

#include "iwprobe/estimate/estimator.hpp"
#include "iwprobe/origin/config.hpp"
#include "iwprobe/pacing/analyzer.hpp"
#include "iwprobe/pipeline/records.hpp"
#include "iwprobe/probe/engine.hpp"

namespace iwprobe::pipeline {

struct ProbeContext {
  std::size_t target_index = 0;
  std::uint16_t mss = 0;
  std::uint32_t repetition = 0;
  std::uint64_t seed = 0;  // derived from campaign seed, stable per probe
};

// The vantage point is a labeled transport factory; binding it to a real
// network location is a deployment concern.
struct Vantage {
  std::string label;
  std::function<std::unique_ptr<probe::Transport>(const Target&,
                                                  const ProbeContext&)>
      factory;
};

struct TrialRecord {
  std::uint16_t mss = 0;
  std::uint32_t repetition = 0;
  probe::ProbeOutcome probe_outcome = probe::ProbeOutcome::kAborted;
  estimate::TrialEstimate estimate;
};

struct ScanResult {
  Target target;
  std::string vantage;
  estimate::IWProfile profile;
  std::vector<TrialRecord> trials;
  std::optional<pacing::PacingVerdict> pacing;
  TimeNs started_ns = 0;
  TimeNs finished_ns = 0;
  std::string error;  // per-target failure note, empty on success
};

std::string result_to_json(const ScanResult& result);
std::vector<ScanResult> read_results_jsonl(std::istream& is);

struct CampaignHooks {
  std::function<void()> on_probe_start;  // connection about to open
  std::function<void()> on_probe_end;    // connection torn down
};

// Runs sweep x repetitions probes per target with at most max_parallel
// targets in flight, votes, classifies, and appends one JSONL line per
// target to `results_out` in input order (byte-stable under a fixed seed
// when the transports are deterministic). Per-target failures are recorded,
// never fatal; only a write failure aborts the campaign.
std::vector<ScanResult> run_campaign(const CampaignConfig& config,
                                     const std::vector<Target>& targets,
                                     const Vantage& vantage,
                                     std::ostream& results_out,
                                     probe::SendPermitter* shaper = nullptr,
                                     const CampaignHooks* hooks = nullptr);

// Per-host mock fleet for emulated campaigns; the factory spins up one
// isolated origin + virtual clock per probe.
struct SimHost {
  origin::OriginConfig origin;
  std::int64_t rtt_ms = 20;
};

Vantage make_sim_vantage(std::string label,
                         std::map<std::string, SimHost> fleet);

}  // namespace iwprobe::pipeline
