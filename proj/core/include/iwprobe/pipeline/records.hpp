#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace iwprobe::pipeline {

struct UrlRecord {
  std::string url;
  std::string domain;  // the URL's host
  std::uint64_t object_size = 0;
  std::string mime_type;                  // optional
  std::vector<std::string> cname_chain;   // pre-resolved, in resolution order
  std::string ip;                         // optional, for live transports
};

// CDN name -> DNS suffixes. Matching is suffix-with-label-boundary:
// "x.edgesuite.net" matches "edgesuite.net", "fooedgesuite.net" does not.
struct CdnPatternSet {
  std::map<std::string, std::vector<std::string>> entries;

  static CdnPatternSet from_json(const std::string& text);
  std::string to_json() const;
};

struct CampaignConfig {
  std::vector<std::uint16_t> mss_sweep = {64, 128, 536, 1200};
  std::uint32_t repetitions = 10;
  std::uint32_t sample_per_group = 5;
  double pps_limit = 100.0;
  std::uint32_t max_parallel = 5;
  double vote_threshold = 0.5;  // strict: valid needs votes_for > threshold
  std::uint64_t seed = 0;
  std::int64_t handshake_ack_delay_ms = 0;
  std::int64_t retransmission_wait_ms = 10'000;
  std::int64_t probe_timeout_ms = 30'000;
  bool analyze_pacing = true;

  void validate() const;  // throws std::invalid_argument
};

struct Target {
  UrlRecord record;
  std::string cdn;
};

// JSONL of UrlRecord, one object per line. CSV is also accepted:
// url,domain,object_size,mime_type,cname1;cname2,...[,ip]
std::vector<UrlRecord> read_records(std::istream& is);
void write_records_jsonl(std::ostream& os, const std::vector<UrlRecord>& records);

std::vector<Target> read_targets_jsonl(std::istream& is);
void write_targets_jsonl(std::ostream& os, const std::vector<Target>& targets);

}  // namespace iwprobe::pipeline
