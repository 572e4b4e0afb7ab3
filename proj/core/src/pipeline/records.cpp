#include "iwprobe/pipeline/records.hpp"

#include <nlohmann/json.hpp>
#include <sstream>
#include <stdexcept>

namespace iwprobe::pipeline {

using nlohmann::ordered_json;

CdnPatternSet CdnPatternSet::from_json(const std::string& text) {
  CdnPatternSet set;
  const auto j = ordered_json::parse(text);
  for (const auto& [cdn, suffixes] : j.items()) {
    std::vector<std::string> list;
    for (const auto& s : suffixes) {
      std::string suffix = s.get<std::string>();
      for (auto& c : suffix) c = static_cast<char>(std::tolower(c));
      list.push_back(std::move(suffix));
    }
    set.entries[cdn] = std::move(list);
  }
  return set;
}

std::string CdnPatternSet::to_json() const {
  ordered_json j;
  for (const auto& [cdn, suffixes] : entries) j[cdn] = suffixes;
  return j.dump(2);
}

void CampaignConfig::validate() const {
  if (mss_sweep.empty()) throw std::invalid_argument("empty mss sweep");
  for (auto mss : mss_sweep)
    if (mss < 64 || mss > 1460)
      throw std::invalid_argument("mss out of [64, 1460]");
  if (repetitions < 3)
    throw std::invalid_argument("voting needs >= 3 repetitions");
  if (pps_limit < 1.0) throw std::invalid_argument("pps_limit must be >= 1");
  if (max_parallel < 1) throw std::invalid_argument("max_parallel must be >= 1");
  if (vote_threshold <= 0.0 || vote_threshold >= 1.0)
    throw std::invalid_argument("vote_threshold must be in (0, 1)");
  if (sample_per_group < 1)
    throw std::invalid_argument("sample_per_group must be >= 1");
}

namespace {

UrlRecord record_from_json(const ordered_json& j) {
  UrlRecord r;
  r.url = j.at("url");
  r.domain = j.at("domain");
  r.object_size = j.value("object_size", std::uint64_t{0});
  r.mime_type = j.value("mime_type", std::string{});
  if (j.contains("cname_chain"))
    for (const auto& c : j.at("cname_chain"))
      r.cname_chain.push_back(c.get<std::string>());
  r.ip = j.value("ip", std::string{});
  return r;
}

ordered_json record_to_json(const UrlRecord& r) {
  ordered_json j;
  j["url"] = r.url;
  j["domain"] = r.domain;
  j["object_size"] = r.object_size;
  if (!r.mime_type.empty()) j["mime_type"] = r.mime_type;
  if (!r.cname_chain.empty()) j["cname_chain"] = r.cname_chain;
  if (!r.ip.empty()) j["ip"] = r.ip;
  return j;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

UrlRecord record_from_csv(const std::string& line) {
  const auto fields = split(line, ',');
  if (fields.size() < 3) throw std::runtime_error("bad record row: " + line);
  UrlRecord r;
  r.url = fields[0];
  r.domain = fields[1];
  r.object_size = std::stoull(fields[2]);
  if (fields.size() > 3) r.mime_type = fields[3];
  if (fields.size() > 4 && !fields[4].empty())
    for (auto& name : split(fields[4], ';'))
      if (!name.empty()) r.cname_chain.push_back(name);
  if (fields.size() > 5) r.ip = fields[5];
  return r;
}

}  // namespace

std::vector<UrlRecord> read_records(std::istream& is) {
  std::vector<UrlRecord> records;
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (first && line.rfind("url,", 0) == 0) {  // CSV header
      first = false;
      continue;
    }
    first = false;
    if (line.front() == '{')
      records.push_back(record_from_json(ordered_json::parse(line)));
    else
      records.push_back(record_from_csv(line));
  }
  return records;
}

void write_records_jsonl(std::ostream& os,
                         const std::vector<UrlRecord>& records) {
  for (const auto& r : records) os << record_to_json(r).dump() << '\n';
}

std::vector<Target> read_targets_jsonl(std::istream& is) {
  std::vector<Target> targets;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto j = ordered_json::parse(line);
    Target t;
    t.record = record_from_json(j);
    t.cdn = j.value("cdn", std::string{});
    targets.push_back(std::move(t));
  }
  return targets;
}

void write_targets_jsonl(std::ostream& os, const std::vector<Target>& targets) {
  for (const auto& t : targets) {
    auto j = record_to_json(t.record);
    j["cdn"] = t.cdn;
    os << j.dump() << '\n';
  }
}

}  // namespace iwprobe::pipeline
