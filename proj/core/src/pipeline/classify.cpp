#include "iwprobe/pipeline/classify.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <random>
#include <set>
#include <stdexcept>

namespace iwprobe::pipeline {

namespace {

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(c));
  return s;
}

bool suffix_matches(const std::string& name, const std::string& suffix) {
  if (name.size() < suffix.size()) return false;
  if (!name.ends_with(suffix)) return false;
  if (name.size() == suffix.size()) return true;
  return name[name.size() - suffix.size() - 1] == '.';  // label boundary
}

}  // namespace

std::optional<std::string> classify_cdn(
    const std::string& domain, const std::vector<std::string>& cname_chain,
    const CdnPatternSet& patterns) {
  std::vector<std::string> hops;
  hops.push_back(lower(domain));
  for (const auto& c : cname_chain) hops.push_back(lower(c));

  for (const auto& hop : hops)
    for (const auto& [cdn, suffixes] : patterns.entries)
      for (const auto& suffix : suffixes)
        if (suffix_matches(hop, suffix)) return cdn;
  return std::nullopt;
}

std::vector<Target> select_targets(const std::vector<UrlRecord>& records,
                                   const CdnPatternSet& patterns) {
  std::map<std::string, Target> best;  // by domain
  for (const auto& r : records) {
    auto cdn = classify_cdn(r.domain, r.cname_chain, patterns);
    if (!cdn) continue;
    const std::string domain = lower(r.domain);
    auto it = best.find(domain);
    if (it == best.end()) {
      best.emplace(domain, Target{r, *cdn});
      continue;
    }
    const auto& cur = it->second.record;
    if (r.object_size > cur.object_size ||
        (r.object_size == cur.object_size && r.url < cur.url))
      it->second = Target{r, *cdn};
  }
  std::vector<Target> out;
  out.reserve(best.size());
  for (auto& [domain, t] : best) out.push_back(std::move(t));
  return out;
}

std::vector<Target> filter_small_objects(const std::vector<Target>& targets,
                                         std::uint64_t min_bytes,
                                         FilterStats* stats) {
  if (min_bytes == 0) throw std::invalid_argument("min_bytes must be > 0");
  std::vector<Target> kept;
  std::set<std::string> cdns_before, cdns_after;
  for (const auto& t : targets) {
    cdns_before.insert(t.cdn);
    if (t.record.object_size >= min_bytes) {
      kept.push_back(t);
      cdns_after.insert(t.cdn);
    }
  }
  if (stats != nullptr) {
    stats->removed = targets.size() - kept.size();
    stats->cdns_lost = cdns_before.size() - cdns_after.size();
  }
  return kept;
}

std::vector<Target> group_and_sample(
    const std::vector<std::pair<Target, estimate::IWProfile>>& profiles,
    std::uint32_t k, std::uint64_t seed) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");

  struct GroupKey {
    std::string cdn;
    estimate::IwBasis basis;
    std::uint64_t value;
    bool operator<(const GroupKey& o) const {
      if (cdn != o.cdn) return cdn < o.cdn;
      if (basis != o.basis) return basis < o.basis;
      return value < o.value;
    }
  };
  std::map<GroupKey, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    const auto& prof = profiles[i].second;
    const std::uint64_t value = prof.basis == estimate::IwBasis::kSegmentBased
                                    ? prof.iw_segments_normalized
                                    : prof.iw_bytes;
    groups[GroupKey{profiles[i].first.cdn, prof.basis, value}].push_back(i);
  }

  std::vector<Target> out;
  for (auto& [key, indices] : groups) {
    // Partial Fisher-Yates: portable determinism, unlike std::sample.
    std::mt19937_64 rng(seed ^ std::hash<std::string>{}(key.cdn) ^
                        (key.value * 0x9e3779b97f4a7c15ULL +
                         static_cast<std::uint64_t>(key.basis)));
    const std::size_t take = std::min<std::size_t>(k, indices.size());
    for (std::size_t i = 0; i < take; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, indices.size() - 1);
      std::swap(indices[i], indices[pick(rng)]);
    }
    std::vector<std::size_t> chosen(indices.begin(), indices.begin() + take);
    std::sort(chosen.begin(), chosen.end());
    for (auto idx : chosen) out.push_back(profiles[idx].first);
  }
  return out;
}

}  // namespace iwprobe::pipeline
