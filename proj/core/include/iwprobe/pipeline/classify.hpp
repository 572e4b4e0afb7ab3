#pragma once

#include <optional>

#include "iwprobe/estimate/types.hpp"
#include "iwprobe/pipeline/records.hpp"

namespace iwprobe::pipeline {

// Walks the domain, then the CNAME chain in resolution order; the first hop
// carrying any known suffix decides. Suffixes never match mid-label.
std::optional<std::string> classify_cdn(const std::string& domain,
                                        const std::vector<std::string>& cname_chain,
                                        const CdnPatternSet& patterns);

// CDN-classified records only, one per domain: the largest object wins,
// ties go to the lexicographically smallest URL.
std::vector<Target> select_targets(const std::vector<UrlRecord>& records,
                                   const CdnPatternSet& patterns);

struct FilterStats {
  std::size_t removed = 0;
  std::size_t cdns_lost = 0;  // CDNs with no surviving target
};

// One byte beyond the largest IW worth estimating: 100 segments of 1460.
constexpr std::uint64_t kDefaultMinObjectBytes = 101ull * 1460;

std::vector<Target> filter_small_objects(const std::vector<Target>& targets,
                                         std::uint64_t min_bytes,
                                         FilterStats* stats = nullptr);

// Uniform per-(cdn, basis, iw) sample of at most k targets per group,
// deterministic under a fixed seed.
std::vector<Target> group_and_sample(
    const std::vector<std::pair<Target, estimate::IWProfile>>& profiles,
    std::uint32_t k, std::uint64_t seed);

}  // namespace iwprobe::pipeline
