#include "iwprobe/pipeline/report.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace iwprobe::pipeline {

std::string iw_label(estimate::IwBasis basis, std::uint64_t value) {
  if (basis == estimate::IwBasis::kByteBased) {
    if (value >= 1'000 && value % 100 == 0) {
      char buf[32];
      if (value % 1'000 == 0)
        std::snprintf(buf, sizeof buf, "%llukB",
                      static_cast<unsigned long long>(value / 1'000));
      else
        std::snprintf(buf, sizeof buf, "%.1fkB",
                      static_cast<double>(value) / 1'000.0);
      return buf;
    }
    return std::to_string(value) + "B";
  }
  return std::to_string(value);
}

namespace {

std::string csv_a(const std::vector<ScanResult>& results) {
  std::set<std::tuple<std::string, std::string, std::uint32_t, std::uint64_t>>
      rows;
  for (const auto& r : results) {
    if (!r.error.empty()) continue;
    rows.insert({r.target.cdn, estimate::to_string(r.profile.basis),
                 r.profile.iw_segments_normalized, r.profile.iw_bytes});
  }
  std::ostringstream os;
  os << "cdn,basis,iw_segments,iw_bytes\n";
  for (const auto& [cdn, basis, segs, bytes] : rows)
    os << cdn << ',' << basis << ',' << segs << ',' << bytes << '\n';
  return os.str();
}

std::string csv_b(const std::vector<ScanResult>& results) {
  // (cdn, mime) -> iw label -> count
  std::map<std::pair<std::string, std::string>,
           std::map<std::string, std::size_t>>
      counts;
  for (const auto& r : results) {
    if (!r.error.empty()) continue;
    if (r.target.record.mime_type.empty()) continue;
    const std::string label =
        r.profile.basis == estimate::IwBasis::kIndeterminate
            ? "indeterminate"
            : iw_label(r.profile.basis,
                       r.profile.basis == estimate::IwBasis::kSegmentBased
                           ? r.profile.iw_segments_normalized
                           : r.profile.iw_bytes);
    ++counts[{r.target.cdn, r.target.record.mime_type}][label];
  }
  std::ostringstream os;
  os << "cdn,mime_type,iw,share_pct\n";
  char buf[32];
  for (const auto& [key, by_label] : counts) {
    std::size_t total = 0;
    for (const auto& [label, n] : by_label) total += n;
    for (const auto& [label, n] : by_label) {
      std::snprintf(buf, sizeof buf, "%.2f",
                    100.0 * static_cast<double>(n) / static_cast<double>(total));
      os << key.first << ',' << key.second << ',' << label << ',' << buf
         << '\n';
    }
  }
  return os.str();
}

struct CellStats {
  std::uint64_t min_value = 0;
  std::uint64_t max_value = 0;
  bool any = false;

  void add(std::uint64_t v) {
    if (!any) {
      min_value = max_value = v;
      any = true;
    } else {
      min_value = std::min(min_value, v);
      max_value = std::max(max_value, v);
    }
  }
};

std::string csv_c(const std::vector<ScanResult>& results) {
  std::set<std::string> vantages;
  // (cdn, basis) -> vantage -> stats
  std::map<std::pair<std::string, estimate::IwBasis>,
           std::map<std::string, CellStats>>
      cells;
  for (const auto& r : results) {
    if (!r.error.empty()) continue;
    vantages.insert(r.vantage);
    auto& cell = cells[{r.target.cdn, r.profile.basis}][r.vantage];
    for (const auto& t : r.trials) {
      if (t.estimate.outcome == estimate::TrialOutcome::kInconclusive)
        continue;
      // per-trial values are comparable across segment sizes: segment counts
      // for segment-based hosts, byte totals for byte-based ones
      cell.add(r.profile.basis == estimate::IwBasis::kByteBased
                   ? t.estimate.iw_bytes
                   : t.estimate.iw_segments);
    }
  }

  std::ostringstream os;
  os << "cdn,basis";
  for (const auto& v : vantages) os << ',' << v;
  os << '\n';
  for (const auto& [key, by_vantage] : cells) {
    os << key.first << ',' << estimate::to_string(key.second);
    for (const auto& v : vantages) {
      os << ',';
      auto it = by_vantage.find(v);
      if (it == by_vantage.end() || !it->second.any) {
        os << '-';
        continue;
      }
      const auto& stats = it->second;
      if (stats.min_value == stats.max_value)
        os << iw_label(key.second, stats.min_value);
      else
        os << iw_label(key.second, stats.min_value) << '-'
           << iw_label(key.second, stats.max_value);
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace

ReportFiles emit_report(const std::vector<ScanResult>& results) {
  if (results.empty()) throw std::invalid_argument("no results to report");
  return ReportFiles{csv_a(results), csv_b(results), csv_c(results)};
}

void write_report_files(const std::vector<ScanResult>& results,
                        const std::string& directory) {
  const auto files = emit_report(results);
  namespace fs = std::filesystem;
  fs::create_directories(directory);
  const std::pair<const char*, const std::string*> outputs[] = {
      {"report_a.csv", &files.cdn_configurations_csv},
      {"report_b.csv", &files.mime_shares_csv},
      {"report_c.csv", &files.vantage_matrix_csv},
  };
  for (const auto& [name, content] : outputs) {
    std::ofstream os(fs::path(directory) / name, std::ios::binary);
    if (!os) throw std::runtime_error(std::string("cannot write ") + name);
    os << *content;
  }
}

}  // namespace iwprobe::pipeline
