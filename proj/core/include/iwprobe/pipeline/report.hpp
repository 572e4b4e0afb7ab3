#pragma once

#include <string>
#include <vector>

#include "iwprobe/pipeline/campaign.hpp"

namespace iwprobe::pipeline {

struct ReportFiles {
  std::string cdn_configurations_csv;  // A: distinct IW configs per CDN
  std::string mime_shares_csv;         // B: per (cdn, mime) IW share percentages
  std::string vantage_matrix_csv;      // C: cdn x vantage, ranges on disagreement
};

// Cells of the vantage matrix show one value when all conclusive trials in
// the cell agree and a "min-max" range otherwise (the loss signature).
ReportFiles emit_report(const std::vector<ScanResult>& results);

// Writes report_a.csv / report_b.csv / report_c.csv under `directory`.
void write_report_files(const std::vector<ScanResult>& results,
                        const std::string& directory);

// "16" for segment-based IWs, "105kB" style for byte-based ones.
std::string iw_label(estimate::IwBasis basis, std::uint64_t value);

}  // namespace iwprobe::pipeline
