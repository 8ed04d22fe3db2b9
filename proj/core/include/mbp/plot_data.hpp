#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mbp/config.hpp"
#include "mbp/harness.hpp"

namespace mbp {

inline constexpr int kCsvFormatVersion = 1;

// "# mbp <name> format-version 1" followed by the header row.
void write_csv_preamble(std::ostream& os, const std::string& name, const std::string& header);

// Trailing mean over min(window, t + 1) frames ending at t.
std::vector<double> window_average(const std::vector<double>& series, std::size_t window);

// One row per (model, frame) with (frame + 1) % stride == 0:
// model,frame,raw,window_avg.
void write_time_series(std::ostream& os, const std::string& name,
                       const std::vector<const RunResult*>& runs,
                       const std::vector<double> MetricsLog::*series, std::size_t stride,
                       std::size_t window);

void write_per_drop_sumrate(std::ostream& os, const CampaignSummary& s);
void write_per_drop_utility(std::ostream& os, const CampaignSummary& s);
void write_summary(std::ostream& os, const CampaignSummary& s);
// model,flow,ue,direction,delivered_bps,offered_bps
void write_per_user_rates(std::ostream& os, const std::vector<const RunResult*>& runs,
                          const std::vector<FlowSpec>& flows);

struct SvgSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

// Self-contained line chart.
void write_svg_chart(std::ostream& os, const std::string& title, const std::string& x_label,
                     const std::string& y_label, const std::vector<SvgSeries>& series);

// Every campaign file into cfg.output_dir. Throws IoError when a file
// cannot be written. Returns the paths written.
std::vector<std::string> emit_plot_data(const CampaignSummary& s, const SimConfig& cfg);

// Time series, per-user rates and a one-row summary for a single run.
std::vector<std::string> emit_single_run(const SingleRun& run, const SimConfig& cfg);

}  // namespace mbp
