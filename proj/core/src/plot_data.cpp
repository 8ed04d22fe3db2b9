#include "mbp/plot_data.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "mbp/error.hpp"

namespace mbp {

namespace fs = std::filesystem;

namespace {

// Streams used for every CSV so repeated runs are byte-identical.
void set_number_format(std::ostream& os) {
  os.imbue(std::locale::classic());
  os << std::setprecision(12);
}

class OutFile {
 public:
  OutFile(const fs::path& path, std::vector<std::string>& written) : path_(path) {
    os_.open(path);
    if (!os_) throw IoError("cannot write '" + path.string() + "'");
    set_number_format(os_);
    written.push_back(path.string());
  }
  ~OutFile() noexcept(false) {
    os_.close();
    if (!os_ && std::uncaught_exceptions() == 0) {
      throw IoError("error while writing '" + path_.string() + "'");
    }
  }
  std::ostream& stream() { return os_; }

 private:
  fs::path path_;
  std::ofstream os_;
};

fs::path prepare_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + dir + "'");
  return fs::path(dir);
}

bool is_uplink(const FlowSpec& f) {
  return std::find(f.destinations.begin(), f.destinations.end(), 0) != f.destinations.end();
}

std::string svg_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

void emit_time_series(const fs::path& base, const std::vector<const RunResult*>& runs,
                      const SimConfig& cfg, std::vector<std::string>& written) {
  struct Spec {
    const char* name;
    const std::vector<double> MetricsLog::*series;
    const char* y_label;
  };
  const Spec specs[] = {
      {"queues_vs_time", &MetricsLog::queue_l1, "sum of queues (bits)"},
      {"source_rate_vs_time", &MetricsLog::source_rate, "sum of source rates (bits/frame)"},
      {"delivered_vs_time", &MetricsLog::delivered, "delivered (bits/frame)"},
  };
  for (const Spec& sp : specs) {
    {
      OutFile f(base / (std::string(sp.name) + ".csv"), written);
      write_time_series(f.stream(), sp.name, runs, sp.series, cfg.snapshot_stride,
                        cfg.average_window);
    }
    if (!cfg.write_svg) continue;
    std::vector<SvgSeries> series;
    for (const RunResult* r : runs) {
      const auto& raw = r->log.*(sp.series);
      const auto avg = window_average(raw, cfg.average_window);
      SvgSeries s{std::string(to_string(r->model)), {}, {}};
      for (std::size_t t = 0; t < avg.size(); ++t) {
        if ((t + 1) % cfg.snapshot_stride != 0) continue;
        s.x.push_back(static_cast<double>(t + 1));
        s.y.push_back(avg[t]);
      }
      series.push_back(std::move(s));
    }
    OutFile f(base / (std::string(sp.name) + ".svg"), written);
    write_svg_chart(f.stream(), std::string(sp.name) + " (window " +
                                    std::to_string(cfg.average_window) + " frames)",
                    "frame", sp.y_label, series);
  }
}

}  // namespace

void write_csv_preamble(std::ostream& os, const std::string& name, const std::string& header) {
  os << "# mbp " << name << " format-version " << kCsvFormatVersion << '\n' << header << '\n';
}

std::vector<double> window_average(const std::vector<double>& series, std::size_t window) {
  std::vector<double> out(series.size());
  double acc = 0.0;
  for (std::size_t t = 0; t < series.size(); ++t) {
    acc += series[t];
    if (t >= window) acc -= series[t - window];
    out[t] = acc / static_cast<double>(std::min(window, t + 1));
  }
  return out;
}

void write_time_series(std::ostream& os, const std::string& name,
                       const std::vector<const RunResult*>& runs,
                       const std::vector<double> MetricsLog::*series, std::size_t stride,
                       std::size_t window) {
  write_csv_preamble(os, name, "model,frame,raw,window_avg");
  for (const RunResult* r : runs) {
    const auto& raw = r->log.*series;
    const auto avg = window_average(raw, window);
    for (std::size_t t = 0; t < raw.size(); ++t) {
      if ((t + 1) % stride != 0) continue;
      os << to_string(r->model) << ',' << t + 1 << ',' << raw[t] << ',' << avg[t] << '\n';
    }
  }
}

void write_per_drop_sumrate(std::ostream& os, const CampaignSummary& s) {
  write_csv_preamble(os, "per_drop_sumrate", "drop,seed,model,ok,sum_rate_bps");
  for (const DropOutcome& d : s.drops) {
    for (const RunResult& r : d.runs) {
      os << d.index << ',' << d.seed << ',' << to_string(r.model) << ',' << (r.ok ? 1 : 0) << ','
         << (r.ok ? r.sum_rate_bps : std::numeric_limits<double>::quiet_NaN()) << '\n';
    }
  }
}

void write_per_drop_utility(std::ostream& os, const CampaignSummary& s) {
  write_csv_preamble(os, "per_drop_utility", "drop,seed,model,ok,sum_utility");
  for (const DropOutcome& d : s.drops) {
    for (const RunResult& r : d.runs) {
      os << d.index << ',' << d.seed << ',' << to_string(r.model) << ',' << (r.ok ? 1 : 0) << ','
         << (r.ok ? r.sum_utility : std::numeric_limits<double>::quiet_NaN()) << '\n';
    }
  }
}

void write_summary(std::ostream& os, const CampaignSummary& s) {
  write_csv_preamble(os, "summary", "kind,model,reference,drops,mean,std,gain_of_means_pct,mean_of_gains_pct");
  for (const ModelStats& m : s.models) {
    os << "sum_rate_bps," << to_string(m.model) << ",," << m.drops << ',' << m.sum_rate_mean << ','
       << m.sum_rate_std << ",,\n";
  }
  for (const ModelStats& m : s.models) {
    os << "sum_utility," << to_string(m.model) << ",," << m.drops << ',' << m.utility_mean << ','
       << m.utility_std << ",,\n";
  }
  for (const GainStats& g : s.gains) {
    os << "sum_rate_gain," << to_string(g.model) << ',' << to_string(g.reference) << ','
       << g.drops << ",,," << g.gain_of_means_pct << ',' << g.mean_of_gains_pct << '\n';
  }
  os << "ordering_fraction,,," << s.drops.size() << ',' << s.ordering_fraction << ",,,\n";
  os << "failed_runs,,," << s.drops.size() << ',' << s.failed_runs << ",,,\n";
}

void write_per_user_rates(std::ostream& os, const std::vector<const RunResult*>& runs,
                          const std::vector<FlowSpec>& flows) {
  write_csv_preamble(os, "per_user_rates", "model,flow,ue,direction,delivered_bps,offered_bps");
  for (const RunResult* r : runs) {
    const auto offered = r->log.flow_arrival_bps();
    for (const FlowSpec& f : flows) {
      const bool up = is_uplink(f);
      const NodeId ue = up ? f.sources.front() : f.destinations.front();
      const double delivered =
          static_cast<std::size_t>(f.id) < r->flow_rate_bps.size() ? r->flow_rate_bps[f.id] : 0.0;
      const double off = static_cast<std::size_t>(f.id) < offered.size() ? offered[f.id] : 0.0;
      os << to_string(r->model) << ',' << f.id << ',' << ue << ',' << (up ? "uplink" : "downlink")
         << ',' << delivered << ',' << off << '\n';
    }
  }
}

void write_svg_chart(std::ostream& os, const std::string& title, const std::string& x_label,
                     const std::string& y_label, const std::vector<SvgSeries>& series) {
  constexpr double kW = 720, kH = 420, kLeft = 80, kRight = 150, kTop = 40, kBottom = 50;
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  }
  if (!(x0 < x1)) { x0 = 0; x1 = 1; }
  y0 = std::min(y0, 0.0);
  if (!(y0 < y1)) y1 = y0 + 1;
  const double pw = kW - kLeft - kRight, ph = kH - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return kTop + ph - (y - y0) / (y1 - y0) * ph; };

  std::ostringstream body;
  set_number_format(body);
  body << std::setprecision(6);
  body << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  body << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  body << "<text x=\"" << kW / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
       << svg_escape(title) << "</text>\n";
  body << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double yv = y0 + (y1 - y0) * k / 4.0;
    const double xv = x0 + (x1 - x0) * k / 4.0;
    body << "<text x=\"" << kLeft - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">" << yv
         << "</text>\n";
    body << "<text x=\"" << px(xv) << "\" y=\"" << kTop + ph + 18 << "\" text-anchor=\"middle\">"
         << xv << "</text>\n";
  }
  body << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kH - 10 << "\" text-anchor=\"middle\">"
       << svg_escape(x_label) << "</text>\n";
  body << "<text transform=\"translate(16," << kTop + ph / 2
       << ") rotate(-90)\" text-anchor=\"middle\">" << svg_escape(y_label) << "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = kColors[si % 5];
    body << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (std::isfinite(s.y[i])) body << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
    }
    body << "\"/>\n";
    const double ly = kTop + 16 + 18.0 * static_cast<double>(si);
    body << "<line x1=\"" << kLeft + pw + 10 << "\" y1=\"" << ly << "\" x2=\"" << kLeft + pw + 30
         << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    body << "<text x=\"" << kLeft + pw + 36 << "\" y=\"" << ly + 4 << "\">" << svg_escape(s.name)
         << "</text>\n";
  }
  body << "</svg>\n";
  os << body.str();
}

std::vector<std::string> emit_plot_data(const CampaignSummary& s, const SimConfig& cfg) {
  std::vector<std::string> written;
  const fs::path base = prepare_dir(cfg.output_dir);
  {
    OutFile f(base / "per_drop_sumrate.csv", written);
    write_per_drop_sumrate(f.stream(), s);
  }
  {
    OutFile f(base / "per_drop_utility.csv", written);
    write_per_drop_utility(f.stream(), s);
  }
  {
    OutFile f(base / "summary.csv", written);
    write_summary(f.stream(), s);
  }
  {
    OutFile f(base / "config.json", written);
    f.stream() << config_to_json(cfg) << '\n';
  }

  if (s.drops.empty()) return written;
  const DropOutcome& first = s.drops.front();
  std::vector<const RunResult*> runs;
  for (const RunResult& r : first.runs) {
    if (r.ok && r.log.frames() > 0) runs.push_back(&r);
  }
  if (runs.empty()) return written;
  emit_time_series(base, runs, cfg, written);
  OutFile f(base / "per_user_rates.csv", written);
  write_per_user_rates(f.stream(), runs, first.flows);
  return written;
}

std::vector<std::string> emit_single_run(const SingleRun& run, const SimConfig& cfg) {
  std::vector<std::string> written;
  const fs::path base = prepare_dir(cfg.output_dir);
  const std::vector<const RunResult*> runs{&run.result};
  emit_time_series(base, runs, cfg, written);
  {
    OutFile f(base / "per_user_rates.csv", written);
    write_per_user_rates(f.stream(), runs, run.drop.flows);
  }
  {
    OutFile f(base / "run_summary.csv", written);
    write_csv_preamble(f.stream(), "run_summary",
                       "model,frames,sum_rate_bps,sum_utility,v,lambda_max,r_max,plateau_ratio,"
                       "conservation_gap,ue_retries");
    const RunResult& r = run.result;
    f.stream() << to_string(r.model) << ',' << r.log.frames() << ',' << r.sum_rate_bps << ','
               << r.sum_utility << ',' << r.v << ',' << r.lambda_max << ',' << r.r_max << ','
               << r.plateau_ratio << ',' << r.conservation_gap << ',' << run.drop.graph.ue_retries
               << '\n';
  }
  {
    OutFile f(base / "graph.txt", written);
    write_graph(f.stream(), run.drop.graph);
  }
  return written;
}

}  // namespace mbp
