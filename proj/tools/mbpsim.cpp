// mbpsim: campaigns, single runs, channel statistics and oracle checks for
// the multi-hop back-pressure scheduler.
//
// Exit codes: 0 ok, 1 other failure, 2 bad config or arguments,
// 3 contract violation, 4 I/O error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "mbp/config.hpp"
#include "mbp/error.hpp"
#include "mbp/harness.hpp"
#include "mbp/plot_data.hpp"

namespace {

enum ExitCode { kOk = 0, kOther = 1, kConfig = 2, kContract = 3, kIo = 4 };

struct CommonFlags {
  std::string config_path;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> frames;
  std::vector<std::string> models;
  std::string out;
  std::optional<unsigned> threads;
};

void add_common(CLI::App* app, CommonFlags& f, bool multi_model) {
  app->add_option("--config", f.config_path, "JSON config file");
  app->add_option("--preset", f.preset, "Start from a preset (desk, paper) when no config is given");
  app->add_option("--seed", f.seed, "Master seed");
  app->add_option("--frames", f.frames, "Frames per run");
  if (multi_model) {
    app->add_option("--model", f.models, "Constraint model(s): mu_mimo, k_to_1, one_to_1");
  } else {
    app->add_option("--model", f.models, "Constraint model: mu_mimo, k_to_1, one_to_1")
        ->expected(1);
  }
  app->add_option("--out", f.out, "Output directory");
  app->add_option("--threads", f.threads, "Worker threads (0 = all cores)");
}

mbp::SimConfig resolve(const CommonFlags& f) {
  mbp::SimConfig cfg;
  if (!f.config_path.empty()) {
    cfg = mbp::load_config(f.config_path);
  } else if (!f.preset.empty()) {
    cfg = mbp::preset_by_name(f.preset);
  }
  if (f.seed) cfg.master_seed = *f.seed;
  if (f.frames) cfg.frames = *f.frames;
  if (!f.models.empty()) {
    cfg.models.clear();
    for (const auto& m : f.models) cfg.models.push_back(mbp::constraint_model_from_string(m));
  }
  if (!f.out.empty()) cfg.output_dir = f.out;
  if (f.threads) cfg.threads = *f.threads;
  cfg.validate();
  return cfg;
}

int cmd_run(const CommonFlags& flags, std::optional<std::size_t> drops, bool quiet) {
  mbp::SimConfig cfg = resolve(flags);
  if (drops) cfg.drops = *drops;
  cfg.validate();

  mbp::CampaignOptions opt;
  if (!quiet) {
    opt.progress = [](std::size_t done, std::size_t total) {
      std::fprintf(stderr, "\r%zu/%zu runs", done, total);
      if (done == total) std::fputc('\n', stderr);
    };
  }
  const mbp::CampaignSummary s = mbp::run_campaign(cfg, opt);
  mbp::emit_plot_data(s, cfg);

  std::cout << std::fixed << std::setprecision(2);
  for (const auto& m : s.models) {
    std::cout << std::setw(9) << mbp::to_string(m.model) << "  sum-rate " << m.sum_rate_mean / 1e9
              << " +- " << m.sum_rate_std / 1e9 << " Gb/s  utility " << m.utility_mean << " +- "
              << m.utility_std << "  (" << m.drops << " drops)\n";
  }
  for (const auto& g : s.gains) {
    std::cout << "gain " << mbp::to_string(g.model) << " over " << mbp::to_string(g.reference)
              << ": " << g.gain_of_means_pct << "% (gain of means), " << g.mean_of_gains_pct
              << "% (mean of gains)\n";
  }
  std::cout << "ordering holds in " << s.ordering_fraction * 100.0 << "% of drops\n";
  std::cout << "results in " << cfg.output_dir << '\n';

  bool contract = false;
  for (const auto& d : s.drops) {
    if (!d.error.empty()) std::cerr << "drop " << d.index << ": " << d.error << '\n';
    for (const auto& r : d.runs) {
      if (r.ok) continue;
      std::cerr << "drop " << d.index << " " << mbp::to_string(r.model) << ": " << r.error << '\n';
      contract = contract || r.contract_violation;
    }
  }
  if (s.failed_runs == 0) return kOk;
  return contract ? kContract : kOther;
}

int cmd_single(const CommonFlags& flags, std::size_t drop_index, bool trace,
               std::size_t snapshot_stride) {
  mbp::SimConfig cfg = resolve(flags);
  if (cfg.models.size() != 1 && flags.models.empty()) cfg.models = {cfg.models.front()};
  if (cfg.models.size() != 1) throw mbp::ConfigError("single: give exactly one --model");
  if (trace) cfg.write_schedule_trace = true;
  if (snapshot_stride) cfg.queue_snapshot_stride = snapshot_stride;

  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  std::ofstream trace_os, snap_os;
  mbp::RunSinks sinks;
  sinks.replay_dir = cfg.output_dir;
  if (cfg.write_schedule_trace) {
    trace_os.open(fs::path(cfg.output_dir) / "schedule_trace.csv");
    if (!trace_os) throw mbp::IoError("cannot write schedule_trace.csv");
    mbp::write_csv_preamble(trace_os, "schedule_trace", "frame,tx,rx,flow,served_bits");
    trace_os << std::setprecision(12);
    sinks.schedule_trace = &trace_os;
  }
  if (cfg.queue_snapshot_stride) {
    snap_os.open(fs::path(cfg.output_dir) / "queue_snapshots.csv");
    if (!snap_os) throw mbp::IoError("cannot write queue_snapshots.csv");
    mbp::write_csv_preamble(snap_os, "queue_snapshots", "frame,node,flow,bits");
    snap_os << std::setprecision(12);
    sinks.queue_snapshots = &snap_os;
    sinks.queue_snapshot_stride = cfg.queue_snapshot_stride;
  }

  const std::uint64_t seed = mbp::drop_seed(cfg.master_seed, drop_index);
  const mbp::SingleRun run = mbp::run_single(cfg, seed, cfg.models.front(), sinks);
  mbp::emit_single_run(run, cfg);

  const auto& r = run.result;
  std::cout << std::setprecision(6) << mbp::to_string(r.model) << " drop " << drop_index
            << ": sum-rate " << r.sum_rate_bps / 1e9 << " Gb/s, utility " << r.sum_utility
            << ", plateau ratio " << r.plateau_ratio << ", conservation gap " << r.conservation_gap
            << "\nresults in " << cfg.output_dir << '\n';
  return kOk;
}

int cmd_channel_stats(const CommonFlags& flags, std::vector<double> distances,
                      std::size_t samples) {
  const mbp::SimConfig cfg = resolve(flags);
  if (distances.empty()) {
    for (int d = 10; d <= 200; d += 10) distances.push_back(d);
  }
  const auto rows = mbp::channel_stats(distances, samples, cfg, cfg.master_seed);

  std::ofstream file;
  std::ostream* os = &std::cout;
  if (!flags.out.empty()) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(flags.out, ec);
    file.open(fs::path(flags.out) / "channel_stats.csv");
    if (!file) throw mbp::IoError("cannot write channel_stats.csv in '" + flags.out + "'");
    os = &file;
  }
  *os << std::setprecision(10);
  mbp::write_csv_preamble(*os, "channel_stats", "distance_m,p_out,p_los,mean_pl_db,mean_rate_bits");
  for (const auto& r : rows) {
    *os << r.distance_m << ',' << r.p_out << ',' << r.p_los << ',' << r.mean_pl_db << ','
        << r.mean_rate_bits << '\n';
  }
  return kOk;
}

int cmd_verify(std::uint64_t seed, std::size_t instances, std::size_t programs) {
  const mbp::VerifyReport rep = mbp::run_verification(instances, programs, seed);
  for (const auto& d : rep.details) std::cout << d << '\n';
  std::cout << "schedules: " << rep.schedule_instances - rep.schedule_mismatches << "/"
            << rep.schedule_instances << " match the oracle\n"
            << "programs:  " << rep.program_instances - rep.program_mismatches << "/"
            << rep.program_instances << " match exhaustive search\n";
  return rep.ok() ? kOk : kContract;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-hop MU-MIMO back-pressure scheduling simulator"};
  app.require_subcommand(1);

  CommonFlags run_flags, single_flags, stats_flags;
  std::optional<std::size_t> drops;
  bool quiet = false;
  auto* run = app.add_subcommand("run", "Campaign over drops and constraint models");
  add_common(run, run_flags, true);
  run->add_option("--drops", drops, "Number of drops");
  run->add_flag("--quiet", quiet, "No progress output");

  std::size_t drop_index = 0;
  bool trace = false;
  std::size_t snapshot_stride = 0;
  auto* single = app.add_subcommand("single", "One drop, one model");
  add_common(single, single_flags, false);
  single->add_option("--drop", drop_index, "Drop index within the master seed");
  single->add_flag("--trace", trace, "Write schedule_trace.csv");
  single->add_option("--queue-snapshots", snapshot_stride, "Dump all queues every K frames");

  std::vector<double> distances;
  std::size_t samples = 2000;
  auto* stats = app.add_subcommand("channel-stats", "Link-state and rate statistics vs distance");
  add_common(stats, stats_flags, true);
  stats->add_option("--distances", distances, "Distances in metres");
  stats->add_option("--samples", samples, "Monte Carlo draws per distance");

  std::uint64_t verify_seed = 1;
  std::size_t instances = 200, programs = 100;
  auto* verify = app.add_subcommand("verify", "Cross-check schedulers and solvers against oracles");
  verify->add_option("--seed", verify_seed, "Seed");
  verify->add_option("--instances", instances, "Random scheduling instances");
  verify->add_option("--programs", programs, "Random binary programs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*run) return cmd_run(run_flags, drops, quiet);
    if (*single) return cmd_single(single_flags, drop_index, trace, snapshot_stride);
    if (*stats) return cmd_channel_stats(stats_flags, distances, samples);
    if (*verify) return cmd_verify(verify_seed, instances, programs);
  } catch (const mbp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const mbp::InputError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kConfig;
  } catch (const mbp::ContractViolation& e) {
    std::cerr << "contract violation: " << e.what() << '\n';
    return kContract;
  } catch (const mbp::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kOther;
  }
  return kOther;
}
