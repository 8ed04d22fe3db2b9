#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "mbp/config.hpp"
#include "mbp/metrics.hpp"
#include "mbp/scheduler.hpp"
#include "mbp/topology.hpp"

namespace mbp {

// Optional per-run outputs. Null streams are skipped.
struct RunSinks {
  // "frame,tx,rx,flow,served_bits" rows, no header.
  std::ostream* schedule_trace = nullptr;
  std::ostream* queue_snapshots = nullptr;
  std::size_t queue_snapshot_stride = 0;
  // Where a contract violation writes its replay files; empty = cwd.
  std::string replay_dir;
};

struct RunResult {
  ConstraintModel model = ConstraintModel::kMuMimo;
  bool ok = false;
  std::string error;
  bool contract_violation = false;

  double v = 0.0;
  double lambda_max = 0.0;
  double r_max = 0.0;
  double sum_rate_bps = 0.0;
  double sum_utility = 0.0;
  std::vector<double> flow_rate_bps;
  // Final-decile mean of ||q||_1 over its middle-decile mean.
  double plateau_ratio = 0.0;
  // Worst per-flow source/delivered gap over the final half of frames.
  double conservation_gap = 0.0;

  MetricsLog log;  // per-frame series cleared unless kept
};

// Final-decile mean of `series` divided by the mean of the decile
// centred on the midpoint, [0.45 T, 0.55 T). +inf when the middle mean
// is zero and the final one is not.
double plateau_ratio(const std::vector<double>& series);

// The frame loop on a fixed graph: congestion control, arrivals, weights,
// schedule, checks, queue update, metrics. Throws ContractViolation with
// the frame number after writing replay files.
RunResult run_on_graph(const NetworkGraph& g, const std::vector<FlowSpec>& flows,
                       const SimConfig& cfg, ConstraintModel model, std::uint64_t arrival_seed,
                       const RunSinks& sinks = {});

// One drop generated from `drop_seed`, one model.
struct SingleRun {
  Drop drop;
  RunResult result;
};
SingleRun run_single(const SimConfig& cfg, std::uint64_t drop_seed, ConstraintModel model,
                     const RunSinks& sinks = {});

struct DropOutcome {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  int ue_retries = 0;
  std::string error;              // drop generation failure
  std::vector<FlowSpec> flows;
  std::vector<RunResult> runs;    // cfg.models order
};

struct ModelStats {
  ConstraintModel model = ConstraintModel::kMuMimo;
  std::size_t drops = 0;  // successful runs
  double sum_rate_mean = 0.0;
  double sum_rate_std = 0.0;
  double utility_mean = 0.0;
  double utility_std = 0.0;
};

// Percent gain of `model` over `reference`.
struct GainStats {
  ConstraintModel model = ConstraintModel::kMuMimo;
  ConstraintModel reference = ConstraintModel::kOneToOne;
  std::size_t drops = 0;
  double gain_of_means_pct = 0.0;
  double mean_of_gains_pct = 0.0;
};

struct CampaignSummary {
  std::vector<DropOutcome> drops;
  std::vector<ModelStats> models;
  std::vector<GainStats> gains;
  // Drops with sum-rate MU-MIMO >= K-to-1 >= 1-to-1, over drops where
  // all three succeeded. Zero unless all three models ran.
  double ordering_fraction = 0.0;
  std::size_t failed_runs = 0;
};

struct CampaignOptions {
  // Keep the per-frame series of drop 0 for plotting.
  bool keep_first_log = true;
  std::function<void(std::size_t done, std::size_t total)> progress;
};

CampaignSummary run_campaign(const SimConfig& cfg, const CampaignOptions& opt = {});

void summarize(CampaignSummary& s, const std::vector<ConstraintModel>& models);

// -- channel-stats --------------------------------------------------------

struct ChannelStatsRow {
  double distance_m = 0.0;
  double p_out = 0.0;
  double p_los = 0.0;
  // Mean pathloss of the connected states, dB.
  double mean_pl_db = 0.0;
  // Monte Carlo mean full-power BS->UE rate, outage counted as 0.
  double mean_rate_bits = 0.0;
};

std::vector<ChannelStatsRow> channel_stats(const std::vector<double>& distances,
                                           std::size_t samples, const SimConfig& cfg,
                                           std::uint64_t seed);

// -- verify ---------------------------------------------------------------

// Random symmetric graph with node_count nodes and no channel data. Each
// node pair is connected with probability link_prob; rates are uniform.
NetworkGraph synthetic_graph(std::size_t node_count, double link_prob, RandomStream& rng);
QueueMatrix synthetic_queues(std::size_t node_count, std::size_t flow_count, RandomStream& rng);
BinaryProgram synthetic_program(std::size_t vars, std::size_t constraints, RandomStream& rng);

struct VerifyReport {
  std::size_t schedule_instances = 0;
  std::size_t schedule_mismatches = 0;
  std::size_t program_instances = 0;
  std::size_t program_mismatches = 0;
  std::vector<std::string> details;
  bool ok() const { return schedule_mismatches == 0 && program_mismatches == 0; }
};

// schedule_frame vs schedule_oracle on every model, and branch-and-bound
// vs exhaustive search, on random instances.
VerifyReport run_verification(std::size_t schedule_instances, std::size_t program_instances,
                              std::uint64_t seed);

}  // namespace mbp
