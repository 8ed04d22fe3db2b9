#include "mbp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "mbp/bip.hpp"
#include "mbp/congestion.hpp"
#include "mbp/error.hpp"
#include "mbp/queue.hpp"

namespace mbp {

namespace {

double mean_of(const std::vector<double>& v, std::size_t begin, std::size_t end) {
  if (end <= begin) return 0.0;
  double s = 0.0;
  for (std::size_t i = begin; i < end; ++i) s += v[i];
  return s / static_cast<double>(end - begin);
}

std::string write_replay(const std::string& dir, ConstraintModel model, std::size_t frame,
                         const NetworkGraph& g, const QueueMatrix& q,
                         const std::string& reason) {
  namespace fs = std::filesystem;
  const fs::path base = dir.empty() ? fs::path(".") : fs::path(dir);
  std::error_code ec;
  fs::create_directories(base, ec);
  const std::string stem =
      "replay-" + std::string(to_string(model)) + "-frame" + std::to_string(frame);
  const fs::path graph_path = base / (stem + ".graph");
  const fs::path queue_path = base / (stem + ".queues.csv");
  const fs::path prog_path = base / (stem + ".program");
  const fs::path note_path = base / (stem + ".txt");

  std::ofstream gs(graph_path), qs(queue_path), ps(prog_path), ns(note_path);
  if (!gs || !qs || !ps || !ns) return "(replay files could not be written to " + base.string() + ")";
  write_graph(gs, g);
  qs << "# mbp queue-snapshot format-version 1\nframe,node,flow,bits\n";
  write_queue_snapshot(qs, frame, q);
  try {
    write_program(ps, build_mwdbsg_program(select_flows_and_xi(q, g, model), g, model));
  } catch (const std::exception& e) {
    ps << "# program unavailable: " << e.what() << '\n';
  }
  ns << "model " << to_string(model) << "\nframe " << frame << "\nreason " << reason << '\n';
  return graph_path.string();
}

}  // namespace

double plateau_ratio(const std::vector<double>& series) {
  const std::size_t t = series.size();
  if (t < 10) return 0.0;
  const double mid = mean_of(series, (t * 45) / 100, (t * 55) / 100);
  const double last = mean_of(series, (t * 9) / 10, t);
  if (mid == 0.0) return last == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return last / mid;
}

RunResult run_on_graph(const NetworkGraph& g, const std::vector<FlowSpec>& flows,
                       const SimConfig& cfg, ConstraintModel model, std::uint64_t arrival_seed,
                       const RunSinks& sinks) {
  const FlowTable table(flows, g.node_count());
  const auto nn = static_cast<Eigen::Index>(g.node_count());
  const auto nf = static_cast<Eigen::Index>(table.num_flows());

  RunResult r;
  r.model = model;
  r.r_max = g.max_full_power_rate();
  AnccState st = make_ancc_state(g, table, cfg.utility, cfg.v_rule);
  r.v = st.v;
  r.lambda_max = st.lambda_max;

  RandomStream rng = make_stream(arrival_seed);
  QueueMatrix q = QueueMatrix::Zero(nn, nf);

  MetricsLog& log = r.log;
  log.frame_s = cfg.channel.frame_s;
  log.snapshot_stride = cfg.snapshot_stride;
  log.num_flows = table.num_flows();
  log.queue_l1.reserve(cfg.frames);
  log.source_rate.reserve(cfg.frames);
  log.arrivals.reserve(cfg.frames);
  log.delivered.reserve(cfg.frames);
  std::vector<double> cum_arr(table.num_flows(), 0.0), cum_del(table.num_flows(), 0.0);
  log.checkpoint_frames.push_back(0);
  log.cum_arrivals.push_back(cum_arr);
  log.cum_delivered.push_back(cum_del);

  for (std::size_t t = 0; t < cfg.frames; ++t) {
    const RateMatrix& lambda = update_rates(q, st, table);
    if ((lambda.array() < 0.0).any() || (lambda.array() > st.lambda_max).any()) {
      const std::string where = write_replay(sinks.replay_dir, model, t, g, q, "lambda clamp");
      throw ContractViolation("frame " + std::to_string(t) + ": source rate outside [0, lambda_max]; replay " + where);
    }
    const ArrivalBatch arrivals = sample_arrivals(lambda, cfg.arrival_law, rng);

    Schedule s;
    FrameOutcome out;
    try {
      s = schedule_frame(q, g, model, cfg.solve_path);
      const auto problems = check_schedule(s, q, g, model);
      if (!problems.empty()) throw ContractViolation(problems.front());
      out = apply_frame(q, s.served, arrivals, table);
    } catch (const ContractViolation& e) {
      const std::string where = write_replay(sinks.replay_dir, model, t, g, q, e.what());
      throw ContractViolation("frame " + std::to_string(t) + ": " + e.what() + "; replay " + where);
    }

    if (sinks.schedule_trace) {
      for (const ServedEntry& e : s.served) {
        *sinks.schedule_trace << t << ',' << e.tx << ',' << e.rx << ',' << e.flow << ','
                              << e.bits << '\n';
      }
    }
    q = std::move(out.queues);
    if (sinks.queue_snapshots && sinks.queue_snapshot_stride > 0 &&
        (t + 1) % sinks.queue_snapshot_stride == 0) {
      write_queue_snapshot(*sinks.queue_snapshots, t + 1, q);
    }

    double delivered = 0.0;
    for (Eigen::Index f = 0; f < nf; ++f) {
      cum_arr[f] += arrivals.bits.col(f).sum();
      cum_del[f] += out.delivered[f];
      delivered += out.delivered[f];
    }
    log.queue_l1.push_back(q.sum());
    log.source_rate.push_back(lambda.sum());
    log.arrivals.push_back(arrivals.bits.sum());
    log.delivered.push_back(delivered);
    if ((t + 1) % cfg.snapshot_stride == 0 || t + 1 == cfg.frames) {
      log.checkpoint_frames.push_back(t + 1);
      log.cum_arrivals.push_back(cum_arr);
      log.cum_delivered.push_back(cum_del);
    }
  }

  r.sum_rate_bps = log.sum_rate_bps();
  r.flow_rate_bps = log.flow_delivered_bps();
  r.sum_utility = utility_of_rates(r.flow_rate_bps, cfg.utility);
  r.plateau_ratio = plateau_ratio(log.queue_l1);
  if (cfg.frames >= 2) {
    r.conservation_gap = conservation_audit(log, cfg.frames / 2, cfg.frames).max_gap();
  }
  r.ok = true;
  return r;
}

SingleRun run_single(const SimConfig& cfg, std::uint64_t drop_seed, ConstraintModel model,
                     const RunSinks& sinks) {
  cfg.validate();
  DropConfig dc = cfg.drop;
  dc.seed = drop_seed;
  SingleRun out;
  out.drop = generate_drop(dc, cfg.channel, cfg.radios);
  out.result = run_on_graph(out.drop.graph, out.drop.flows, cfg, model,
                            derive_seed(drop_seed, StreamTag::kArrivals), sinks);
  return out;
}

void summarize(CampaignSummary& s, const std::vector<ConstraintModel>& models) {
  s.models.clear();
  s.gains.clear();
  s.failed_runs = 0;
  for (const DropOutcome& d : s.drops) {
    for (const RunResult& r : d.runs) s.failed_runs += r.ok ? 0 : 1;
    if (!d.error.empty()) s.failed_runs += models.size();
  }

  auto column = [&](std::size_t mi, auto field) {
    std::vector<double> v;
    for (const DropOutcome& d : s.drops) {
      if (d.runs.size() > mi && d.runs[mi].ok) v.push_back(field(d.runs[mi]));
    }
    return v;
  };
  auto stats = [](const std::vector<double>& v, double& mean, double& sd) {
    mean = sd = 0.0;
    if (v.empty()) return;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    if (v.size() < 2) return;
    for (double x : v) sd += (x - mean) * (x - mean);
    sd = std::sqrt(sd / static_cast<double>(v.size() - 1));
  };

  for (std::size_t mi = 0; mi < models.size(); ++mi) {
    ModelStats ms;
    ms.model = models[mi];
    const auto rates = column(mi, [](const RunResult& r) { return r.sum_rate_bps; });
    const auto utils = column(mi, [](const RunResult& r) { return r.sum_utility; });
    ms.drops = rates.size();
    stats(rates, ms.sum_rate_mean, ms.sum_rate_std);
    stats(utils, ms.utility_mean, ms.utility_std);
    s.models.push_back(ms);
  }

  auto index_of = [&](ConstraintModel m) -> int {
    auto it = std::find(models.begin(), models.end(), m);
    return it == models.end() ? -1 : static_cast<int>(it - models.begin());
  };
  const int ref = index_of(ConstraintModel::kOneToOne);
  for (ConstraintModel m : {ConstraintModel::kMuMimo, ConstraintModel::kKToOne}) {
    const int mi = index_of(m);
    if (mi < 0 || ref < 0) continue;
    GainStats gs;
    gs.model = m;
    gs.reference = ConstraintModel::kOneToOne;
    double sum_a = 0.0, sum_b = 0.0, sum_gain = 0.0;
    for (const DropOutcome& d : s.drops) {
      if (d.runs.empty() || !d.runs[mi].ok || !d.runs[ref].ok) continue;
      const double a = d.runs[mi].sum_rate_bps;
      const double b = d.runs[ref].sum_rate_bps;
      if (b <= 0.0) continue;
      sum_a += a;
      sum_b += b;
      sum_gain += (a / b - 1.0) * 100.0;
      ++gs.drops;
    }
    if (gs.drops > 0) {
      gs.gain_of_means_pct = (sum_a / sum_b - 1.0) * 100.0;
      gs.mean_of_gains_pct = sum_gain / static_cast<double>(gs.drops);
    }
    s.gains.push_back(gs);
  }

  s.ordering_fraction = 0.0;
  const int mu = index_of(ConstraintModel::kMuMimo);
  const int k1 = index_of(ConstraintModel::kKToOne);
  if (mu >= 0 && k1 >= 0 && ref >= 0) {
    std::size_t n = 0, good = 0;
    for (const DropOutcome& d : s.drops) {
      if (d.runs.empty() || !d.runs[mu].ok || !d.runs[k1].ok || !d.runs[ref].ok) continue;
      ++n;
      if (d.runs[mu].sum_rate_bps >= d.runs[k1].sum_rate_bps &&
          d.runs[k1].sum_rate_bps >= d.runs[ref].sum_rate_bps) {
        ++good;
      }
    }
    if (n > 0) s.ordering_fraction = static_cast<double>(good) / static_cast<double>(n);
  }
}

CampaignSummary run_campaign(const SimConfig& cfg, const CampaignOptions& opt) {
  cfg.validate();
  CampaignSummary summary;
  summary.drops.resize(cfg.drops);
  std::vector<Drop> drops(cfg.drops);

  unsigned workers = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  auto parallel_for = [&](std::size_t count, const std::function<void(std::size_t)>& body) {
    std::atomic<std::size_t> next{0};
    auto loop = [&] {
      for (std::size_t i = next++; i < count; i = next++) body(i);
    };
    const unsigned n = static_cast<unsigned>(std::min<std::size_t>(workers, count));
    if (n <= 1) {
      loop();
      return;
    }
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < n; ++k) pool.emplace_back(loop);
    for (auto& t : pool) t.join();
  };

  parallel_for(cfg.drops, [&](std::size_t i) {
    DropOutcome& d = summary.drops[i];
    d.index = i;
    d.seed = drop_seed(cfg.master_seed, i);
    try {
      DropConfig dc = cfg.drop;
      dc.seed = d.seed;
      drops[i] = generate_drop(dc, cfg.channel, cfg.radios);
      d.ue_retries = drops[i].graph.ue_retries;
      d.flows = drops[i].flows;
    } catch (const std::exception& e) {
      d.error = e.what();
    }
    d.runs.resize(cfg.models.size());
    for (std::size_t m = 0; m < cfg.models.size(); ++m) d.runs[m].model = cfg.models[m];
  });

  const std::size_t total = cfg.drops * cfg.models.size();
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;
  parallel_for(total, [&](std::size_t task) {
    const std::size_t i = task / cfg.models.size();
    const std::size_t m = task % cfg.models.size();
    DropOutcome& d = summary.drops[i];
    RunResult& r = d.runs[m];
    if (d.error.empty()) {
      try {
        RunSinks sinks;
        sinks.replay_dir = cfg.output_dir;
        r = run_on_graph(drops[i].graph, drops[i].flows, cfg, cfg.models[m],
                         derive_seed(d.seed, StreamTag::kArrivals), sinks);
      } catch (const ContractViolation& e) {
        r.ok = false;
        r.error = e.what();
        r.contract_violation = true;
      } catch (const std::exception& e) {
        r.ok = false;
        r.error = e.what();
      }
      r.model = cfg.models[m];
      if (!(opt.keep_first_log && i == 0)) {
        r.log.queue_l1 = {};
        r.log.source_rate = {};
        r.log.arrivals = {};
        r.log.delivered = {};
      }
    } else {
      r.error = "drop generation failed: " + d.error;
    }
    const std::size_t finished = ++done;
    if (opt.progress) {
      std::lock_guard<std::mutex> lock(progress_mutex);
      opt.progress(finished, total);
    }
  });

  summarize(summary, cfg.models);
  return summary;
}

std::vector<ChannelStatsRow> channel_stats(const std::vector<double>& distances,
                                           std::size_t samples, const SimConfig& cfg,
                                           std::uint64_t seed) {
  std::vector<ChannelStatsRow> rows;
  RandomStream rng = make_stream(derive_seed(seed, StreamTag::kChannel));
  for (double d : distances) {
    if (!(d > 0.0)) throw InputError("channel-stats: distances must be positive");
    ChannelStatsRow row;
    row.distance_m = d;
    row.p_out = outage_probability(d);
    row.p_los = los_probability(d);
    const double p_nlos = nlos_probability(d);
    const double p_conn = row.p_los + p_nlos;
    row.mean_pl_db = p_conn > 0.0
                         ? (row.p_los * median_pathloss_db(LinkState::kLineOfSight, d) +
                            p_nlos * median_pathloss_db(LinkState::kNonLineOfSight, d)) /
                               p_conn
                         : std::numeric_limits<double>::infinity();
    double total = 0.0;
    for (std::size_t k = 0; k < samples; ++k) {
      const LinkChannel ch = sample_link_channel(d, cfg.radios.bs, cfg.radios.ue, cfg.channel, rng);
      total += link_rate_bits(1.0, cfg.radios.bs, cfg.radios.ue, ch, cfg.channel);
    }
    row.mean_rate_bits = samples ? total / static_cast<double>(samples) : 0.0;
    rows.push_back(row);
  }
  return rows;
}

NetworkGraph synthetic_graph(std::size_t node_count, double link_prob, RandomStream& rng) {
  if (node_count < 1) throw InputError("synthetic_graph: need at least one node");
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_int_distribution<int> small(1, 8);
  const bool integral = u01(rng) < 0.5;
  auto draw_rate = [&] { return integral ? static_cast<double>(small(rng)) : 1.0 + 99.0 * u01(rng); };

  NetworkGraph g;
  for (std::size_t i = 0; i < node_count; ++i) {
    const NodeClass c = i == 0 ? NodeClass::kBaseStation : NodeClass::kRelay;
    g.nodes.push_back({static_cast<NodeId>(i), c, 0.0, 0.0, RadioProfile::defaults(c)});
  }
  for (std::size_t a = 0; a < node_count; ++a) {
    for (std::size_t b = a + 1; b < node_count; ++b) {
      if (u01(rng) >= link_prob) continue;
      for (auto [tx, rx] : {std::pair{a, b}, std::pair{b, a}}) {
        Link l;
        l.tx = static_cast<NodeId>(tx);
        l.rx = static_cast<NodeId>(rx);
        l.rate_bits = draw_rate();
        l.full_power_rate_bits = l.rate_bits + (integral ? small(rng) - 1 : 50.0 * u01(rng));
        g.links.push_back(std::move(l));
      }
    }
  }
  std::sort(g.links.begin(), g.links.end(),
            [](const Link& x, const Link& y) { return std::pair(x.tx, x.rx) < std::pair(y.tx, y.rx); });
  g.rebuild_index();
  return g;
}

QueueMatrix synthetic_queues(std::size_t node_count, std::size_t flow_count, RandomStream& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_int_distribution<int> small(0, 20);
  const bool integral = u01(rng) < 0.5;
  QueueMatrix q(static_cast<Eigen::Index>(node_count), static_cast<Eigen::Index>(flow_count));
  for (Eigen::Index i = 0; i < q.rows(); ++i) {
    for (Eigen::Index f = 0; f < q.cols(); ++f) {
      if (u01(rng) < 0.2) {
        q(i, f) = 0.0;
      } else {
        q(i, f) = integral ? static_cast<double>(small(rng)) : 200.0 * u01(rng);
      }
    }
  }
  return q;
}

BinaryProgram synthetic_program(std::size_t vars, std::size_t constraints, RandomStream& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  BinaryProgram p;
  p.num_vars = vars;
  for (std::size_t j = 0; j < vars; ++j) p.objective.push_back(-2.0 + 12.0 * u01(rng));
  for (std::size_t i = 0; i < constraints; ++i) {
    LinearConstraint c;
    for (std::size_t j = 0; j < vars; ++j) {
      const double r = u01(rng);
      c.coefficients.push_back(r < 0.4 ? 0.0 : -1.0 + 4.0 * u01(rng));
    }
    c.bound = -0.5 + 4.0 * u01(rng);
    p.constraints.push_back(std::move(c));
  }
  return p;
}

VerifyReport run_verification(std::size_t schedule_instances, std::size_t program_instances,
                              std::uint64_t seed) {
  VerifyReport rep;
  RandomStream rng = make_stream(derive_seed(seed, 11));
  std::uniform_int_distribution<int> nodes(2, 10);
  std::uniform_int_distribution<int> flows(1, 4);
  std::uniform_real_distribution<double> density(0.2, 0.9);

  for (std::size_t k = 0; k < schedule_instances; ++k) {
    const NetworkGraph g = synthetic_graph(static_cast<std::size_t>(nodes(rng)), density(rng), rng);
    const QueueMatrix q = synthetic_queues(g.node_count(), static_cast<std::size_t>(flows(rng)), rng);
    for (ConstraintModel m : kAllModels) {
      ++rep.schedule_instances;
      const double fast = schedule_frame(q, g, m).objective;
      const double via_program = schedule_frame(q, g, m, SolvePath::kBinaryProgram).objective;
      const double oracle = schedule_oracle(q, g, m).objective;
      if (fast != oracle || via_program != oracle) {
        ++rep.schedule_mismatches;
        std::ostringstream os;
        os.precision(17);
        os << "schedule instance " << k << " model " << to_string(m) << ": enumeration " << fast
           << ", program " << via_program << ", oracle " << oracle;
        rep.details.push_back(os.str());
      }
    }
  }

  std::uniform_int_distribution<int> vars(1, 14);
  std::uniform_int_distribution<int> rows(1, 8);
  for (std::size_t k = 0; k < program_instances; ++k) {
    const BinaryProgram p = synthetic_program(static_cast<std::size_t>(vars(rng)),
                                              static_cast<std::size_t>(rows(rng)), rng);
    ++rep.program_instances;
    const Solution a = solve_branch_and_bound(p);
    const Solution b = solve_exhaustive(p);
    const bool same = a.status == b.status &&
                      (a.status == ProofStatus::kInfeasible || a.objective_value == b.objective_value);
    if (!same) {
      ++rep.program_mismatches;
      std::ostringstream os;
      os.precision(17);
      os << "program instance " << k << ": branch-and-bound " << a.objective_value
         << ", exhaustive " << b.objective_value;
      rep.details.push_back(os.str());
    }
  }
  return rep;
}

}  // namespace mbp
