// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Desk scale by default; --paper-scale runs the 50-drop,
// 10^5-frame campaign and checks the gain bands as well (hours).

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "mbp/channel.hpp"
#include "mbp/config.hpp"
#include "mbp/harness.hpp"
#include "mbp/plot_data.hpp"
#include "oracles.hpp"

namespace {

namespace fs = std::filesystem;
using namespace mbp;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  std::string id;
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Verdict ac1_scheduler(std::uint64_t seed) {
  const auto t0 = Clock::now();
  const VerifyReport rep = run_verification(200, 0, seed);
  const double s = seconds_since(t0);
  Verdict v{"AC1", rep.schedule_mismatches == 0 && rep.schedule_instances >= 600 && s <= 60.0,
            fmt("scheduler exactness: %zu/%zu (instance, model) pairs match the oracle, N <= 10, %.1f s",
                rep.schedule_instances - rep.schedule_mismatches, rep.schedule_instances, s)};
  for (const auto& d : rep.details) v.detail += "\n    " + d;
  return v;
}

Verdict ac2_solver(std::uint64_t seed) {
  const auto t0 = Clock::now();
  const VerifyReport rep = run_verification(0, 100, seed);
  const double s = seconds_since(t0);
  Verdict v{"AC2", rep.program_mismatches == 0 && rep.program_instances >= 100 && s <= 60.0,
            fmt("solver exactness: %zu/%zu programs (<= 14 vars) equal exhaustive search, %.1f s",
                rep.program_instances - rep.program_mismatches, rep.program_instances, s)};
  for (const auto& d : rep.details) v.detail += "\n    " + d;
  return v;
}

Verdict ac3_stability(const CampaignSummary& s, const SimConfig& cfg, double seconds) {
  Verdict v{"AC3", true, "queue plateau, final/middle decile of ||q||_1 on drop 0:"};
  const double per_model = seconds / static_cast<double>(cfg.drops * cfg.models.size());
  for (const RunResult& r : s.drops.front().runs) {
    const bool ok = r.ok && r.plateau_ratio <= 2.0;
    v.pass = v.pass && ok;
    v.detail += fmt(" %s %.3f", to_string(r.model), r.ok ? r.plateau_ratio : NAN);
  }
  std::size_t stable = 0, total = 0;
  for (const auto& d : s.drops) {
    for (const auto& r : d.runs) {
      ++total;
      stable += r.ok && r.plateau_ratio <= 2.0;
    }
  }
  v.pass = v.pass && per_model <= 300.0;
  v.detail += fmt(" (limit 2); %zu/%zu campaign runs plateau; %.1f s per run", stable, total, per_model);
  return v;
}

Verdict ac4_ordering(const CampaignSummary& s, bool paper_scale) {
  double mu_gain = 0.0, k_gain = 0.0;
  for (const auto& g : s.gains) {
    (g.model == ConstraintModel::kMuMimo ? mu_gain : k_gain) = g.mean_of_gains_pct;
  }
  std::size_t mu_ge_k = 0, k_ge_one = 0, n = 0;
  for (const auto& d : s.drops) {
    if (d.runs.size() != 3 || !d.runs[0].ok || !d.runs[1].ok || !d.runs[2].ok) continue;
    ++n;
    mu_ge_k += d.runs[0].sum_rate_bps >= d.runs[1].sum_rate_bps;
    k_ge_one += d.runs[1].sum_rate_bps >= d.runs[2].sum_rate_bps;
  }
  Verdict v{"AC4", n >= 10 && s.ordering_fraction >= 0.8 && mu_gain > 0.0 && k_gain > 0.0,
            fmt("model ordering: MU >= K >= 1 in %.0f%% of %zu drops (need 80%%); MU >= K in %zu, "
                "K >= 1 in %zu; mean gain over 1-to-1: MU %+.1f%%, K-to-1 %+.1f%%",
                100.0 * s.ordering_fraction, n, mu_ge_k, k_ge_one, mu_gain, k_gain)};
  if (paper_scale) {
    const bool bands = mu_gain >= 100.0 && mu_gain <= 220.0 && k_gain >= 40.0 && k_gain <= 140.0;
    v.pass = v.pass && bands;
    v.detail += bands ? "; paper-scale bands met" : "; paper-scale bands [100,220]% / [40,140]% missed";
  }
  return v;
}

Verdict ac5_conservation(const CampaignSummary& s, const SimConfig& cfg) {
  std::size_t stable = 0, good = 0;
  double worst = 0.0;
  std::string worst_where;
  for (const auto& d : s.drops) {
    for (const auto& r : d.runs) {
      if (!r.ok || r.plateau_ratio > 2.0) continue;
      ++stable;
      good += r.conservation_gap <= 0.05;
      if (r.conservation_gap > worst) {
        worst = r.conservation_gap;
        worst_where = fmt("drop %zu %s", d.index, to_string(r.model));
      }
    }
  }
  return {"AC5", stable > 0 && good == stable,
          fmt("conservation over frames [%zu, %zu): %zu/%zu stable runs within 5%%; worst gap %.3f (%s)",
              cfg.frames / 2, cfg.frames, good, stable, worst, worst_where.c_str())};
}

Verdict ac6_channel(std::uint64_t seed) {
  const auto t0 = Clock::now();
  const int n = 100000;
  RandomStream rng = make_stream(derive_seed(seed, 6));
  bool pass = true;
  double worst_z = 0.0;
  std::string detail;
  auto check = [&](double observed, double expected, double se) {
    const double z = se > 0.0 ? std::abs(observed - expected) / se : (observed == expected ? 0.0 : INFINITY);
    worst_z = std::max(worst_z, z);
    pass = pass && z <= 3.0;
  };
  for (double d : {25.0, 50.0, 100.0, 150.0}) {
    std::map<LinkState, int> count;
    std::map<LinkState, double> pl_sum;
    for (int i = 0; i < n; ++i) {
      const LinkState st = sample_link_state(d, rng);
      ++count[st];
      if (st != LinkState::kOutage) pl_sum[st] += sample_pathloss_db(st, d, rng);
    }
    const double p_out = testing::analytic_p_out(d);
    const double p_los = testing::analytic_p_los(d);
    const double expect[] = {p_out, p_los, 1.0 - p_out - p_los};
    const LinkState states[] = {LinkState::kOutage, LinkState::kLineOfSight, LinkState::kNonLineOfSight};
    for (int k = 0; k < 3; ++k) {
      const double p = expect[k];
      check(static_cast<double>(count[states[k]]) / n, p, std::sqrt(p * (1.0 - p) / n));
    }
    for (LinkState st : {LinkState::kLineOfSight, LinkState::kNonLineOfSight}) {
      if (count[st] == 0) continue;
      // Independent reference: 61.4 + 20 log10 d (sigma 5.8), 72 + 29.2 log10 d (sigma 8.7).
      const bool los = st == LinkState::kLineOfSight;
      const double mean = los ? 61.4 + 20.0 * std::log10(d) : 72.0 + 29.2 * std::log10(d);
      const double sigma = los ? 5.8 : 8.7;
      check(pl_sum[st] / count[st], mean, sigma / std::sqrt(count[st]));
    }
    detail += fmt(" d=%g: out %.4f los %.4f;", d, static_cast<double>(count[LinkState::kOutage]) / n,
                  static_cast<double>(count[LinkState::kLineOfSight]) / n);
  }
  const double s = seconds_since(t0);
  return {"AC6", pass && s <= 30.0,
          fmt("channel statistics, 1e5 draws per distance: worst |z| %.2f (limit 3), %.1f s;", worst_z, s) +
              detail};
}

Verdict ac7_beamforming(std::uint64_t seed) {
  const auto t0 = Clock::now();
  RandomStream rng = make_stream(derive_seed(seed, 7));
  std::uniform_int_distribution<int> dim(1, 64);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const int rows = k == 0 ? 64 : dim(rng);
    const int cols = k == 0 ? 64 : dim(rng);
    ComplexMatrix h(rows, cols);
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) h(i, j) = Complex(gauss(rng), gauss(rng));
    }
    const double ref = testing::svd_largest_singular_value(h);
    const double got = beamform_gain(h).gain;
    worst = std::max(worst, std::abs(got - ref) / ref);
  }
  const double s = seconds_since(t0);
  return {"AC7", worst <= 1e-6 && s <= 10.0,
          fmt("beamforming vs dense SVD on 100 matrices up to 64x64: worst relative error %.2e, %.2f s",
              worst, s)};
}

// One link of capacity R from node 1 to node 0, Poisson arrivals.
Verdict ac8_fixed_point() {
  const auto t0 = Clock::now();
  const double r = 1000.0;
  const NetworkGraph g = testing::make_graph(2, {{0, 1, r, r}});
  const std::vector<FlowSpec> flows = {FlowSpec{0, {1}, {0}}};
  SimConfig cfg = desk_preset();
  cfg.frames = 100000;
  cfg.arrival_law = ArrivalLaw::kPoisson;
  cfg.v_rule.explicit_value = true;

  struct Point {
    double v, delivered, gap, max_q, plateau;
  };
  std::vector<Point> pts;
  for (double v : {2.0 * r * r, 20.0 * r * r}) {
    cfg.v_rule.value = v;
    const RunResult res = run_on_graph(g, flows, cfg, ConstraintModel::kMuMimo, 8);
    const auto& del = res.log.delivered;
    double sum = 0.0, max_q = 0.0;
    for (std::size_t t = cfg.frames / 2; t < cfg.frames; ++t) {
      sum += del[t];
      max_q = std::max(max_q, res.log.queue_l1[t]);
    }
    const double delivered = sum / static_cast<double>(cfg.frames - cfg.frames / 2);
    pts.push_back({v, delivered, 1.0 - delivered / r, max_q, res.plateau_ratio});
  }
  bool pass = pts[1].gap < pts[0].gap && seconds_since(t0) <= 60.0;
  std::string detail;
  for (const Point& p : pts) {
    // Equilibrium backlog V / (2R) plus a generous Poisson margin.
    const bool bounded = p.plateau <= 2.0 && p.max_q <= 2.0 * p.v / (2.0 * r) + 10.0 * r;
    pass = pass && p.delivered >= 0.9 * r && bounded;
    detail += fmt(" V=%.0e: delivered %.1f of %.0f bits/frame (gap %.4f), max queue %.0f, plateau %.3f;",
                  p.v, p.delivered, r, p.gap, p.max_q, p.plateau);
  }
  return {"AC8", pass, fmt("ANCC fixed point on one link, %.1f s:", seconds_since(t0)) + detail};
}

std::map<std::string, std::string> read_tree(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    out[e.path().filename().string()] = s.str();
  }
  return out;
}

Verdict ac9_determinism(const fs::path& out, std::uint64_t seed) {
  SimConfig cfg = desk_preset();
  cfg.frames = 2000;
  cfg.drops = 3;
  cfg.master_seed = seed;
  cfg.arrival_law = ArrivalLaw::kPoisson;
  cfg.write_svg = true;
  cfg.output_dir = (out / "determinism").string();
  std::vector<std::map<std::string, std::string>> trees;
  for (int rep = 0; rep < 2; ++rep) {
    fs::remove_all(cfg.output_dir);
    emit_plot_data(run_campaign(cfg), cfg);
    trees.push_back(read_tree(cfg.output_dir));
  }
  std::vector<std::string> differ;
  for (const auto& [name, body] : trees[0]) {
    auto it = trees[1].find(name);
    if (it == trees[1].end() || it->second != body) differ.push_back(name);
  }
  const bool pass = differ.empty() && trees[0].size() == trees[1].size() && !trees[0].empty();
  std::string detail = fmt("determinism: %zu files from two identical campaigns", trees[0].size());
  detail += pass ? " are byte-identical" : "; differing:";
  for (const auto& d : differ) detail += " " + d;
  return {"AC9", pass, detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance suite"};
  std::string out = "acceptance-out";
  bool paper_scale = false;
  std::uint64_t seed = 2024;
  app.add_option("--out", out, "Scratch and report directory");
  app.add_flag("--paper-scale", paper_scale, "Run the 50-drop, 1e5-frame campaign for AC3-AC5");
  app.add_option("--seed", seed, "Master seed");
  CLI11_PARSE(app, argc, argv);

  const fs::path out_dir(out);
  fs::create_directories(out_dir);
  std::vector<Verdict> verdicts;
  auto report = [&](Verdict v) {
    std::cout << v.id << ' ' << (v.pass ? "PASS" : "FAIL") << "  " << v.detail << std::endl;
    verdicts.push_back(std::move(v));
  };

  report(ac1_scheduler(seed));
  report(ac2_solver(seed));

  SimConfig cfg = paper_scale ? paper_preset() : desk_preset();
  cfg.master_seed = seed;
  cfg.output_dir = (out_dir / "campaign").string();
  const auto t0 = Clock::now();
  const CampaignSummary campaign = run_campaign(cfg);
  const double campaign_s = seconds_since(t0);
  emit_plot_data(campaign, cfg);
  report(ac3_stability(campaign, cfg, campaign_s));
  report(ac4_ordering(campaign, paper_scale));
  report(ac5_conservation(campaign, cfg));

  report(ac6_channel(seed));
  report(ac7_beamforming(seed));
  report(ac8_fixed_point());
  report(ac9_determinism(out_dir, seed));

  std::ofstream file(out_dir / "acceptance_report.txt");
  std::size_t failed = 0;
  for (const Verdict& v : verdicts) {
    file << v.id << ' ' << (v.pass ? "PASS" : "FAIL") << "  " << v.detail << '\n';
    failed += !v.pass;
  }
  std::cout << verdicts.size() - failed << "/" << verdicts.size() << " criteria pass\n";
  return failed == 0 ? 0 : 1;
}
