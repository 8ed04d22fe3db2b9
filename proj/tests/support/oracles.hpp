#pragma once

// Reference implementations the tests compare the library against. Each
// one takes a different route from the production code: dense SVD instead
// of power iteration, link subsets instead of node states, raw 2^n
// assignments instead of branch-and-bound.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/SVD>

#include "mbp/bip.hpp"
#include "mbp/channel.hpp"
#include "mbp/scheduler.hpp"
#include "mbp/topology.hpp"

namespace mbp::testing {

inline double svd_largest_singular_value(const ComplexMatrix& h) {
  Eigen::JacobiSVD<ComplexMatrix> svd(h);
  return svd.singularValues()(0);
}

// Outage / LOS probabilities written out from the exponential laws.
inline double analytic_p_out(double d) {
  return 1.0 - std::min(1.0, std::exp(5.2 - 0.0334 * d));
}
inline double analytic_p_los(double d) { return (1.0 - analytic_p_out(d)) * std::exp(-0.0149 * d); }

// Whether a set of links (by index) is schedulable under `model`.
inline bool links_feasible(const NetworkGraph& g, const std::vector<int>& active,
                           ConstraintModel model) {
  const std::size_t n = g.node_count();
  std::vector<int> out_deg(n, 0), in_deg(n, 0);
  for (int i : active) {
    ++out_deg[g.links[i].tx];
    ++in_deg[g.links[i].rx];
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (out_deg[v] > 0 && in_deg[v] > 0) return false;  // half duplex
    if (model != ConstraintModel::kMuMimo && out_deg[v] > 1) return false;
    if (model == ConstraintModel::kOneToOne && in_deg[v] > 1) return false;
  }
  return true;
}

// Best total weight over every subset of positive-weight links. Sums in
// ascending link order so the result is bit-comparable with
// selection_value.
inline double brute_force_link_subsets(std::span<const LinkWeight> w, const NetworkGraph& g,
                                       ConstraintModel model) {
  std::vector<int> candidates;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i].weight > 0.0) candidates.push_back(static_cast<int>(i));
  }
  const std::size_t k = candidates.size();
  double best = 0.0;
  std::vector<int> active;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k); ++mask) {
    active.clear();
    for (std::size_t j = 0; j < k; ++j) {
      if (mask >> j & 1) active.push_back(candidates[j]);
    }
    if (!links_feasible(g, active, model)) continue;
    double total = 0.0;
    for (int i : active) total += w[i].weight;
    best = std::max(best, total);
  }
  return best;
}

struct BruteForceProgram {
  bool feasible = false;
  double value = -std::numeric_limits<double>::infinity();
};

inline BruteForceProgram brute_force_program(const BinaryProgram& p) {
  BruteForceProgram out;
  const std::size_t n = p.num_vars;
  std::vector<std::uint8_t> b(n, 0);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    for (std::size_t j = 0; j < n; ++j) b[j] = static_cast<std::uint8_t>(mask >> j & 1);
    bool ok = true;
    for (const auto& c : p.constraints) {
      double lhs = 0.0;
      for (std::size_t j = 0; j < n; ++j) lhs += c.coefficients[j] * b[j];
      if (lhs > c.bound + 1e-9) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    double v = 0.0;
    for (std::size_t j = 0; j < n; ++j) v += p.objective[j] * b[j];
    out.feasible = true;
    out.value = std::max(out.value, v);
  }
  return out;
}

// Graph with the given directed links and no channel data. Each pair in
// `pairs` becomes both directions with the given rates.
struct PairSpec {
  NodeId a = 0;
  NodeId b = 0;
  double rate_ab = 1.0;
  double rate_ba = 1.0;
};

inline NetworkGraph make_graph(int node_count, const std::vector<PairSpec>& pairs,
                               NodeClass cls = NodeClass::kRelay) {
  NetworkGraph g;
  for (int i = 0; i < node_count; ++i) {
    const NodeClass c = i == 0 ? NodeClass::kBaseStation : cls;
    g.nodes.push_back({i, c, 0.0, 0.0, RadioProfile::defaults(c)});
  }
  for (const auto& p : pairs) {
    Link ab;
    ab.tx = p.a;
    ab.rx = p.b;
    ab.rate_bits = ab.full_power_rate_bits = p.rate_ab;
    Link ba;
    ba.tx = p.b;
    ba.rx = p.a;
    ba.rate_bits = ba.full_power_rate_bits = p.rate_ba;
    g.links.push_back(ab);
    g.links.push_back(ba);
  }
  std::sort(g.links.begin(), g.links.end(), [](const Link& x, const Link& y) {
    return std::pair(x.tx, x.rx) < std::pair(y.tx, y.rx);
  });
  g.rebuild_index();
  return g;
}

// LinkWeight list for `g` with hand-picked weights, keyed by (tx, rx).
struct WeightSpec {
  NodeId tx = 0;
  NodeId rx = 0;
  double weight = 0.0;
};

inline std::vector<LinkWeight> make_weights(const NetworkGraph& g,
                                            const std::vector<WeightSpec>& spec) {
  std::vector<LinkWeight> w(g.link_count());
  for (std::size_t i = 0; i < g.link_count(); ++i) {
    w[i].link = static_cast<int>(i);
    w[i].tx = g.links[i].tx;
    w[i].rx = g.links[i].rx;
    w[i].rate = g.links[i].rate_bits;
  }
  for (const auto& s : spec) w[g.find_link(s.tx, s.rx)].weight = s.weight;
  return w;
}

}  // namespace mbp::testing
