#include "mbp/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "mbp/error.hpp"

namespace mbp {

namespace {

bool near_or_above(double a, double b) {
  return a >= b - 1e-9 * std::max(1.0, std::abs(b));
}

// Connected components of the undirected graph formed by positive links.
struct Component {
  std::vector<NodeId> nodes;  // ascending
  std::vector<int> links;     // indices into weights, ascending
};

std::vector<Component> positive_components(std::span<const LinkWeight> weights,
                                           std::size_t node_count) {
  std::vector<int> parent(node_count);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<char> touched(node_count, 0);
  for (const auto& w : weights) {
    if (w.weight <= 0.0) continue;
    touched[w.tx] = touched[w.rx] = 1;
    const int a = find(w.tx);
    const int b = find(w.rx);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::map<int, Component> by_root;
  for (std::size_t n = 0; n < node_count; ++n) {
    if (touched[n]) by_root[find(static_cast<int>(n))].nodes.push_back(static_cast<NodeId>(n));
  }
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i].weight > 0.0) by_root[find(weights[i].tx)].links.push_back(static_cast<int>(i));
  }
  std::vector<Component> out;
  for (auto& [root, c] : by_root) out.push_back(std::move(c));
  return out;
}

struct LocalLink {
  int tx;
  int rx;
  double w;
  int index;  // into weights
};

// Canonical value of a node-state vector under MU-MIMO.
double mu_value(const std::vector<LocalLink>& links, std::uint32_t s) {
  double v = 0.0;
  for (const auto& l : links) {
    if (((s >> l.tx) & 1U) && !((s >> l.rx) & 1U)) v += l.w;
  }
  return v;
}

// Depth-first search over node states, heaviest nodes first, pruned by an
// upper bound on what the undecided nodes can still add. The bound is
// loosened by a relative 1e-9 so states tying the incumbent are still
// visited and the canonical value decides.
std::vector<int> search_order(const std::vector<LocalLink>& links, int k) {
  std::vector<double> load(k, 0.0);
  for (const auto& l : links) {
    load[l.tx] += l.w;
    load[l.rx] += l.w;
  }
  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return load[a] > load[b]; });
  return order;
}

constexpr signed char kUndecided = -1;
constexpr signed char kReceive = 0;
constexpr signed char kTransmit = 1;

// MU-MIMO: a link survives unless its tx receives or its rx transmits.
// The surviving weight bounds every completion.
class MuSearch {
 public:
  MuSearch(const std::vector<LocalLink>& links, int k)
      : links_(links), out_of_(k), in_of_(k), state_(k, kUndecided), order_(search_order(links, k)) {
    for (std::size_t i = 0; i < links.size(); ++i) {
      out_of_[links[i].tx].push_back(static_cast<int>(i));
      in_of_[links[i].rx].push_back(static_cast<int>(i));
      alive_ += links[i].w;
    }
  }

  std::uint32_t run() {
    dfs(0, 0);
    return best_s_;
  }

 private:
  void dfs(std::size_t depth, std::uint32_t s) {
    if (!near_or_above(alive_, best_)) return;
    if (depth == order_.size()) {
      const double exact = mu_value(links_, s);
      if (exact > best_) {
        best_ = exact;
        best_s_ = s;
      }
      return;
    }
    const int n = order_[depth];
    const double saved = alive_;
    state_[n] = kTransmit;
    for (int li : in_of_[n]) {
      if (state_[links_[li].tx] != kReceive) alive_ -= links_[li].w;
    }
    dfs(depth + 1, s | (1U << n));
    alive_ = saved;
    state_[n] = kReceive;
    for (int li : out_of_[n]) {
      if (state_[links_[li].rx] != kTransmit) alive_ -= links_[li].w;
    }
    dfs(depth + 1, s);
    alive_ = saved;
    state_[n] = kUndecided;
  }

  const std::vector<LocalLink>& links_;
  std::vector<std::vector<int>> out_of_, in_of_;
  std::vector<signed char> state_;
  std::vector<int> order_;
  double alive_ = 0.0;
  double best_ = 0.0;
  std::uint32_t best_s_ = 0;
};

std::vector<int> enumerate_mu_mimo(const std::vector<LocalLink>& links, int k) {
  const std::uint32_t best_s = MuSearch(links, k).run();
  std::vector<int> chosen;
  for (const auto& l : links) {
    if (((best_s >> l.tx) & 1U) && !((best_s >> l.rx) & 1U)) chosen.push_back(l.index);
  }
  return chosen;
}

// K-to-1: every transmitter takes its heaviest out-link to a receiver.
// Bound: each node that may still transmit adds its heaviest out-link
// whose rx may still receive.
class KToOneSearch {
 public:
  KToOneSearch(const std::vector<LocalLink>& links, int k)
      : options_(k), in_of_(k), state_(k, kUndecided), best_out_(k, 0.0),
        order_(search_order(links, k)) {
    for (const auto& l : links) {
      options_[l.tx].push_back(&l);
      in_of_[l.rx].push_back(&l);
    }
    for (auto& o : options_) {
      std::stable_sort(o.begin(), o.end(), [](const LocalLink* a, const LocalLink* b) {
        return a->w > b->w;
      });
    }
    for (int n = 0; n < k; ++n) {
      best_out_[n] = options_[n].empty() ? 0.0 : options_[n].front()->w;
      bound_ += best_out_[n];
    }
  }

  // Links chosen by state s, in ascending link order.
  std::vector<const LocalLink*> pick(std::uint32_t s) const {
    std::vector<const LocalLink*> chosen;
    for (std::size_t i = 0; i < options_.size(); ++i) {
      if (!((s >> i) & 1U)) continue;
      for (const LocalLink* l : options_[i]) {
        if (!((s >> l->rx) & 1U)) {
          chosen.push_back(l);
          break;
        }
      }
    }
    std::sort(chosen.begin(), chosen.end(),
              [](const LocalLink* a, const LocalLink* b) { return a->index < b->index; });
    return chosen;
  }

  std::uint32_t run() {
    dfs(0, 0);
    return best_s_;
  }

 private:
  double live_best_out(int n) const {
    for (const LocalLink* l : options_[n]) {
      if (state_[l->rx] != kTransmit) return l->w;
    }
    return 0.0;
  }

  void dfs(std::size_t depth, std::uint32_t s) {
    if (!near_or_above(bound_, best_)) return;
    if (depth == order_.size()) {
      double exact = 0.0;
      for (const LocalLink* l : pick(s)) exact += l->w;
      if (exact > best_) {
        best_ = exact;
        best_s_ = s;
      }
      return;
    }
    const int n = order_[depth];
    const double saved = bound_;
    const std::size_t mark = undo_.size();

    state_[n] = kTransmit;
    for (const LocalLink* l : in_of_[n]) {
      const int t = l->tx;
      if (state_[t] == kReceive) continue;
      const double now = live_best_out(t);
      if (now != best_out_[t]) {
        undo_.push_back({t, best_out_[t]});
        bound_ += now - best_out_[t];
        best_out_[t] = now;
      }
    }
    dfs(depth + 1, s | (1U << n));
    rollback(mark);
    bound_ = saved;

    state_[n] = kReceive;
    bound_ -= best_out_[n];
    dfs(depth + 1, s);
    bound_ = saved;
    state_[n] = kUndecided;
  }

  void rollback(std::size_t mark) {
    while (undo_.size() > mark) {
      best_out_[undo_.back().first] = undo_.back().second;
      undo_.pop_back();
    }
  }

  std::vector<std::vector<const LocalLink*>> options_, in_of_;
  std::vector<signed char> state_;
  std::vector<double> best_out_;
  std::vector<int> order_;
  std::vector<std::pair<int, double>> undo_;
  double bound_ = 0.0;
  double best_ = 0.0;
  std::uint32_t best_s_ = 0;
};

std::vector<int> enumerate_k_to_one(const std::vector<LocalLink>& links, int k) {
  KToOneSearch search(links, k);
  std::vector<int> chosen;
  for (const LocalLink* l : search.pick(search.run())) chosen.push_back(l->index);
  return chosen;
}

// Maximum-weight matching by subset DP; each node joins at most one link.
std::vector<int> enumerate_one_to_one(const std::vector<LocalLink>& links, int k) {
  // Heavier direction of each node pair.
  std::vector<std::vector<std::pair<int, const LocalLink*>>> adj(k);
  std::map<std::pair<int, int>, const LocalLink*> pair_best;
  for (const auto& l : links) {
    const auto key = std::minmax(l.tx, l.rx);
    auto it = pair_best.find(key);
    if (it == pair_best.end() || l.w > it->second->w) pair_best[key] = &l;
  }
  for (const auto& [key, l] : pair_best) {
    adj[key.first].push_back({key.second, l});
    adj[key.second].push_back({key.first, l});
  }

  const std::size_t total = std::size_t{1} << k;
  std::vector<double> dp(total, 0.0);
  std::vector<const LocalLink*> choice(total, nullptr);
  for (std::size_t mask = 1; mask < total; ++mask) {
    const int i = __builtin_ctzll(mask);
    const std::size_t without_i = mask & ~(std::size_t{1} << i);
    dp[mask] = dp[without_i];
    for (const auto& [j, l] : adj[i]) {
      if (!((mask >> j) & 1U)) continue;
      const double v = dp[without_i & ~(std::size_t{1} << j)] + l->w;
      if (v > dp[mask]) {
        dp[mask] = v;
        choice[mask] = l;
      }
    }
  }
  std::vector<int> chosen;
  std::size_t mask = total - 1;
  while (mask) {
    const int i = __builtin_ctzll(mask);
    const LocalLink* l = choice[mask];
    if (l == nullptr) {
      mask &= ~(std::size_t{1} << i);
      continue;
    }
    chosen.push_back(l->index);
    mask &= ~(std::size_t{1} << l->tx);
    mask &= ~(std::size_t{1} << l->rx);
  }
  return chosen;
}

std::vector<int> select_by_enumeration(std::span<const LinkWeight> weights, const NetworkGraph& g,
                                       ConstraintModel model) {
  std::vector<int> active;
  for (const Component& comp : positive_components(weights, g.node_count())) {
    const int k = static_cast<int>(comp.nodes.size());
    if (k > 24) {
      throw InputError("enumeration path: component with " + std::to_string(k) +
                       " nodes is too large");
    }
    std::map<NodeId, int> local;
    for (int i = 0; i < k; ++i) local[comp.nodes[i]] = i;
    std::vector<LocalLink> links;
    for (int idx : comp.links) {
      const LinkWeight& w = weights[idx];
      links.push_back({local[w.tx], local[w.rx], w.weight, idx});
    }
    std::vector<int> chosen;
    switch (model) {
      case ConstraintModel::kMuMimo: chosen = enumerate_mu_mimo(links, k); break;
      case ConstraintModel::kKToOne: chosen = enumerate_k_to_one(links, k); break;
      case ConstraintModel::kOneToOne: chosen = enumerate_one_to_one(links, k); break;
    }
    active.insert(active.end(), chosen.begin(), chosen.end());
  }
  std::sort(active.begin(), active.end());
  return active;
}

std::vector<int> select_by_program(std::span<const LinkWeight> weights, const NetworkGraph& g,
                                   ConstraintModel model) {
  const BinaryProgram prog = build_mwdbsg_program(weights, g, model);
  const Solution sol = solve_branch_and_bound(prog);
  if (sol.status != ProofStatus::kOptimal) {
    throw ContractViolation("schedule program infeasible; b = 0 is always feasible");
  }
  std::vector<int> active;
  for (std::size_t i = 0; i < sol.assignment.size(); ++i) {
    if (sol.assignment[i] && weights[i].weight > 0.0) active.push_back(static_cast<int>(i));
  }
  return active;
}

// Best assignment of transmitters (in order) to distinct receivers.
struct AssignmentSearch {
  const std::vector<std::vector<std::pair<int, int>>>* options;  // per tx: (rx, weight index)
  std::span<const LinkWeight> weights;
  std::vector<int> current;
  std::vector<int> best;
  double best_value = 0.0;

  void run(std::size_t t, std::uint32_t used, double value) {
    if (t == options->size()) {
      if (value > best_value) {
        std::vector<int> sorted = current;
        std::sort(sorted.begin(), sorted.end());
        const double exact = selection_value(weights, sorted);
        if (exact > best_value) {
          best_value = exact;
          best = std::move(sorted);
        }
      }
      return;
    }
    run(t + 1, used, value);
    for (const auto& [rx, idx] : (*options)[t]) {
      if ((used >> rx) & 1U) continue;
      current.push_back(idx);
      run(t + 1, used | (1U << rx), value + weights[idx].weight);
      current.pop_back();
    }
  }
};

}  // namespace

const char* to_string(ConstraintModel m) {
  switch (m) {
    case ConstraintModel::kMuMimo: return "mu_mimo";
    case ConstraintModel::kKToOne: return "k_to_1";
    case ConstraintModel::kOneToOne: return "one_to_1";
  }
  return "?";
}

ConstraintModel constraint_model_from_string(std::string_view s) {
  if (s == "mu_mimo" || s == "mu-mimo") return ConstraintModel::kMuMimo;
  if (s == "k_to_1" || s == "k-to-1") return ConstraintModel::kKToOne;
  if (s == "one_to_1" || s == "one-to-1" || s == "1-to-1") return ConstraintModel::kOneToOne;
  throw InputError("unknown constraint model '" + std::string(s) + "'");
}

double model_link_rate(const Link& link, ConstraintModel model) {
  return model == ConstraintModel::kMuMimo ? link.rate_bits : link.full_power_rate_bits;
}

std::vector<LinkWeight> select_flows_and_xi(const QueueMatrix& q, const NetworkGraph& g,
                                            ConstraintModel model) {
  if (static_cast<std::size_t>(q.rows()) != g.node_count()) {
    throw InputError("select_flows_and_xi: queue rows != node count");
  }
  const Eigen::Index nf = q.cols();
  std::vector<LinkWeight> out(g.link_count());
  for (std::size_t i = 0; i < g.link_count(); ++i) {
    const Link& l = g.links[i];
    LinkWeight& w = out[i];
    w.link = static_cast<int>(i);
    w.tx = l.tx;
    w.rx = l.rx;
    w.rate = model_link_rate(l, model);
    int best_f = 0;
    double best_diff = -std::numeric_limits<double>::infinity();
    for (Eigen::Index f = 0; f < nf; ++f) {
      const double diff = q(l.tx, f) - q(l.rx, f);
      if (diff > best_diff) {
        best_diff = diff;
        best_f = static_cast<int>(f);
      }
    }
    w.flow = best_f;
  }

  if (model == ConstraintModel::kMuMimo) {
    for (std::size_t n = 0; n < g.node_count(); ++n) {
      const auto& outs = g.out_links[n];
      for (int li : outs) {
        double group = 0.0;
        for (int lj : outs) {
          if (out[lj].flow == out[li].flow) group += out[lj].rate;
        }
        out[li].xi = group > 0.0 ? out[li].rate / group : 0.0;
      }
    }
  }

  for (auto& w : out) {
    if (nf == 0) {
      w.weight = 0.0;
      continue;
    }
    const double qn = q(w.tx, w.flow);
    const double diff = qn - q(w.rx, w.flow);
    w.weight = std::max(0.0, std::min(w.rate, w.xi * qn) * diff);
  }
  return out;
}

BinaryProgram build_mwdbsg_program(std::span<const LinkWeight> weights, const NetworkGraph& g,
                                   ConstraintModel model) {
  const std::size_t nl = g.link_count();
  if (weights.size() != nl) throw InputError("weights do not cover the links of the graph");
  for (std::size_t i = 0; i < nl; ++i) {
    if (weights[i].link != static_cast<int>(i) || weights[i].tx != g.links[i].tx ||
        weights[i].rx != g.links[i].rx) {
      throw InputError("weight " + std::to_string(i) + " does not match link " + std::to_string(i));
    }
  }

  BinaryProgram p;
  p.num_vars = nl;
  p.objective.resize(nl);
  p.var_labels.resize(nl);
  for (std::size_t i = 0; i < nl; ++i) {
    p.objective[i] = std::max(0.0, weights[i].weight);
    p.var_labels[i] = "b_" + std::to_string(g.links[i].tx) + "_" + std::to_string(g.links[i].rx);
  }

  for (std::size_t i = 0; i < nl; ++i) {
    const NodeId n = g.links[i].tx;
    LinearConstraint con;
    con.coefficients.assign(nl, 0.0);
    const double inv_deg = 1.0 / static_cast<double>(g.adjacency[n].size());
    for (int li : g.in_links[n]) con.coefficients[li] += inv_deg;
    con.coefficients[i] += 1.0;
    con.bound = 1.0;
    p.constraints.push_back(std::move(con));
  }

  if (model == ConstraintModel::kKToOne || model == ConstraintModel::kOneToOne) {
    for (std::size_t n = 0; n < g.node_count(); ++n) {
      if (g.out_links[n].size() < 2) continue;
      LinearConstraint con;
      con.coefficients.assign(nl, 0.0);
      for (int li : g.out_links[n]) con.coefficients[li] = 1.0;
      con.bound = 1.0;
      p.constraints.push_back(std::move(con));
    }
  }
  if (model == ConstraintModel::kOneToOne) {
    for (std::size_t n = 0; n < g.node_count(); ++n) {
      if (g.in_links[n].size() < 2) continue;
      LinearConstraint con;
      con.coefficients.assign(nl, 0.0);
      for (int li : g.in_links[n]) con.coefficients[li] = 1.0;
      con.bound = 1.0;
      p.constraints.push_back(std::move(con));
    }
  }
  return p;
}

double selection_value(std::span<const LinkWeight> weights, std::span<const int> active) {
  double v = 0.0;
  for (int li : active) v += weights[li].weight;
  return v;
}

std::vector<int> select_links(std::span<const LinkWeight> weights, const NetworkGraph& g,
                              ConstraintModel model, SolvePath path) {
  if (weights.size() != g.link_count()) throw InputError("weights do not cover the links of the graph");
  if (path == SolvePath::kAuto) {
    path = g.node_count() <= kMaxEnumerationNodes ? SolvePath::kEnumeration
                                                  : SolvePath::kBinaryProgram;
  }
  return path == SolvePath::kEnumeration ? select_by_enumeration(weights, g, model)
                                         : select_by_program(weights, g, model);
}

std::vector<int> oracle_select_links(std::span<const LinkWeight> weights, const NetworkGraph& g,
                                     ConstraintModel model) {
  const std::size_t n = g.node_count();
  if (n > kMaxOracleNodes) {
    throw InputError("schedule oracle refuses " + std::to_string(n) + " nodes (limit " +
                     std::to_string(kMaxOracleNodes) + ")");
  }
  if (weights.size() != g.link_count()) throw InputError("weights do not cover the links of the graph");

  std::vector<int> best;
  double best_value = 0.0;
  const std::uint32_t total = 1U << n;
  for (std::uint32_t s = 0; s < total; ++s) {
    auto tx = [&](NodeId v) { return ((s >> v) & 1U) != 0; };
    std::vector<int> chosen;
    switch (model) {
      case ConstraintModel::kMuMimo:
        for (std::size_t i = 0; i < weights.size(); ++i) {
          if (weights[i].weight > 0.0 && tx(weights[i].tx) && !tx(weights[i].rx)) {
            chosen.push_back(static_cast<int>(i));
          }
        }
        break;
      case ConstraintModel::kKToOne:
        for (std::size_t v = 0; v < n; ++v) {
          if (!tx(static_cast<NodeId>(v))) continue;
          int pick = -1;
          for (int li : g.out_links[v]) {
            if (weights[li].weight <= 0.0 || tx(weights[li].rx)) continue;
            if (pick < 0 || weights[li].weight > weights[pick].weight) pick = li;
          }
          if (pick >= 0) chosen.push_back(pick);
        }
        std::sort(chosen.begin(), chosen.end());
        break;
      case ConstraintModel::kOneToOne: {
        std::vector<std::vector<std::pair<int, int>>> options;
        for (std::size_t v = 0; v < n; ++v) {
          if (!tx(static_cast<NodeId>(v))) continue;
          std::vector<std::pair<int, int>> opts;
          for (int li : g.out_links[v]) {
            if (weights[li].weight > 0.0 && !tx(weights[li].rx)) opts.push_back({weights[li].rx, li});
          }
          if (!opts.empty()) options.push_back(std::move(opts));
        }
        AssignmentSearch search{&options, weights, {}, {}, 0.0};
        search.run(0, 0, 0.0);
        chosen = std::move(search.best);
        break;
      }
    }
    const double v = selection_value(weights, chosen);
    if (v > best_value) {
      best_value = v;
      best = std::move(chosen);
    }
  }
  return best;
}

Schedule realize_schedule(const QueueMatrix& q, const NetworkGraph& g, ConstraintModel /*model*/,
                          std::span<const LinkWeight> weights, std::vector<int> active) {
  std::sort(active.begin(), active.end());
  Schedule s;
  s.node_state.assign(g.node_count(), 0);
  for (int li : active) s.node_state[g.links[li].tx] = 1;
  s.objective = selection_value(weights, active);

  // xi restricted to the activated links sharing (tx, f*).
  std::map<std::pair<NodeId, int>, double> group_rate;
  for (int li : active) group_rate[{weights[li].tx, weights[li].flow}] += weights[li].rate;
  for (int li : active) {
    const LinkWeight& w = weights[li];
    const double xi = w.rate / group_rate[{w.tx, w.flow}];
    const double bits = std::min(w.rate, xi * q(w.tx, w.flow));
    if (bits > 0.0) s.served.push_back({li, w.tx, w.rx, w.flow, bits});
  }
  s.active_links = std::move(active);
  return s;
}

Schedule schedule_frame(const QueueMatrix& q, const NetworkGraph& g, ConstraintModel model,
                        SolvePath path) {
  const std::vector<LinkWeight> weights = select_flows_and_xi(q, g, model);
  std::vector<int> active = select_links(weights, g, model, path);
  return realize_schedule(q, g, model, weights, std::move(active));
}

Schedule schedule_oracle(const QueueMatrix& q, const NetworkGraph& g, ConstraintModel model) {
  const std::vector<LinkWeight> weights = select_flows_and_xi(q, g, model);
  std::vector<int> active = oracle_select_links(weights, g, model);
  return realize_schedule(q, g, model, weights, std::move(active));
}

std::vector<std::string> check_schedule(const Schedule& s, const QueueMatrix& q,
                                        const NetworkGraph& g, ConstraintModel model) {
  std::vector<std::string> v;
  std::vector<int> out_deg(g.node_count(), 0), in_deg(g.node_count(), 0);
  for (int li : s.active_links) {
    const Link& l = g.links[li];
    const std::string name = std::to_string(l.tx) + "->" + std::to_string(l.rx);
    if (!s.node_state[l.tx]) v.push_back("active link " + name + ": transmitter not in transmit state");
    if (s.node_state[l.rx]) v.push_back("active link " + name + ": receiver is transmitting");
    ++out_deg[l.tx];
    ++in_deg[l.rx];
  }
  for (std::size_t n = 0; n < g.node_count(); ++n) {
    if (model != ConstraintModel::kMuMimo && out_deg[n] > 1) {
      v.push_back("node " + std::to_string(n) + " transmits on more than one link");
    }
    if (model == ConstraintModel::kOneToOne && in_deg[n] > 1) {
      v.push_back("node " + std::to_string(n) + " receives on more than one link");
    }
  }
  std::map<int, int> per_link;
  std::map<std::pair<NodeId, int>, double> drained;
  for (const ServedEntry& e : s.served) {
    if (!std::binary_search(s.active_links.begin(), s.active_links.end(), e.link)) {
      v.push_back("served bits on inactive link " + std::to_string(e.link));
      continue;
    }
    if (++per_link[e.link] > 1) v.push_back("link " + std::to_string(e.link) + " serves two flows");
    const double rate = model_link_rate(g.links[e.link], model);
    if (e.bits > rate * (1.0 + 1e-12)) {
      v.push_back("link " + std::to_string(e.link) + " serves above its rate");
    }
    drained[{e.tx, e.flow}] += e.bits;
  }
  for (const auto& [key, bits] : drained) {
    const double have = q(key.first, key.second);
    if (bits > have * (1.0 + 1e-12) + 1e-12) {
      v.push_back("node " + std::to_string(key.first) + " flow " + std::to_string(key.second) +
                  " drains more than its queue");
    }
  }
  return v;
}

}  // namespace mbp
