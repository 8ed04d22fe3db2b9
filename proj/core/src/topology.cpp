#include "mbp/topology.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "mbp/error.hpp"

namespace mbp {

namespace {

// Below one metre the far-field pathloss law is meaningless.
constexpr double kMinLinkDistance = 1.0;

double distance(const Node& a, const Node& b) {
  return std::max(kMinLinkDistance, std::hypot(a.x_m - b.x_m, a.y_m - b.y_m));
}

bool is_ue(const Node& n) { return n.node_class == NodeClass::kUserEquipment; }

struct PairChannel {
  NodeId a;
  NodeId b;
  LinkChannel a_to_b;
};

// Samples the pair's macroscopic state first; the fading matrix is only
// drawn for pairs that pass the connectivity threshold.
bool sample_pair(const Node& a, const Node& b, const DropConfig& cfg,
                 const ChannelParams& params, RandomStream& rng, PairChannel& out) {
  const double d = distance(a, b);
  LinkChannel chan;
  chan.state = sample_link_state(d, rng);
  chan.pathloss_db = sample_pathloss_db(chan.state, d, rng);
  if (!(chan.pathloss_db < cfg.pathloss_threshold_db)) return false;
  chan.fading = sample_fading_matrix(b.radio.antenna_count(), a.radio.antenna_count(), params, rng);
  BeamformResult bf = beamform_gain(chan.fading);
  chan.array_gain = bf.gain;
  chan.tx_beam = std::move(bf.tx_beam);
  chan.rx_beam = std::move(bf.rx_beam);
  out = PairChannel{a.id, b.id, std::move(chan)};
  return true;
}

}  // namespace

const RadioProfile& RadioSet::for_class(NodeClass c) const {
  switch (c) {
    case NodeClass::kBaseStation: return bs;
    case NodeClass::kRelay: return rn;
    case NodeClass::kUserEquipment: return ue;
  }
  return bs;
}

void RadioSet::validate() const {
  bs.validate();
  rn.validate();
  ue.validate();
}

void NetworkGraph::rebuild_index() {
  const std::size_t n = nodes.size();
  adjacency.assign(n, {});
  out_links.assign(n, {});
  in_links.assign(n, {});
  for (std::size_t i = 0; i < links.size(); ++i) {
    const Link& l = links[i];
    if (l.tx < 0 || l.rx < 0 || static_cast<std::size_t>(l.tx) >= n ||
        static_cast<std::size_t>(l.rx) >= n) {
      throw InputError("link " + std::to_string(i) + " references a missing node");
    }
    out_links[l.tx].push_back(static_cast<int>(i));
    in_links[l.rx].push_back(static_cast<int>(i));
    adjacency[l.tx].push_back(l.rx);
  }
  for (auto& a : adjacency) {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }
}

int NetworkGraph::find_link(NodeId tx, NodeId rx) const {
  if (tx < 0 || static_cast<std::size_t>(tx) >= out_links.size()) return -1;
  for (int li : out_links[tx]) {
    if (links[li].rx == rx) return li;
  }
  return -1;
}

int NetworkGraph::max_degree() const {
  std::size_t best = 0;
  for (const auto& a : adjacency) best = std::max(best, a.size());
  return static_cast<int>(best);
}

double NetworkGraph::max_full_power_rate() const {
  double best = 0.0;
  for (const auto& l : links) best = std::max(best, l.full_power_rate_bits);
  return best;
}

void DropConfig::validate() const {
  if (!(cell_radius_m > 0.0)) throw InputError("cell_radius_m must be > 0");
  if (!(rn_distance_m > 0.0)) throw InputError("rn_distance_m must be > 0");
  if (rn_count < 0) throw InputError("rn_count must be >= 0");
  if (ue_count < 0) throw InputError("ue_count must be >= 0");
  if (std::isnan(pathloss_threshold_db) || pathloss_threshold_db == std::numeric_limits<double>::infinity()) {
    throw InputError("pathloss_threshold_db must be a number below +inf");
  }
  if (max_ue_retries < 0) throw InputError("max_ue_retries must be >= 0");
}

Drop generate_drop(const DropConfig& cfg, const ChannelParams& channel, const RadioSet& radios) {
  cfg.validate();
  channel.validate();
  radios.validate();

  RandomStream placement = make_stream(derive_seed(cfg.seed, StreamTag::kPlacement));
  RandomStream chan_rng = make_stream(derive_seed(cfg.seed, StreamTag::kChannel));
  RandomStream rotation_rng = make_stream(derive_seed(cfg.seed, StreamTag::kRotation));

  Drop drop;
  NetworkGraph& g = drop.graph;

  auto add_node = [&](NodeClass c, double x, double y) {
    Node n;
    n.id = static_cast<NodeId>(g.nodes.size());
    n.node_class = c;
    n.x_m = x;
    n.y_m = y;
    n.radio = radios.for_class(c);
    g.nodes.push_back(n);
    return n.id;
  };

  add_node(NodeClass::kBaseStation, 0.0, 0.0);
  double offset = 0.0;
  if (cfg.rotate_relays) {
    offset = std::uniform_real_distribution<double>(0.0, 2.0 * std::numbers::pi)(rotation_rng);
  }
  for (int k = 0; k < cfg.rn_count; ++k) {
    const double angle = offset + 2.0 * std::numbers::pi * k / cfg.rn_count;
    add_node(NodeClass::kRelay, cfg.rn_distance_m * std::cos(angle),
             cfg.rn_distance_m * std::sin(angle));
  }
  const int infra_count = static_cast<int>(g.nodes.size());

  std::vector<PairChannel> pairs;
  for (int a = 0; a < infra_count; ++a) {
    for (int b = a + 1; b < infra_count; ++b) {
      PairChannel pc;
      if (sample_pair(g.nodes[a], g.nodes[b], cfg, channel, chan_rng, pc)) {
        pairs.push_back(std::move(pc));
      }
    }
  }

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int k = 0; k < cfg.ue_count; ++k) {
    const NodeId ue = add_node(NodeClass::kUserEquipment, 0.0, 0.0);
    bool attached = false;
    for (int attempt = 0; attempt <= cfg.max_ue_retries && !attached; ++attempt) {
      if (attempt > 0) ++g.ue_retries;
      const double r = cfg.cell_radius_m * std::sqrt(unit(placement));
      const double theta = 2.0 * std::numbers::pi * unit(placement);
      g.nodes[ue].x_m = r * std::cos(theta);
      g.nodes[ue].y_m = r * std::sin(theta);
      std::vector<PairChannel> ue_pairs;
      for (int a = 0; a < infra_count; ++a) {
        PairChannel pc;
        if (sample_pair(g.nodes[a], g.nodes[ue], cfg, channel, chan_rng, pc)) {
          ue_pairs.push_back(std::move(pc));
        }
      }
      if (!ue_pairs.empty()) {
        attached = true;
        for (auto& pc : ue_pairs) pairs.push_back(std::move(pc));
      }
    }
    if (!attached) {
      throw InputError("UE " + std::to_string(ue) + " has no link after " +
                       std::to_string(cfg.max_ue_retries) + " placement retries");
    }
  }

  // Both directions of every connected pair; reverse uses reciprocity.
  std::sort(pairs.begin(), pairs.end(), [](const PairChannel& x, const PairChannel& y) {
    return std::pair(x.a, x.b) < std::pair(y.a, y.b);
  });
  for (auto& pc : pairs) {
    Link fwd;
    fwd.tx = pc.a;
    fwd.rx = pc.b;
    fwd.channel = std::move(pc.a_to_b);
    Link rev;
    rev.tx = pc.b;
    rev.rx = pc.a;
    rev.channel = reverse_channel(fwd.channel);
    g.links.push_back(std::move(fwd));
    g.links.push_back(std::move(rev));
  }
  std::stable_sort(g.links.begin(), g.links.end(), [](const Link& x, const Link& y) {
    return std::pair(x.tx, x.rx) < std::pair(y.tx, y.rx);
  });
  g.rebuild_index();

  // Rates are frozen with the final neighbour counts.
  for (auto& l : g.links) {
    const RadioProfile& tx = g.nodes[l.tx].radio;
    const RadioProfile& rx = g.nodes[l.rx].radio;
    const double share = 1.0 / static_cast<double>(g.adjacency[l.tx].size());
    l.rate_bits = link_rate_bits(share, tx, rx, l.channel, channel);
    l.full_power_rate_bits = link_rate_bits(1.0, tx, rx, l.channel, channel);
  }

  int flow_id = 0;
  for (const Node& n : g.nodes) {
    if (!is_ue(n)) continue;
    drop.flows.push_back(FlowSpec{flow_id++, {n.id}, {0}});
    drop.flows.push_back(FlowSpec{flow_id++, {0}, {n.id}});
  }
  return drop;
}

GraphReport validate_graph(const NetworkGraph& g) {
  GraphReport report;
  auto violation = [&](std::string s) { report.violations.push_back(std::move(s)); };
  const std::size_t n = g.nodes.size();

  for (std::size_t i = 0; i < n; ++i) {
    if (g.nodes[i].id != static_cast<NodeId>(i)) {
      violation("node at index " + std::to_string(i) + " has id " + std::to_string(g.nodes[i].id));
    }
  }

  std::set<std::pair<NodeId, NodeId>> seen;
  std::vector<std::set<NodeId>> derived(n);
  for (std::size_t i = 0; i < g.links.size(); ++i) {
    const Link& l = g.links[i];
    const std::string name = "link " + std::to_string(l.tx) + "->" + std::to_string(l.rx);
    const bool tx_ok = l.tx >= 0 && static_cast<std::size_t>(l.tx) < n;
    const bool rx_ok = l.rx >= 0 && static_cast<std::size_t>(l.rx) < n;
    if (!tx_ok || !rx_ok) {
      violation(name + ": endpoint does not exist");
      continue;
    }
    if (l.tx == l.rx) violation(name + ": self loop");
    if (is_ue(g.nodes[l.tx]) && is_ue(g.nodes[l.rx])) violation(name + ": UE-UE link");
    if (!seen.insert({l.tx, l.rx}).second) violation(name + ": duplicate");
    if (!(l.rate_bits > 0.0) || !std::isfinite(l.rate_bits)) violation(name + ": rate not positive");
    if (l.rate_bits > l.full_power_rate_bits * (1.0 + 1e-12)) {
      violation(name + ": equal-split rate exceeds full-power rate");
    }
    derived[l.tx].insert(l.rx);
  }
  for (const auto& [tx, rx] : seen) {
    if (!seen.count({rx, tx})) {
      violation("link " + std::to_string(tx) + "->" + std::to_string(rx) + ": reverse link missing");
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::vector<NodeId> expect(derived[i].begin(), derived[i].end());
    const std::vector<NodeId>* stored = i < g.adjacency.size() ? &g.adjacency[i] : nullptr;
    if (stored == nullptr || *stored != expect) {
      violation("node " + std::to_string(i) + ": adjacency A(n) inconsistent with links");
    }
  }
  return report;
}

}  // namespace mbp
