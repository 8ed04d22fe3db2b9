#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mbp/channel.hpp"

namespace mbp {

using NodeId = int;

struct Node {
  NodeId id = 0;
  NodeClass node_class = NodeClass::kBaseStation;
  double x_m = 0.0;
  double y_m = 0.0;
  RadioProfile radio;
};

// Directed link with its channel and the two fixed rates used by the
// schedulers: `rate_bits` under equal power split over A(tx) and
// `full_power_rate_bits` with the whole budget on this link.
struct Link {
  NodeId tx = 0;
  NodeId rx = 0;
  LinkChannel channel;
  double rate_bits = 0.0;
  double full_power_rate_bits = 0.0;
};

struct FlowSpec {
  int id = 0;
  std::vector<NodeId> sources;
  std::vector<NodeId> destinations;
};

struct RadioSet {
  RadioProfile bs = RadioProfile::defaults(NodeClass::kBaseStation);
  RadioProfile rn = RadioProfile::defaults(NodeClass::kRelay);
  RadioProfile ue = RadioProfile::defaults(NodeClass::kUserEquipment);

  const RadioProfile& for_class(NodeClass c) const;
  void validate() const;
};

struct NetworkGraph {
  std::vector<Node> nodes;
  std::vector<Link> links;
  // A(n), sorted ascending. Maintained by rebuild_index().
  std::vector<std::vector<NodeId>> adjacency;
  // Link indices leaving / entering each node, ascending.
  std::vector<std::vector<int>> out_links;
  std::vector<std::vector<int>> in_links;
  // Number of UE placements that were redrawn because the UE had no link.
  int ue_retries = 0;

  std::size_t node_count() const { return nodes.size(); }
  std::size_t link_count() const { return links.size(); }

  // Recomputes adjacency, out_links and in_links from `links`.
  void rebuild_index();
  // Link index of (tx, rx) or -1.
  int find_link(NodeId tx, NodeId rx) const;
  // A_max = max_n |A(n)|.
  int max_degree() const;
  // R_max = max full-power link rate.
  double max_full_power_rate() const;
};

struct DropConfig {
  double cell_radius_m = 200.0;
  double rn_distance_m = 115.0;
  int rn_count = 4;
  int ue_count = 10;
  double pathloss_threshold_db = 200.0;
  std::uint64_t seed = 0;
  // Rotate the relay cross by a seed-derived angle. Off: relays sit at
  // 0, 90, 180 and 270 degrees.
  bool rotate_relays = false;
  int max_ue_retries = 100;

  void validate() const;
};

struct Drop {
  NetworkGraph graph;
  std::vector<FlowSpec> flows;
};

// Node ids: 0 is the BS, then the relays, then the UEs. Every UE gets an
// uplink flow (id 2k) and a downlink flow (id 2k+1).
Drop generate_drop(const DropConfig& cfg, const ChannelParams& channel,
                   const RadioSet& radios = {});

struct GraphReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

GraphReport validate_graph(const NetworkGraph& g);

// Line-oriented text export. Fading matrices and beams are not written.
void write_graph(std::ostream& os, const NetworkGraph& g);
NetworkGraph read_graph(std::istream& is, const RadioSet& radios = {});

inline constexpr int kGraphFormatVersion = 1;

}  // namespace mbp
