#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mbp/bip.hpp"
#include "mbp/queue.hpp"
#include "mbp/topology.hpp"

namespace mbp {

// Which link sets a frame may activate.
//   kMuMimo:   any directed bipartite subgraph; equal power split over A(n).
//   kKToOne:   at most one outgoing link per transmitter, full power.
//   kOneToOne: a matching, full power.
enum class ConstraintModel { kMuMimo, kKToOne, kOneToOne };

inline constexpr std::array<ConstraintModel, 3> kAllModels = {
    ConstraintModel::kMuMimo, ConstraintModel::kKToOne, ConstraintModel::kOneToOne};

const char* to_string(ConstraintModel m);
ConstraintModel constraint_model_from_string(std::string_view s);

// Rate a link is served at under `model`.
double model_link_rate(const Link& link, ConstraintModel model);

struct LinkWeight {
  int link = -1;
  NodeId tx = 0;
  NodeId rx = 0;
  int flow = 0;       // f*, the flow with the largest backlog difference
  double rate = 0.0;  // model_link_rate
  double xi = 1.0;    // share of the tx queue of f* this link may drain
  double weight = 0.0;
};

// One entry per link, in link order. Under kMuMimo xi splits the f*
// backlog of tx over every candidate link carrying the same f*, in
// proportion to rate; the single-link models use xi = 1.
std::vector<LinkWeight> select_flows_and_xi(const QueueMatrix& q, const NetworkGraph& g,
                                            ConstraintModel model);

// Binary program over b_{n,m}: maximize sum w*b subject to the half-duplex
// rows b_{n,m} + (1/|A(n)|) sum_{m'} b_{m',n} <= 1, plus the per-model
// degree rows.
BinaryProgram build_mwdbsg_program(std::span<const LinkWeight> weights, const NetworkGraph& g,
                                   ConstraintModel model);

struct Schedule {
  std::vector<std::uint8_t> node_state;  // 1 = transmit
  std::vector<int> active_links;         // ascending link indices
  ServedRates served;
  double objective = 0.0;                // sum of active weights
};

enum class SolvePath {
  kAuto,           // enumeration up to kMaxEnumerationNodes, else program
  kEnumeration,    // exact search over node states per component
  kBinaryProgram,  // branch-and-bound on the binary program
};

inline constexpr std::size_t kMaxEnumerationNodes = 20;
inline constexpr std::size_t kMaxOracleNodes = 20;

// Maximum-weight feasible link set for the given weights.
std::vector<int> select_links(std::span<const LinkWeight> weights, const NetworkGraph& g,
                              ConstraintModel model, SolvePath path = SolvePath::kAuto);

// Brute force over all 2^N node-state vectors. Refuses N > kMaxOracleNodes.
std::vector<int> oracle_select_links(std::span<const LinkWeight> weights, const NetworkGraph& g,
                                     ConstraintModel model);

// Sum of weights over `active`, accumulated in ascending link order.
double selection_value(std::span<const LinkWeight> weights, std::span<const int> active);

// Node states and served bits for an activated link set. Service over a
// link is min(R, xi_sched * q) with xi_sched recomputed over the
// activated links sharing (tx, f*).
Schedule realize_schedule(const QueueMatrix& q, const NetworkGraph& g, ConstraintModel model,
                          std::span<const LinkWeight> weights, std::vector<int> active);

Schedule schedule_frame(const QueueMatrix& q, const NetworkGraph& g, ConstraintModel model,
                        SolvePath path = SolvePath::kAuto);

Schedule schedule_oracle(const QueueMatrix& q, const NetworkGraph& g, ConstraintModel model);

// Empty when the schedule is a valid DBSG for `model` and its service
// respects link rates and starting queues.
std::vector<std::string> check_schedule(const Schedule& s, const QueueMatrix& q,
                                        const NetworkGraph& g, ConstraintModel model);

}  // namespace mbp
