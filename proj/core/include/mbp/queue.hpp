#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include <Eigen/Core>

#include "mbp/metrics.hpp"
#include "mbp/random.hpp"
#include "mbp/topology.hpp"

namespace mbp {

// Bits per (node, flow). Rows are nodes, columns are flows.
using QueueMatrix = Eigen::MatrixXd;
using RateMatrix = Eigen::MatrixXd;

// Source and destination membership of every (node, flow) pair.
class FlowTable {
 public:
  FlowTable() = default;
  FlowTable(std::vector<FlowSpec> flows, std::size_t node_count);

  std::size_t num_flows() const { return flows_.size(); }
  std::size_t num_nodes() const { return node_count_; }
  const std::vector<FlowSpec>& flows() const { return flows_; }

  bool is_source(NodeId n, int f) const { return source_(n, f) != 0; }
  bool is_destination(NodeId n, int f) const { return destination_(n, f) != 0; }

 private:
  std::vector<FlowSpec> flows_;
  std::size_t node_count_ = 0;
  Eigen::Matrix<unsigned char, Eigen::Dynamic, Eigen::Dynamic> source_;
  Eigen::Matrix<unsigned char, Eigen::Dynamic, Eigen::Dynamic> destination_;
};

// Bits moved over one link for one flow during a frame.
struct ServedEntry {
  int link = -1;
  NodeId tx = 0;
  NodeId rx = 0;
  int flow = 0;
  double bits = 0.0;
};

using ServedRates = std::vector<ServedEntry>;

struct ArrivalBatch {
  RateMatrix bits;    // a, injected this frame
  RateMatrix lambda;  // mean rate the batch was drawn with
};

enum class ArrivalLaw { kDeterministic, kPoisson };

struct FrameOutcome {
  QueueMatrix queues;
  std::vector<double> delivered;  // bits absorbed per flow this frame
};

// q' = q + incoming - outgoing + arrivals off the destinations, 0 on them.
// Throws ContractViolation if service would drive a queue negative.
FrameOutcome apply_frame(const QueueMatrix& q, const ServedRates& served,
                         const ArrivalBatch& arrivals, const FlowTable& flows);

// Draws a with mean lambda. Deterministic law: a = lambda.
ArrivalBatch sample_arrivals(const RateMatrix& lambda, ArrivalLaw law, RandomStream& rng);

struct FlowConservation {
  int flow = 0;
  double mean_source_rate = 0.0;     // bits/frame
  double mean_delivered_rate = 0.0;  // bits/frame
  double relative_gap = 0.0;         // |src - delivered| / src, 0 if src == 0
};

struct ConservationReport {
  std::size_t begin_frame = 0;
  std::size_t end_frame = 0;
  std::vector<FlowConservation> flows;
  double max_gap() const;
};

// Per-flow source vs delivered rates over [begin_frame, end_frame). The
// window is snapped outward to the nearest recorded checkpoints.
ConservationReport conservation_audit(const MetricsLog& log, std::size_t begin_frame,
                                      std::size_t end_frame);

// CSV rows "frame,node,flow,bits" for one queue snapshot.
void write_queue_snapshot(std::ostream& os, std::size_t frame, const QueueMatrix& q);

}  // namespace mbp
