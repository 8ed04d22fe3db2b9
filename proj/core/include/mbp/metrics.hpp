#pragma once

#include <cstddef>
#include <vector>

namespace mbp {

// Time series recorded by one simulation run. Per-frame totals are kept
// for every frame; per-flow cumulative counters only at checkpoints
// (frame 0, every `snapshot_stride` frames, and the final frame).
struct MetricsLog {
  double frame_s = 1e-6;
  std::size_t snapshot_stride = 100;
  std::size_t num_flows = 0;

  // Indexed by frame.
  std::vector<double> queue_l1;        // ||q||_1 after the frame, bits
  std::vector<double> source_rate;     // sum of lambda, bits/frame
  std::vector<double> arrivals;        // sum of injected bits
  std::vector<double> delivered;       // bits absorbed at destinations

  // Checkpoint k covers frames [0, checkpoint_frames[k]).
  std::vector<std::size_t> checkpoint_frames;
  std::vector<std::vector<double>> cum_arrivals;   // [checkpoint][flow]
  std::vector<std::vector<double>> cum_delivered;  // [checkpoint][flow]

  std::size_t frames() const { return queue_l1.size(); }
  double total_arrivals() const;
  double total_delivered() const;
  // Total delivered bits / (frames * T_f).
  double sum_rate_bps() const;
  // Long-term per-flow delivered rate over the whole run, bits/s.
  std::vector<double> flow_delivered_bps() const;
  std::vector<double> flow_arrival_bps() const;
};

}  // namespace mbp
