#pragma once

#include <vector>

#include "mbp/channel.hpp"
#include "mbp/scheduler.hpp"
#include "mbp/topology.hpp"

namespace mbp {

// Received power (W) leaking into each active link of `s` from the other
// active streams: mismatched transmit beams of the same transmitter, other
// transmitters aiming at the same receiver, and those transmitters'
// streams towards third nodes. Streams are independent, so the term
// powers add. Entry i belongs to s.active_links[i].
//
// Offline only. Link rates never include it.
std::vector<double> interference_power_diagnostic(const NetworkGraph& g, const Schedule& s,
                                                  ConstraintModel model);

struct InterferenceReport {
  std::vector<double> ratio;  // I / (W * N_0) per active link
  double median_ratio = 0.0;
  double max_ratio = 0.0;
};

InterferenceReport interference_report(const NetworkGraph& g, const Schedule& s,
                                       ConstraintModel model, const ChannelParams& params);

}  // namespace mbp
