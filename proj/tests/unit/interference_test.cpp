#include <gtest/gtest.h>

#include <cmath>

#include "mbp/error.hpp"
#include "mbp/interference.hpp"
#include "oracles.hpp"

namespace mbp {
namespace {

LinkChannel two_antenna_tx(const ComplexVector& row, double pathloss_db) {
  LinkChannel c;
  c.state = LinkState::kLineOfSight;
  c.pathloss_db = pathloss_db;
  c.fading = row.transpose();
  c.tx_beam = row.normalized();
  c.rx_beam = ComplexVector::Ones(1);
  c.array_gain = row.norm();
  return c;
}

// Node 0 serves nodes 1 and 2 at once; each receiver has one antenna.
struct Broadcast {
  NetworkGraph g = testing::make_graph(3, {{0, 1, 1, 1}, {0, 2, 1, 1}});
  Schedule s;

  Broadcast(const ComplexVector& to1, const ComplexVector& to2) {
    g.links[g.find_link(0, 1)].channel = two_antenna_tx(to1, 60.0);
    g.links[g.find_link(0, 2)].channel = two_antenna_tx(to2, 70.0);
    s.node_state = {1, 0, 0};
    s.active_links = {g.find_link(0, 1), g.find_link(0, 2)};
  }
};

TEST(Interference, SingleActiveLinkSeesNothing) {
  Broadcast b(ComplexVector::Unit(2, 0), ComplexVector::Unit(2, 1));
  b.s.active_links = {b.g.find_link(0, 1)};
  const auto p = interference_power_diagnostic(b.g, b.s, ConstraintModel::kMuMimo);
  ASSERT_EQ(p.size(), 1u);
  EXPECT_EQ(p[0], 0.0);
}

TEST(Interference, OrthogonalBeamsDoNotLeak) {
  Broadcast b(ComplexVector::Unit(2, 0), ComplexVector::Unit(2, 1));
  const auto p = interference_power_diagnostic(b.g, b.s, ConstraintModel::kMuMimo);
  ASSERT_EQ(p.size(), 2u);
  EXPECT_EQ(p[0], 0.0);
  EXPECT_EQ(p[1], 0.0);
}

TEST(Interference, OverlappingBeamLeakMatchesHandComputation) {
  ComplexVector diag(2);
  diag << 1.0, 1.0;
  Broadcast b(ComplexVector::Unit(2, 0), diag);
  const auto p = interference_power_diagnostic(b.g, b.s, ConstraintModel::kMuMimo);
  const double watts = b.g.nodes[0].radio.tx_power_watts();
  // At node 1: |[1 0] . [1 1]/sqrt2|^2 = 1/2, half the power, 60 dB loss.
  EXPECT_NEAR(p[0], 0.5 * watts * 0.5 * 1e-6, 1e-18);
  // At node 2: |[1 1] . [1 0]|^2 = 1, half the power, 70 dB loss.
  EXPECT_NEAR(p[1], 0.5 * watts * 1.0 * 1e-7, 1e-18);

  const ChannelParams params;
  const InterferenceReport r = interference_report(b.g, b.s, ConstraintModel::kMuMimo, params);
  ASSERT_EQ(r.ratio.size(), 2u);
  for (int i = 0; i < 2; ++i) {
    const NodeId rx = b.g.links[b.s.active_links[i]].rx;
    EXPECT_DOUBLE_EQ(r.ratio[i], p[i] / (params.bandwidth_hz *
                                         noise_density_w_per_hz(params, b.g.nodes[rx].radio)));
  }
  EXPECT_DOUBLE_EQ(r.median_ratio, 0.5 * (r.ratio[0] + r.ratio[1]));
  EXPECT_DOUBLE_EQ(r.max_ratio, std::max(r.ratio[0], r.ratio[1]));
}

TEST(Interference, MissingFadingIsRejected) {
  const NetworkGraph g = testing::make_graph(2, {{0, 1, 1, 1}});
  Schedule s;
  s.node_state = {1, 0};
  s.active_links = {0};
  EXPECT_THROW(interference_power_diagnostic(g, s, ConstraintModel::kMuMimo), InputError);
}

}  // namespace
}  // namespace mbp
