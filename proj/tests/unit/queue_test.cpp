#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "mbp/error.hpp"
#include "mbp/harness.hpp"
#include "mbp/queue.hpp"
#include "mbp/scheduler.hpp"
#include "oracles.hpp"

namespace mbp {
namespace {

ArrivalBatch no_arrivals(Eigen::Index nodes, Eigen::Index flows) {
  return {RateMatrix::Zero(nodes, flows), RateMatrix::Zero(nodes, flows)};
}

// Four nodes on a line 3 - 2 - 1 - 0 with one flow from node 2 to node 0.
struct LineFixture {
  FlowTable flows{{FlowSpec{0, {2}, {0}}}, 4};
};

TEST(ApplyFrame, QueueArithmetic) {
  LineFixture fx;
  QueueMatrix q = QueueMatrix::Zero(4, 1);
  q(2, 0) = 10.0;
  q(3, 0) = 6.0;
  const ServedRates served = {{-1, 3, 2, 0, 5.0}, {-1, 2, 1, 0, 3.0}};
  ArrivalBatch a = no_arrivals(4, 1);
  a.bits(2, 0) = 2.0;
  const FrameOutcome out = apply_frame(q, served, a, fx.flows);
  EXPECT_EQ(out.queues(2, 0), 14.0);
  EXPECT_EQ(out.queues(1, 0), 3.0);
  EXPECT_EQ(out.queues(3, 0), 1.0);
  EXPECT_EQ(out.delivered[0], 0.0);
}

TEST(ApplyFrame, DestinationAbsorbs) {
  LineFixture fx;
  QueueMatrix q = QueueMatrix::Zero(4, 1);
  q(1, 0) = 9.0;
  const FrameOutcome out = apply_frame(q, {{-1, 1, 0, 0, 7.0}}, no_arrivals(4, 1), fx.flows);
  EXPECT_EQ(out.queues(0, 0), 0.0);
  EXPECT_EQ(out.delivered[0], 7.0);
  EXPECT_EQ(out.queues(1, 0), 2.0);
}

TEST(ApplyFrame, IdleFrameIsIdentity) {
  LineFixture fx;
  QueueMatrix q(4, 1);
  q << 0.0, 1.5, 2.5, 3.5;
  const FrameOutcome out = apply_frame(q, {}, no_arrivals(4, 1), fx.flows);
  EXPECT_TRUE(out.queues == q);
  EXPECT_EQ(out.delivered[0], 0.0);
}

TEST(ApplyFrame, OverdrawIsContractViolation) {
  LineFixture fx;
  QueueMatrix q = QueueMatrix::Zero(4, 1);
  q(2, 0) = 10.0;
  EXPECT_THROW(apply_frame(q, {{-1, 2, 1, 0, 15.0}}, no_arrivals(4, 1), fx.flows),
               ContractViolation);
  EXPECT_THROW(apply_frame(q, {{-1, 2, 1, 0, -1.0}}, no_arrivals(4, 1), fx.flows),
               ContractViolation);
}

TEST(ApplyFrame, ArrivalsAreNotServedInTheirOwnFrame) {
  LineFixture fx;
  QueueMatrix q = QueueMatrix::Zero(4, 1);
  ArrivalBatch a = no_arrivals(4, 1);
  a.bits(2, 0) = 100.0;
  EXPECT_THROW(apply_frame(q, {{-1, 2, 1, 0, 1.0}}, a, fx.flows), ContractViolation);
}

TEST(ApplyFrame, DimensionMismatch) {
  LineFixture fx;
  EXPECT_THROW(apply_frame(QueueMatrix::Zero(3, 1), {}, no_arrivals(3, 1), fx.flows), InputError);
  EXPECT_THROW(apply_frame(QueueMatrix::Zero(4, 1), {}, no_arrivals(4, 2), fx.flows), InputError);
}

TEST(FlowTable, RejectsBadSpecs) {
  EXPECT_THROW(FlowTable({FlowSpec{0, {1}, {1}}}, 3), InputError);
  EXPECT_THROW(FlowTable({FlowSpec{0, {}, {1}}}, 3), InputError);
  EXPECT_THROW(FlowTable({FlowSpec{1, {0}, {1}}}, 3), InputError);
  EXPECT_THROW(FlowTable({FlowSpec{0, {5}, {1}}}, 3), InputError);
  const FlowTable ok({FlowSpec{0, {0, 2}, {1}}}, 3);
  EXPECT_TRUE(ok.is_source(0, 0));
  EXPECT_TRUE(ok.is_source(2, 0));
  EXPECT_TRUE(ok.is_destination(1, 0));
  EXPECT_FALSE(ok.is_destination(0, 0));
}

TEST(SampleArrivals, ZeroRateGivesZero) {
  RandomStream rng = make_stream(1);
  const RateMatrix lambda = RateMatrix::Zero(3, 2);
  for (ArrivalLaw law : {ArrivalLaw::kDeterministic, ArrivalLaw::kPoisson}) {
    const ArrivalBatch a = sample_arrivals(lambda, law, rng);
    EXPECT_TRUE(a.bits.isZero(0.0));
  }
}

TEST(SampleArrivals, DeterministicLawCopiesRate) {
  RandomStream rng = make_stream(1);
  RateMatrix lambda = RateMatrix::Zero(2, 1);
  lambda(1, 0) = 1000.0;
  for (int t = 0; t < 10; ++t) {
    const ArrivalBatch a = sample_arrivals(lambda, ArrivalLaw::kDeterministic, rng);
    EXPECT_EQ(a.bits(1, 0), 1000.0);
    EXPECT_EQ(a.bits(0, 0), 0.0);
    EXPECT_TRUE(a.lambda == lambda);
  }
}

TEST(SampleArrivals, PoissonMeanWithinThreeStandardErrors) {
  RandomStream rng = make_stream(77);
  RateMatrix lambda = RateMatrix::Zero(1, 1);
  lambda(0, 0) = 1000.0;
  const int frames = 100000;
  double sum = 0.0;
  for (int t = 0; t < frames; ++t) {
    const double a = sample_arrivals(lambda, ArrivalLaw::kPoisson, rng).bits(0, 0);
    ASSERT_EQ(a, std::floor(a));
    sum += a;
  }
  EXPECT_NEAR(sum / frames, 1000.0, 3.0 * std::sqrt(1000.0 / frames));
}

TEST(SampleArrivals, NegativeRateRejectedForPoisson) {
  RandomStream rng = make_stream(1);
  RateMatrix lambda = RateMatrix::Constant(1, 1, -1.0);
  EXPECT_THROW(sample_arrivals(lambda, ArrivalLaw::kPoisson, rng), InputError);
}

// Bits in queues plus bits delivered equal bits injected, frame by frame.
TEST(QueueDynamics, BitConservationUnderScheduling) {
  RandomStream rng = make_stream(314);
  for (int instance = 0; instance < 10; ++instance) {
    const NetworkGraph g = synthetic_graph(7, 0.6, rng);
    std::vector<FlowSpec> specs;
    for (int f = 0; f < 3; ++f) specs.push_back({f, {1 + f}, {0}});
    const FlowTable flows(specs, g.node_count());
    QueueMatrix q = QueueMatrix::Zero(7, 3);
    RateMatrix lambda = RateMatrix::Zero(7, 3);
    for (int f = 0; f < 3; ++f) lambda(1 + f, f) = 3.0 + f;
    double injected = 0.0, delivered = 0.0;
    for (int t = 0; t < 300; ++t) {
      const ArrivalBatch a = sample_arrivals(lambda, ArrivalLaw::kPoisson, rng);
      const Schedule s = schedule_frame(q, g, kAllModels[instance % 3]);
      ASSERT_TRUE(check_schedule(s, q, g, kAllModels[instance % 3]).empty());
      const FrameOutcome out = apply_frame(q, s.served, a, flows);
      injected += a.bits.sum();
      for (double d : out.delivered) delivered += d;
      q = out.queues;
      ASSERT_GE(q.minCoeff(), 0.0);
      for (int f = 0; f < 3; ++f) ASSERT_EQ(q(0, f), 0.0);
      ASSERT_NEAR(q.sum() + delivered, injected, 1e-6 * std::max(1.0, injected));
    }
  }
}

MetricsLog log_with(std::vector<std::size_t> checkpoints, std::vector<std::vector<double>> arr,
                    std::vector<std::vector<double>> del, std::size_t frames) {
  MetricsLog log;
  log.num_flows = arr.front().size();
  log.queue_l1.assign(frames, 0.0);
  log.checkpoint_frames = std::move(checkpoints);
  log.cum_arrivals = std::move(arr);
  log.cum_delivered = std::move(del);
  return log;
}

TEST(ConservationAudit, ZeroTrafficHasZeroGap) {
  const MetricsLog log = log_with({0, 10, 20}, {{0.0}, {0.0}, {0.0}}, {{0.0}, {0.0}, {0.0}}, 20);
  const ConservationReport r = conservation_audit(log, 10, 20);
  ASSERT_EQ(r.flows.size(), 1u);
  EXPECT_EQ(r.flows[0].relative_gap, 0.0);
  EXPECT_EQ(r.max_gap(), 0.0);
}

TEST(ConservationAudit, OverloadReportsGap) {
  // Flow 0 balanced, flow 1 loses half of what it injects.
  const MetricsLog log = log_with({0, 10, 20}, {{0, 0}, {100, 100}, {200, 200}},
                                  {{0, 0}, {90, 40}, {190, 90}}, 20);
  const ConservationReport r = conservation_audit(log, 10, 20);
  EXPECT_EQ(r.begin_frame, 10u);
  EXPECT_EQ(r.end_frame, 20u);
  EXPECT_DOUBLE_EQ(r.flows[0].mean_source_rate, 10.0);
  EXPECT_DOUBLE_EQ(r.flows[0].relative_gap, 0.0);
  EXPECT_DOUBLE_EQ(r.flows[1].mean_delivered_rate, 5.0);
  EXPECT_DOUBLE_EQ(r.flows[1].relative_gap, 0.5);
  EXPECT_DOUBLE_EQ(r.max_gap(), 0.5);
}

TEST(ConservationAudit, WindowSnapsOutwardToCheckpoints) {
  const MetricsLog log = log_with({0, 10, 20, 25}, {{0}, {10}, {20}, {25}}, {{0}, {10}, {20}, {25}}, 25);
  const ConservationReport r = conservation_audit(log, 12, 24);
  EXPECT_EQ(r.begin_frame, 10u);
  EXPECT_EQ(r.end_frame, 25u);
  EXPECT_THROW(conservation_audit(log, 20, 10), InputError);
  EXPECT_THROW(conservation_audit(log, 0, 30), InputError);
}

TEST(QueueSnapshot, OneRowPerEntry) {
  QueueMatrix q(2, 2);
  q << 1, 2, 3, 4;
  std::ostringstream os;
  write_queue_snapshot(os, 7, q);
  EXPECT_EQ(os.str(), "7,0,0,1\n7,0,1,2\n7,1,0,3\n7,1,1,4\n");
}

}  // namespace
}  // namespace mbp
