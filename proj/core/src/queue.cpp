#include "mbp/queue.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "mbp/error.hpp"

namespace mbp {

namespace {

// Service can overshoot the queue by rounding in the xi split.
constexpr double kNegativeSlack = 1e-9;

}  // namespace

FlowTable::FlowTable(std::vector<FlowSpec> flows, std::size_t node_count)
    : flows_(std::move(flows)), node_count_(node_count) {
  const auto nf = static_cast<Eigen::Index>(flows_.size());
  const auto nn = static_cast<Eigen::Index>(node_count);
  source_.setZero(nn, nf);
  destination_.setZero(nn, nf);
  for (Eigen::Index f = 0; f < nf; ++f) {
    const FlowSpec& spec = flows_[f];
    if (spec.id != f) throw InputError("flow ids must be dense and ordered");
    if (spec.sources.empty() || spec.destinations.empty()) {
      throw InputError("flow " + std::to_string(f) + " needs at least one source and destination");
    }
    for (NodeId s : spec.sources) {
      if (s < 0 || s >= nn) throw InputError("flow source out of range");
      source_(s, f) = 1;
    }
    for (NodeId d : spec.destinations) {
      if (d < 0 || d >= nn) throw InputError("flow destination out of range");
      if (source_(d, f)) {
        throw InputError("flow " + std::to_string(f) + ": node is both source and destination");
      }
      destination_(d, f) = 1;
    }
  }
}

FrameOutcome apply_frame(const QueueMatrix& q, const ServedRates& served,
                         const ArrivalBatch& arrivals, const FlowTable& flows) {
  const Eigen::Index nn = q.rows();
  const Eigen::Index nf = q.cols();
  if (static_cast<std::size_t>(nn) != flows.num_nodes() ||
      static_cast<std::size_t>(nf) != flows.num_flows() || arrivals.bits.rows() != nn ||
      arrivals.bits.cols() != nf) {
    throw InputError("apply_frame: dimension mismatch");
  }

  FrameOutcome out;
  out.delivered.assign(nf, 0.0);
  QueueMatrix outgoing = QueueMatrix::Zero(nn, nf);
  QueueMatrix incoming = QueueMatrix::Zero(nn, nf);
  for (const ServedEntry& e : served) {
    if (e.bits < 0.0) throw ContractViolation("negative served bits");
    outgoing(e.tx, e.flow) += e.bits;
    incoming(e.rx, e.flow) += e.bits;
  }

  out.queues.resize(nn, nf);
  for (Eigen::Index f = 0; f < nf; ++f) {
    for (Eigen::Index n = 0; n < nn; ++n) {
      if (flows.is_destination(static_cast<NodeId>(n), static_cast<int>(f))) {
        out.delivered[f] += incoming(n, f);
        out.queues(n, f) = 0.0;
        continue;
      }
      const double before = q(n, f);
      double after = before - outgoing(n, f);
      if (after < 0.0) {
        if (after < -kNegativeSlack * std::max(1.0, before)) {
          std::ostringstream msg;
          msg << "queue (node " << n << ", flow " << f << ") would go negative: q=" << before
              << " outgoing=" << outgoing(n, f);
          throw ContractViolation(msg.str());
        }
        after = 0.0;
      }
      out.queues(n, f) = after + incoming(n, f) + arrivals.bits(n, f);
    }
  }
  return out;
}

ArrivalBatch sample_arrivals(const RateMatrix& lambda, ArrivalLaw law, RandomStream& rng) {
  ArrivalBatch batch;
  batch.lambda = lambda;
  if (law == ArrivalLaw::kDeterministic) {
    batch.bits = lambda;
    return batch;
  }
  batch.bits.setZero(lambda.rows(), lambda.cols());
  for (Eigen::Index f = 0; f < lambda.cols(); ++f) {
    for (Eigen::Index n = 0; n < lambda.rows(); ++n) {
      const double mean = lambda(n, f);
      if (mean < 0.0) throw InputError("arrival rate must be nonnegative");
      if (mean > 0.0) {
        batch.bits(n, f) =
            static_cast<double>(std::poisson_distribution<long long>(mean)(rng));
      }
    }
  }
  return batch;
}

double ConservationReport::max_gap() const {
  double g = 0.0;
  for (const auto& f : flows) g = std::max(g, f.relative_gap);
  return g;
}

ConservationReport conservation_audit(const MetricsLog& log, std::size_t begin_frame,
                                      std::size_t end_frame) {
  const auto& cp = log.checkpoint_frames;
  if (cp.empty() || end_frame <= begin_frame || end_frame > log.frames()) {
    throw InputError("conservation_audit: window outside the log");
  }
  // Last checkpoint <= begin, first checkpoint >= end.
  auto lo = std::upper_bound(cp.begin(), cp.end(), begin_frame);
  const std::size_t i0 = static_cast<std::size_t>(std::distance(cp.begin(), lo)) - 1;
  auto hi = std::lower_bound(cp.begin(), cp.end(), end_frame);
  if (hi == cp.end()) --hi;
  const std::size_t i1 = static_cast<std::size_t>(std::distance(cp.begin(), hi));

  ConservationReport report;
  report.begin_frame = cp[i0];
  report.end_frame = cp[i1];
  const double span = static_cast<double>(report.end_frame - report.begin_frame);
  for (std::size_t f = 0; f < log.num_flows; ++f) {
    FlowConservation fc;
    fc.flow = static_cast<int>(f);
    if (span > 0.0) {
      fc.mean_source_rate = (log.cum_arrivals[i1][f] - log.cum_arrivals[i0][f]) / span;
      fc.mean_delivered_rate = (log.cum_delivered[i1][f] - log.cum_delivered[i0][f]) / span;
    }
    fc.relative_gap = fc.mean_source_rate > 0.0
                          ? std::abs(fc.mean_source_rate - fc.mean_delivered_rate) /
                                fc.mean_source_rate
                          : 0.0;
    report.flows.push_back(fc);
  }
  return report;
}

void write_queue_snapshot(std::ostream& os, std::size_t frame, const QueueMatrix& q) {
  for (Eigen::Index n = 0; n < q.rows(); ++n) {
    for (Eigen::Index f = 0; f < q.cols(); ++f) {
      os << frame << ',' << n << ',' << f << ',' << q(n, f) << '\n';
    }
  }
}

double MetricsLog::total_arrivals() const {
  double s = 0.0;
  for (double v : arrivals) s += v;
  return s;
}

double MetricsLog::total_delivered() const {
  double s = 0.0;
  for (double v : delivered) s += v;
  return s;
}

double MetricsLog::sum_rate_bps() const {
  if (frames() == 0) return 0.0;
  return total_delivered() / (static_cast<double>(frames()) * frame_s);
}

std::vector<double> MetricsLog::flow_delivered_bps() const {
  std::vector<double> out(num_flows, 0.0);
  if (cum_delivered.empty() || frames() == 0) return out;
  const double t = static_cast<double>(frames()) * frame_s;
  for (std::size_t f = 0; f < num_flows; ++f) out[f] = cum_delivered.back()[f] / t;
  return out;
}

std::vector<double> MetricsLog::flow_arrival_bps() const {
  std::vector<double> out(num_flows, 0.0);
  if (cum_arrivals.empty() || frames() == 0) return out;
  const double t = static_cast<double>(frames()) * frame_s;
  for (std::size_t f = 0; f < num_flows; ++f) out[f] = cum_arrivals.back()[f] / t;
  return out;
}

}  // namespace mbp
