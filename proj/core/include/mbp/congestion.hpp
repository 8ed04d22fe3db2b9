#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mbp/queue.hpp"
#include "mbp/topology.hpp"

namespace mbp {

enum class UtilityKind { kProportionalFair, kLogScaled, kLinear };

// U(x) = c * ln(x) for the log kinds (c = 1/2 for proportional fair),
// U(x) = x for kLinear.
struct UtilityFunction {
  UtilityKind kind = UtilityKind::kProportionalFair;
  double scale = 0.5;

  static UtilityFunction proportional_fair() { return {UtilityKind::kProportionalFair, 0.5}; }
  static UtilityFunction log_scaled(double c) { return {UtilityKind::kLogScaled, c}; }
  static UtilityFunction linear() { return {UtilityKind::kLinear, 1.0}; }

  double value(double x) const;
  double derivative(double x) const;
  // (U')^{-1}(y); +inf at y = 0 for the log kinds. Throws InputError for
  // kLinear, whose derivative is constant.
  double inverse_derivative(double y) const;
  bool strictly_concave() const { return kind != UtilityKind::kLinear; }
  void validate() const;
};

std::string to_string(const UtilityFunction& u);
// "proportional_fair", "linear" or "log_scaled:<c>".
UtilityFunction utility_from_string(std::string_view s);

// V either fixed or a multiple of R_max^2 of the drop at hand.
struct VRule {
  bool explicit_value = false;
  double value = 0.0;
  double rmax_multiplier = 10.0;

  double resolve(double r_max_bits) const;
  void validate() const;
};

struct AnccState {
  double v = 1.0;
  double lambda_max = 0.0;  // A_max * R_max, bits/frame
  UtilityFunction utility;
  RateMatrix lambda;        // nodes x flows, zero off the sources
};

// lambda starts at zero; the first update sets it from the queues.
AnccState make_ancc_state(const NetworkGraph& g, const FlowTable& flows,
                          const UtilityFunction& u, const VRule& rule);

// lambda_n^f = max(min((U')^{-1}(q_n^f / V), lambda_max), 0) on the sources
// of f, 0 elsewhere. Writes st.lambda and returns it.
const RateMatrix& update_rates(const QueueMatrix& q, AnccState& st, const FlowTable& flows);

// sum_f U(x_f). A zero rate under a log utility gives -inf.
double utility_of_rates(const std::vector<double>& x, const UtilityFunction& u);

}  // namespace mbp
