#include "mbp/congestion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mbp/error.hpp"

namespace mbp {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void UtilityFunction::validate() const {
  if (kind != UtilityKind::kLinear && !(scale > 0.0 && std::isfinite(scale))) {
    throw InputError("log utility scale must be positive and finite");
  }
}

double UtilityFunction::value(double x) const {
  if (x < 0.0) throw InputError("utility of a negative rate");
  if (kind == UtilityKind::kLinear) return x;
  return x == 0.0 ? -kInf : scale * std::log(x);
}

double UtilityFunction::derivative(double x) const {
  if (kind == UtilityKind::kLinear) return 1.0;
  return x == 0.0 ? kInf : scale / x;
}

double UtilityFunction::inverse_derivative(double y) const {
  if (kind == UtilityKind::kLinear) {
    throw InputError("linear utility has no inverse derivative");
  }
  if (y < 0.0) throw InputError("inverse derivative of a negative marginal utility");
  return y == 0.0 ? kInf : scale / y;
}

std::string to_string(const UtilityFunction& u) {
  switch (u.kind) {
    case UtilityKind::kProportionalFair: return "proportional_fair";
    case UtilityKind::kLinear: return "linear";
    case UtilityKind::kLogScaled: {
      std::ostringstream os;
      os << "log_scaled:" << u.scale;
      return os.str();
    }
  }
  return "?";
}

UtilityFunction utility_from_string(std::string_view s) {
  if (s == "proportional_fair") return UtilityFunction::proportional_fair();
  if (s == "linear") return UtilityFunction::linear();
  constexpr std::string_view prefix = "log_scaled:";
  if (s.substr(0, prefix.size()) == prefix) {
    const std::string num(s.substr(prefix.size()));
    std::size_t used = 0;
    double c = 0.0;
    try {
      c = std::stod(num, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != num.size()) throw InputError("bad utility scale in '" + std::string(s) + "'");
    UtilityFunction u = UtilityFunction::log_scaled(c);
    u.validate();
    return u;
  }
  throw InputError("unknown utility '" + std::string(s) + "'");
}

double VRule::resolve(double r_max_bits) const {
  validate();
  return explicit_value ? value : rmax_multiplier * r_max_bits * r_max_bits;
}

void VRule::validate() const {
  if (explicit_value ? !(value > 0.0 && std::isfinite(value))
                     : !(rmax_multiplier > 0.0 && std::isfinite(rmax_multiplier))) {
    throw InputError("V must be positive");
  }
}

AnccState make_ancc_state(const NetworkGraph& g, const FlowTable& flows,
                          const UtilityFunction& u, const VRule& rule) {
  u.validate();
  if (!u.strictly_concave()) {
    throw InputError("congestion control needs a strictly concave utility");
  }
  const double r_max = g.max_full_power_rate();
  AnccState st;
  st.v = rule.resolve(r_max);
  if (!(st.v > 0.0)) throw InputError("V resolved to a nonpositive value (R_max = 0?)");
  st.lambda_max = static_cast<double>(g.max_degree()) * r_max;
  st.utility = u;
  st.lambda = RateMatrix::Zero(static_cast<Eigen::Index>(flows.num_nodes()),
                               static_cast<Eigen::Index>(flows.num_flows()));
  return st;
}

const RateMatrix& update_rates(const QueueMatrix& q, AnccState& st, const FlowTable& flows) {
  if (!(st.v > 0.0)) throw InputError("update_rates: V must be positive");
  if (q.rows() != st.lambda.rows() || q.cols() != st.lambda.cols()) {
    throw InputError("update_rates: queue shape does not match the state");
  }
  for (const FlowSpec& fs : flows.flows()) {
    for (NodeId n : fs.sources) {
      const double x = st.utility.inverse_derivative(q(n, fs.id) / st.v);
      st.lambda(n, fs.id) = std::max(std::min(x, st.lambda_max), 0.0);
    }
  }
  return st.lambda;
}

double utility_of_rates(const std::vector<double>& x, const UtilityFunction& u) {
  double total = 0.0;
  for (double xf : x) total += u.value(xf);
  return total;
}

}  // namespace mbp
