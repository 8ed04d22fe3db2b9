#include "mbp/bip.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mbp/error.hpp"

namespace mbp {

namespace {

constexpr double kIntegralTol = 1e-9;
constexpr double kFeasTol = 1e-9;

double feas_slack(double bound) { return kFeasTol * std::max(1.0, std::abs(bound)); }

// Dense tableau simplex for the box-constrained LP.
class BoxSimplex {
 public:
  BoxSimplex(const std::vector<std::vector<double>>& rows, const std::vector<double>& rhs,
             std::size_t n)
      : m_(rows.size()), n_(n) {
    for (double d : rhs) {
      if (d < 0.0) ++art_;
      max_abs_rhs_ = std::max(max_abs_rhs_, std::abs(d));
    }
    rows_count_ = m_ + n_;
    cols_ = n_ + m_ + n_ + art_;
    tab_.assign(rows_count_ * cols_, 0.0);
    b_.assign(rows_count_, 0.0);
    basis_.assign(rows_count_, 0);

    std::size_t next_art = 0;
    for (std::size_t i = 0; i < m_; ++i) {
      const double sign = rhs[i] < 0.0 ? -1.0 : 1.0;
      for (std::size_t j = 0; j < n_; ++j) at(i, j) = sign * rows[i][j];
      at(i, n_ + i) = sign;
      b_[i] = sign * rhs[i];
      if (rhs[i] < 0.0) {
        const std::size_t a = art_col(next_art++);
        at(i, a) = 1.0;
        basis_[i] = a;
      } else {
        basis_[i] = n_ + i;
      }
    }
    for (std::size_t j = 0; j < n_; ++j) {
      const std::size_t r = m_ + j;
      at(r, j) = 1.0;
      at(r, n_ + m_ + j) = 1.0;
      b_[r] = 1.0;
      basis_[r] = n_ + m_ + j;
    }
  }

  detail::LpResult solve(const std::vector<double>& c) {
    detail::LpResult res;
    if (art_ > 0) {
      std::vector<double> phase1(cols_, 0.0);
      for (std::size_t k = 0; k < art_; ++k) phase1[art_col(k)] = -1.0;
      const double v = optimize(phase1, /*allow_artificial=*/true);
      if (v < -1e-7 * std::max(1.0, max_abs_rhs_)) return res;
      drive_out_artificials();
    }
    std::vector<double> phase2(cols_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) phase2[j] = c[j];
    res.value = optimize(phase2, /*allow_artificial=*/false);
    res.feasible = true;
    res.x.assign(n_, 0.0);
    for (std::size_t r = 0; r < rows_count_; ++r) {
      if (basis_[r] < n_) res.x[basis_[r]] = std::clamp(b_[r], 0.0, 1.0);
    }
    return res;
  }

 private:
  double& at(std::size_t r, std::size_t c) { return tab_[r * cols_ + c]; }
  std::size_t art_col(std::size_t k) const { return n_ + m_ + n_ + k; }
  bool is_artificial(std::size_t c) const { return c >= n_ + m_ + n_; }

  void pivot(std::size_t pr, std::size_t pc) {
    const double inv = 1.0 / at(pr, pc);
    double* prow = &tab_[pr * cols_];
    for (std::size_t c = 0; c < cols_; ++c) prow[c] *= inv;
    b_[pr] *= inv;
    prow[pc] = 1.0;
    for (std::size_t r = 0; r < rows_count_; ++r) {
      if (r == pr) continue;
      double* row = &tab_[r * cols_];
      const double f = row[pc];
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < cols_; ++c) row[c] -= f * prow[c];
      row[pc] = 0.0;
      b_[r] -= f * b_[pr];
      if (b_[r] < 0.0 && b_[r] > -1e-12) b_[r] = 0.0;
    }
    basis_[pr] = pc;
  }

  // Maximizes cost . x over the current basis; returns the optimum.
  double optimize(const std::vector<double>& cost, bool allow_artificial) {
    double cmax = 1.0;
    for (double v : cost) cmax = std::max(cmax, std::abs(v));
    const double dj_tol = 1e-11 * cmax;
    std::vector<double> reduced(cols_);
    bool bland = false;
    int degenerate_streak = 0;
    const std::size_t max_iters = 50 * (rows_count_ + cols_) + 1000;
    for (std::size_t iter = 0; iter < max_iters; ++iter) {
      for (std::size_t c = 0; c < cols_; ++c) reduced[c] = cost[c];
      for (std::size_t r = 0; r < rows_count_; ++r) {
        const double cb = cost[basis_[r]];
        if (cb == 0.0) continue;
        const double* row = &tab_[r * cols_];
        for (std::size_t c = 0; c < cols_; ++c) reduced[c] -= cb * row[c];
      }
      std::size_t enter = cols_;
      double best = dj_tol;
      for (std::size_t c = 0; c < cols_; ++c) {
        if (!allow_artificial && is_artificial(c)) continue;
        if (reduced[c] > best) {
          enter = c;
          if (bland) break;
          best = reduced[c];
        }
      }
      if (enter == cols_) {
        double value = 0.0;
        for (std::size_t r = 0; r < rows_count_; ++r) value += cost[basis_[r]] * b_[r];
        return value;
      }
      std::size_t leave = rows_count_;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < rows_count_; ++r) {
        const double a = at(r, enter);
        if (a <= 1e-9) continue;
        const double ratio = b_[r] / a;
        if (ratio < best_ratio - 1e-12 ||
            (ratio <= best_ratio + 1e-12 && leave < rows_count_ && basis_[r] < basis_[leave])) {
          best_ratio = std::min(best_ratio, ratio);
          leave = r;
        }
      }
      if (leave == rows_count_) {
        throw ContractViolation("box LP reported unbounded; bounds rows are missing");
      }
      if (best_ratio <= 1e-12) {
        if (++degenerate_streak > 20) bland = true;
      } else {
        degenerate_streak = 0;
      }
      pivot(leave, enter);
    }
    throw ContractViolation("simplex iteration limit reached");
  }

  void drive_out_artificials() {
    for (std::size_t r = 0; r < rows_count_; ++r) {
      if (!is_artificial(basis_[r])) continue;
      for (std::size_t c = 0; c < n_ + m_ + n_; ++c) {
        if (std::abs(at(r, c)) > 1e-9) {
          pivot(r, c);
          break;
        }
      }
    }
  }

  std::size_t m_;
  std::size_t n_;
  std::size_t art_ = 0;
  std::size_t rows_count_ = 0;
  std::size_t cols_ = 0;
  double max_abs_rhs_ = 1.0;
  std::vector<double> tab_;
  std::vector<double> b_;
  std::vector<std::size_t> basis_;
};

struct Node {
  std::vector<std::int8_t> fixed;  // -1 free, 0, 1
};

}  // namespace

namespace detail {

LpResult solve_box_lp(const std::vector<std::vector<double>>& rows,
                      const std::vector<double>& rhs, const std::vector<double>& c) {
  if (rows.size() != rhs.size()) throw InputError("solve_box_lp: row/rhs mismatch");
  for (const auto& r : rows) {
    if (r.size() != c.size()) throw InputError("solve_box_lp: row width mismatch");
  }
  BoxSimplex simplex(rows, rhs, c.size());
  return simplex.solve(c);
}

}  // namespace detail

void BinaryProgram::validate() const {
  if (objective.size() != num_vars) throw InputError("objective length != num_vars");
  if (!var_labels.empty() && var_labels.size() != num_vars) {
    throw InputError("var_labels length != num_vars");
  }
  for (double v : objective) {
    if (!std::isfinite(v)) throw InputError("objective coefficient not finite");
  }
  for (const auto& con : constraints) {
    if (con.coefficients.size() != num_vars) throw InputError("constraint length != num_vars");
    if (!std::isfinite(con.bound)) throw InputError("constraint bound not finite");
    for (double v : con.coefficients) {
      if (!std::isfinite(v)) throw InputError("constraint coefficient not finite");
    }
  }
}

double BinaryProgram::evaluate(const std::vector<std::uint8_t>& assignment) const {
  double v = 0.0;
  for (std::size_t j = 0; j < num_vars; ++j) {
    if (assignment[j]) v += objective[j];
  }
  return v;
}

bool BinaryProgram::is_feasible(const std::vector<std::uint8_t>& assignment, double tol) const {
  if (assignment.size() != num_vars) return false;
  for (const auto& con : constraints) {
    double lhs = 0.0;
    for (std::size_t j = 0; j < num_vars; ++j) {
      if (assignment[j]) lhs += con.coefficients[j];
    }
    if (lhs > con.bound + tol * std::max(1.0, std::abs(con.bound))) return false;
  }
  return true;
}

Solution solve_branch_and_bound(const BinaryProgram& p) {
  p.validate();
  const std::size_t n = p.num_vars;
  Solution best;
  best.status = ProofStatus::kInfeasible;
  bool have_incumbent = false;
  bool root = true;

  // Presolve: a variable that cannot raise the objective and only
  // consumes capacity is fixed to 0.
  Node start;
  start.fixed.assign(n, -1);
  for (std::size_t j = 0; j < n; ++j) {
    if (p.objective[j] > 0.0) continue;
    bool nonneg = true;
    for (const auto& con : p.constraints) {
      if (con.coefficients[j] < 0.0) {
        nonneg = false;
        break;
      }
    }
    if (nonneg) start.fixed[j] = 0;
  }

  std::vector<Node> stack;
  stack.push_back(std::move(start));
  std::vector<std::size_t> free_idx;
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  std::vector<double> c;

  while (!stack.empty()) {
    Node node = std::move(stack.back());
    stack.pop_back();
    ++best.nodes_explored;

    free_idx.clear();
    double fixed_value = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (node.fixed[j] < 0) free_idx.push_back(j);
      else if (node.fixed[j] == 1) fixed_value += p.objective[j];
    }

    rows.clear();
    rhs.clear();
    bool node_infeasible = false;
    for (const auto& con : p.constraints) {
      double residual = con.bound;
      bool touches_free = false;
      for (std::size_t j = 0; j < n; ++j) {
        if (node.fixed[j] == 1) residual -= con.coefficients[j];
        else if (node.fixed[j] < 0 && con.coefficients[j] != 0.0) touches_free = true;
      }
      if (!touches_free) {
        if (residual < -feas_slack(con.bound)) {
          node_infeasible = true;
          break;
        }
        continue;
      }
      std::vector<double> row(free_idx.size());
      for (std::size_t k = 0; k < free_idx.size(); ++k) row[k] = con.coefficients[free_idx[k]];
      rows.push_back(std::move(row));
      rhs.push_back(residual);
    }
    if (node_infeasible) {
      root = false;
      continue;
    }

    c.resize(free_idx.size());
    for (std::size_t k = 0; k < free_idx.size(); ++k) c[k] = p.objective[free_idx[k]];
    const detail::LpResult lp = detail::solve_box_lp(rows, rhs, c);
    if (!lp.feasible) {
      root = false;
      continue;
    }
    const double bound = fixed_value + lp.value;
    if (root) {
      best.root_bound = bound;
      root = false;
    }
    if (have_incumbent &&
        bound <= best.objective_value + 1e-9 * std::max(1.0, std::abs(best.objective_value))) {
      continue;
    }

    // Most fractional free variable; lowest index wins ties.
    std::size_t branch_k = free_idx.size();
    double most = kIntegralTol;
    for (std::size_t k = 0; k < free_idx.size(); ++k) {
      const double frac = std::min(lp.x[k], 1.0 - lp.x[k]);
      if (frac > most) {
        most = frac;
        branch_k = k;
      }
    }

    if (branch_k == free_idx.size()) {
      std::vector<std::uint8_t> cand(n, 0);
      for (std::size_t j = 0; j < n; ++j) cand[j] = node.fixed[j] == 1 ? 1 : 0;
      for (std::size_t k = 0; k < free_idx.size(); ++k) {
        cand[free_idx[k]] = lp.x[k] > 0.5 ? 1 : 0;
      }
      if (p.is_feasible(cand)) {
        const double value = p.evaluate(cand);
        if (!have_incumbent || value > best.objective_value) {
          best.assignment = std::move(cand);
          best.objective_value = value;
          best.status = ProofStatus::kOptimal;
          have_incumbent = true;
        }
        continue;
      }
      // Rounding broke a constraint numerically; branch on the first free var.
      if (free_idx.empty()) continue;
      branch_k = 0;
    }

    const std::size_t j = free_idx[branch_k];
    const std::int8_t preferred = lp.x[branch_k] >= 0.5 ? 1 : 0;
    Node other = node;
    other.fixed[j] = static_cast<std::int8_t>(1 - preferred);
    node.fixed[j] = preferred;
    stack.push_back(std::move(other));
    stack.push_back(std::move(node));
  }

  if (best.status == ProofStatus::kOptimal) {
    if (!p.is_feasible(best.assignment)) {
      throw ContractViolation("branch-and-bound returned an infeasible assignment");
    }
    const double tol = 1e-7 * std::max(1.0, std::abs(best.objective_value));
    if (best.root_bound < best.objective_value - tol) {
      throw ContractViolation("root relaxation bound below the integer optimum");
    }
  } else {
    best.assignment.assign(n, 0);
    best.objective_value = 0.0;
  }
  return best;
}

Solution solve_exhaustive(const BinaryProgram& p) {
  p.validate();
  const std::size_t n = p.num_vars;
  if (n > kMaxExhaustiveVars) {
    throw InputError("solve_exhaustive: " + std::to_string(n) + " variables exceeds the limit of " +
                     std::to_string(kMaxExhaustiveVars));
  }
  const std::size_t m = p.constraints.size();
  std::vector<double> lhs(m, 0.0);
  std::vector<std::uint8_t> x(n, 0);

  Solution best;
  best.status = ProofStatus::kInfeasible;
  auto consider = [&]() {
    ++best.nodes_explored;
    for (std::size_t i = 0; i < m; ++i) {
      if (lhs[i] > p.constraints[i].bound + 1e-7 * std::max(1.0, std::abs(p.constraints[i].bound))) {
        return;
      }
    }
    const double value = p.evaluate(x);
    if (best.status == ProofStatus::kOptimal && value <= best.objective_value) return;
    if (!p.is_feasible(x)) return;
    {
      best.status = ProofStatus::kOptimal;
      best.objective_value = value;
      best.assignment = x;
    }
  };

  consider();
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t k = 1; k < total; ++k) {
    // Gray code: flip the lowest set bit of k.
    const auto j = static_cast<std::size_t>(__builtin_ctzll(k));
    const double sign = x[j] ? -1.0 : 1.0;
    x[j] ^= 1;
    for (std::size_t i = 0; i < m; ++i) lhs[i] += sign * p.constraints[i].coefficients[j];
    consider();
  }
  if (best.status != ProofStatus::kOptimal) {
    best.assignment.assign(n, 0);
    best.objective_value = 0.0;
  }
  return best;
}

}  // namespace mbp
