#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace mbp {

// a . b <= bound
struct LinearConstraint {
  std::vector<double> coefficients;
  double bound = 0.0;
};

// maximize c . b  subject to  a_i . b <= d_i,  b in {0,1}^n
struct BinaryProgram {
  std::size_t num_vars = 0;
  std::vector<double> objective;
  std::vector<LinearConstraint> constraints;
  std::vector<std::string> var_labels;

  void validate() const;
  // c . b summed in index order.
  double evaluate(const std::vector<std::uint8_t>& assignment) const;
  bool is_feasible(const std::vector<std::uint8_t>& assignment, double tol = 1e-9) const;
};

enum class ProofStatus { kOptimal, kInfeasible };

struct Solution {
  std::vector<std::uint8_t> assignment;
  double objective_value = 0.0;
  std::size_t nodes_explored = 0;
  ProofStatus status = ProofStatus::kInfeasible;
  // Linear-relaxation value at the root (branch-and-bound only).
  double root_bound = 0.0;
};

// Depth-first branch-and-bound over the [0,1] relaxation. Branches on the
// most fractional variable (lowest index on ties). Deterministic.
Solution solve_branch_and_bound(const BinaryProgram& p);

// Full 2^n enumeration; refuses more than kMaxExhaustiveVars variables.
Solution solve_exhaustive(const BinaryProgram& p);

inline constexpr std::size_t kMaxExhaustiveVars = 25;

namespace detail {

struct LpResult {
  bool feasible = false;
  double value = 0.0;
  std::vector<double> x;
};

// maximize c.x  s.t.  rows[i].x <= rhs[i],  0 <= x <= 1.
LpResult solve_box_lp(const std::vector<std::vector<double>>& rows,
                      const std::vector<double>& rhs, const std::vector<double>& c);

}  // namespace detail

// "maximize / subject-to" text dump, for replaying instances.
void write_program(std::ostream& os, const BinaryProgram& p);
BinaryProgram read_program(std::istream& is);

}  // namespace mbp
