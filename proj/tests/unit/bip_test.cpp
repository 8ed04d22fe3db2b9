#include <gtest/gtest.h>

#include <sstream>

#include "mbp/bip.hpp"
#include "mbp/error.hpp"
#include "mbp/harness.hpp"
#include "oracles.hpp"

namespace mbp {
namespace {

BinaryProgram program(std::vector<double> c, std::vector<LinearConstraint> rows = {}) {
  BinaryProgram p;
  p.num_vars = c.size();
  p.objective = std::move(c);
  p.constraints = std::move(rows);
  return p;
}

TEST(BranchAndBound, UnconstrainedTakesEverythingPositive) {
  const BinaryProgram p = program({5.0, 3.0});
  for (const Solution& s : {solve_branch_and_bound(p), solve_exhaustive(p)}) {
    EXPECT_EQ(s.status, ProofStatus::kOptimal);
    EXPECT_EQ(s.assignment, (std::vector<std::uint8_t>{1, 1}));
    EXPECT_EQ(s.objective_value, 8.0);
  }
}

TEST(BranchAndBound, KnapsackOfSizeOne) {
  const BinaryProgram p = program({5.0, 4.0}, {{{1.0, 1.0}, 1.0}});
  for (const Solution& s : {solve_branch_and_bound(p), solve_exhaustive(p)}) {
    EXPECT_EQ(s.assignment, (std::vector<std::uint8_t>{1, 0}));
    EXPECT_EQ(s.objective_value, 5.0);
  }
}

TEST(Exhaustive, EmptyProgramHasValueZero) {
  const Solution s = solve_exhaustive(program({}));
  EXPECT_EQ(s.status, ProofStatus::kOptimal);
  EXPECT_EQ(s.objective_value, 0.0);
  EXPECT_TRUE(s.assignment.empty());
  EXPECT_EQ(solve_branch_and_bound(program({})).objective_value, 0.0);
}

TEST(Exhaustive, RefusesTooManyVariables) {
  EXPECT_THROW(solve_exhaustive(program(std::vector<double>(kMaxExhaustiveVars + 1, 1.0))),
               InputError);
}

TEST(BranchAndBound, InfeasibleSystem) {
  // b0 + b1 <= -1 cannot hold for binaries.
  const BinaryProgram p = program({1.0, 1.0}, {{{1.0, 1.0}, -1.0}});
  EXPECT_EQ(solve_branch_and_bound(p).status, ProofStatus::kInfeasible);
  EXPECT_EQ(solve_exhaustive(p).status, ProofStatus::kInfeasible);
}

TEST(BranchAndBound, NegativeCoefficientsNeedNoPresolveShortcut) {
  // Taking b1 (cost) unlocks b0 through a negative coefficient.
  const BinaryProgram p = program({10.0, -3.0}, {{{1.0, -1.0}, 0.0}});
  const Solution s = solve_branch_and_bound(p);
  EXPECT_EQ(s.assignment, (std::vector<std::uint8_t>{1, 1}));
  EXPECT_EQ(s.objective_value, 7.0);
}

TEST(BranchAndBound, MalformedProgramsRejected) {
  BinaryProgram p = program({1.0, 2.0});
  p.num_vars = 3;
  EXPECT_THROW(solve_branch_and_bound(p), InputError);
  p = program({1.0}, {{{1.0, 1.0}, 1.0}});
  EXPECT_THROW(solve_branch_and_bound(p), InputError);
  p = program({std::nan("")});
  EXPECT_THROW(solve_exhaustive(p), InputError);
}

TEST(BranchAndBound, MatchesExhaustiveAndBruteForceOnRandomPrograms) {
  RandomStream rng = make_stream(2718);
  std::uniform_int_distribution<int> vars(1, 14), rows(0, 8);
  int feasible = 0;
  for (int k = 0; k < 150; ++k) {
    const BinaryProgram p = synthetic_program(vars(rng), rows(rng), rng);
    const Solution bb = solve_branch_and_bound(p);
    const Solution ex = solve_exhaustive(p);
    const testing::BruteForceProgram bf = testing::brute_force_program(p);
    ASSERT_EQ(bb.status, ex.status) << "instance " << k;
    ASSERT_EQ(bb.status == ProofStatus::kOptimal, bf.feasible) << "instance " << k;
    if (!bf.feasible) continue;
    ++feasible;
    EXPECT_EQ(bb.objective_value, ex.objective_value) << "instance " << k;
    EXPECT_NEAR(bb.objective_value, bf.value, 1e-9) << "instance " << k;
    EXPECT_TRUE(p.is_feasible(bb.assignment));
    EXPECT_EQ(p.evaluate(bb.assignment), bb.objective_value);
    EXPECT_GE(bb.root_bound, bb.objective_value - 1e-7);
  }
  EXPECT_GT(feasible, 100);
}

TEST(BranchAndBound, DeterministicExploration) {
  RandomStream rng = make_stream(5);
  const BinaryProgram p = synthetic_program(14, 6, rng);
  const Solution a = solve_branch_and_bound(p);
  const Solution b = solve_branch_and_bound(p);
  EXPECT_EQ(a.assignment, b.assignment);
  EXPECT_EQ(a.nodes_explored, b.nodes_explored);
}

TEST(BoxLp, SimpleRelaxation) {
  // max x0 + x1, x0 + x1 <= 1.5 in the unit box.
  const auto r = detail::solve_box_lp({{1.0, 1.0}}, {1.5}, {1.0, 1.0});
  ASSERT_TRUE(r.feasible);
  EXPECT_NEAR(r.value, 1.5, 1e-12);
  const auto bad = detail::solve_box_lp({{1.0}}, {-0.5}, {1.0});
  EXPECT_FALSE(bad.feasible);
}

TEST(ProgramIo, RoundTrip) {
  BinaryProgram p = program({1.5, -2.25, 3.0}, {{{1, 1, 0}, 1}, {{0, -1, 2}, 0.5}});
  p.var_labels = {"b_0_1", "b_1_0", "b_1_2"};
  std::stringstream ss;
  write_program(ss, p);
  const BinaryProgram q = read_program(ss);
  EXPECT_EQ(q.num_vars, p.num_vars);
  EXPECT_EQ(q.objective, p.objective);
  EXPECT_EQ(q.var_labels, p.var_labels);
  ASSERT_EQ(q.constraints.size(), 2u);
  EXPECT_EQ(q.constraints[1].coefficients, p.constraints[1].coefficients);
  EXPECT_EQ(q.constraints[1].bound, 0.5);
  EXPECT_EQ(solve_branch_and_bound(q).objective_value, solve_exhaustive(p).objective_value);
}

TEST(ProgramIo, RejectsMalformed) {
  std::istringstream no_vars("maximize 1 2\n");
  EXPECT_THROW(read_program(no_vars), InputError);
  std::istringstream short_row("vars 2\nmaximize 1 2\nsubject-to 1 <= 3\n");
  EXPECT_THROW(read_program(short_row), InputError);
  std::istringstream bad_op("vars 1\nmaximize 1\nsubject-to 1 >= 3\n");
  EXPECT_THROW(read_program(bad_op), InputError);
}

}  // namespace
}  // namespace mbp
