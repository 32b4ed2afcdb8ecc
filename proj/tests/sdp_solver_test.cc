#include "rhsos/sdp_solver.h"

#include <random>
#include <sstream>

#include <gtest/gtest.h>

namespace rhsos {
namespace {

// minimize y subject to [[1, y], [y, 1]] PSD; optimum -1.
SdpProblem TwoByTwo() {
  SdpProblem p;
  p.num_vars = 1;
  p.cost = Eigen::VectorXd::Ones(1);
  SdpBlock b;
  b.size = 2;
  b.entries = {{0, 0, -1, 1.0}, {1, 1, -1, 1.0}, {0, 1, 0, 1.0}};
  p.blocks.push_back(b);
  return p;
}

// Random problem with strictly feasible points on both sides: the block is
// I at y0, and the cost is <F_i, X> for a positive definite X.
SdpProblem RandomProblem(int m, int s, std::uint64_t seed, bool with_equality) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  SdpProblem p;
  p.num_vars = m;
  Eigen::VectorXd y0(m);
  for (int i = 0; i < m; ++i) y0(i) = 0.3 * g(rng);
  std::vector<Eigen::MatrixXd> f(m);
  for (int i = 0; i < m; ++i) {
    Eigen::MatrixXd a = Eigen::MatrixXd::NullaryExpr(s, s, [&]() { return g(rng); });
    f[i] = 0.5 * (a + a.transpose());
  }
  Eigen::MatrixXd c = Eigen::MatrixXd::Identity(s, s);
  for (int i = 0; i < m; ++i) c -= y0(i) * f[i];
  SdpBlock b;
  b.size = s;
  for (int r = 0; r < s; ++r) {
    for (int q = r; q < s; ++q) {
      b.entries.push_back({r, q, -1, c(r, q)});
      for (int i = 0; i < m; ++i) b.entries.push_back({r, q, i, f[i](r, q)});
    }
  }
  p.blocks.push_back(b);
  // Dual-feasible cost: cost_i = <F_i, X> for a random PSD X.
  Eigen::MatrixXd x = Eigen::MatrixXd::NullaryExpr(s, s, [&]() { return g(rng); });
  x = x * x.transpose() + Eigen::MatrixXd::Identity(s, s);
  p.cost.resize(m);
  for (int i = 0; i < m; ++i) p.cost(i) = (f[i].array() * x.array()).sum();
  if (with_equality) {
    LinearEquality eq;
    eq.terms = {{0, 1.0}, {1, -1.0}};
    eq.rhs = y0(0) - y0(1);
    p.equalities.push_back(eq);
  }
  return p;
}

TEST(SdpSolverTest, TwoByTwoOptimum) {
  const SdpSolution sol = SolveSdp(TwoByTwo());
  ASSERT_EQ(sol.status, SdpStatus::kOptimal);
  EXPECT_NEAR(sol.moment_objective, -1.0, 1e-7);
  EXPECT_NEAR(sol.sos_objective, -1.0, 1e-7);
  EXPECT_NEAR(sol.y(0), -1.0, 1e-6);
  ASSERT_EQ(sol.gram.size(), 1u);
  EXPECT_NEAR(sol.gram[0].trace(), 1.0, 1e-6);
}

TEST(SdpSolverTest, WeakDualityOnRandomProblems) {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const SdpProblem p = RandomProblem(4, 5, seed, seed % 2 == 0);
    const SdpSolution sol = SolveSdp(p);
    ASSERT_EQ(sol.status, SdpStatus::kOptimal) << "seed " << seed << ": " << sol.message;
    EXPECT_LE(sol.sos_objective, sol.moment_objective + 1e-7 * (1 + std::abs(sol.moment_objective)));
    const FeasibilityReport f = CertifyFeasibility(p, sol.y);
    EXPECT_GE(f.min_eigenvalue, -1e-7);
    EXPECT_LE(f.max_equality_violation, 1e-7);
    EXPECT_NEAR(f.objective, sol.moment_objective, 1e-12 * (1 + std::abs(f.objective)));
    for (const Eigen::MatrixXd& x : sol.gram) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x);
      EXPECT_GE(es.eigenvalues().minCoeff(), -1e-7);
    }
  }
}

TEST(SdpSolverTest, DeterministicAcrossRuns) {
  const SdpProblem p = RandomProblem(5, 4, 42, true);
  const SdpSolution a = SolveSdp(p);
  const SdpSolution b = SolveSdp(p);
  EXPECT_EQ(a.iterations, b.iterations);
  EXPECT_EQ(a.y, b.y);
  EXPECT_EQ(a.sos_objective, b.sos_objective);
}

TEST(SdpSolverTest, EqualityModesAgree) {
  const SdpProblem p = RandomProblem(5, 4, 3, true);
  SdpOptions elim;
  elim.equality_mode = EqualityMode::kEliminate;
  SdpOptions kkt;
  kkt.equality_mode = EqualityMode::kKkt;
  const SdpSolution a = SolveSdp(p, elim);
  const SdpSolution b = SolveSdp(p, kkt);
  ASSERT_EQ(a.status, SdpStatus::kOptimal);
  ASSERT_EQ(b.status, SdpStatus::kOptimal);
  EXPECT_TRUE(b.used_kkt);
  EXPECT_FALSE(a.used_kkt);
  EXPECT_NEAR(a.moment_objective, b.moment_objective, 1e-6 * (1 + std::abs(a.moment_objective)));
}

TEST(SdpSolverTest, InfeasibleProblemIsNotReportedOptimal) {
  // y >= 0 and -1 - y >= 0.
  SdpProblem p;
  p.num_vars = 1;
  p.cost = Eigen::VectorXd::Ones(1);
  SdpBlock b;
  b.size = 2;
  b.entries = {{0, 0, 0, 1.0}, {1, 1, -1, -1.0}, {1, 1, 0, -1.0}};
  p.blocks.push_back(b);
  const SdpSolution sol = SolveSdp(p);
  EXPECT_NE(sol.status, SdpStatus::kOptimal);
  EXPECT_NE(sol.status, SdpStatus::kNearOptimal);
}

TEST(SdpSolverTest, StatusNames) {
  EXPECT_EQ(ToString(SdpStatus::kOptimal), "optimal");
  EXPECT_EQ(ToString(SdpStatus::kNearOptimal), "near-optimal");
  EXPECT_EQ(ToString(SdpStatus::kNumericalFailure), "numerical-failure");
}

TEST(SdpSolverTest, EvaluateBlockIsSymmetric) {
  const SdpProblem p = TwoByTwo();
  Eigen::VectorXd y(1);
  y << 0.25;
  const Eigen::MatrixXd s = EvaluateBlock(p.blocks[0], y);
  EXPECT_DOUBLE_EQ(s(0, 1), 0.25);
  EXPECT_DOUBLE_EQ(s(1, 0), 0.25);
  EXPECT_DOUBLE_EQ(s(1, 1), 1.0);
}

TEST(SdpSolverTest, DumpListsEveryEntry) {
  std::ostringstream os;
  WriteSdpDump(TwoByTwo(), os);
  const std::string text = os.str();
  EXPECT_NE(text.find("vars 1"), std::string::npos);
  EXPECT_NE(text.find("blocks 1"), std::string::npos);
}

}  // namespace
}  // namespace rhsos
