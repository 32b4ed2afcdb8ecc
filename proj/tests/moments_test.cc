#include "rhsos/moments.h"

#include <random>

#include <gtest/gtest.h>

#include "oracles.h"

namespace rhsos {
namespace {

AtomicMeasure RandomMeasure(int n, int atoms, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> w(0.1, 1.0);
  AtomicMeasure mu;
  mu.n = n;
  for (int k = 0; k < atoms; ++k) {
    std::vector<Complex> z(n);
    for (auto& v : z) v = Complex(g(rng), g(rng)) * 0.6;
    mu.atoms.push_back(z);
    mu.weights.push_back(w(rng));
  }
  return mu;
}

CPoly RandomSelfConjugate(int n, int deg, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const MonomialBasis b(n, deg);
  CPoly p(n);
  for (int i = 0; i < b.size(); ++i) {
    for (int j = 0; j < b.size(); ++j) {
      if (u(rng) > 0.3) p.AddTerm({b[i], b[j]}, Complex(u(rng), u(rng)));
    }
  }
  return p.HermitianPart();
}

TEST(CanonicalKeyTest, PicksSmallerOfPairAndFlags) {
  const MomentKey a = CanonicalKey(Exponent{1, 0}, Exponent{0, 1});
  const MomentKey b = CanonicalKey(Exponent{0, 1}, Exponent{1, 0});
  EXPECT_EQ(a.pair, b.pair);
  EXPECT_NE(a.flipped, b.flipped);
  EXPECT_FALSE(CanonicalKey(Exponent{1, 1}, Exponent{1, 1}).flipped);
}

TEST(MomentsOfMeasureTest, MatchesDirectSums) {
  std::mt19937_64 rng(21);
  const AtomicMeasure mu = RandomMeasure(2, 3, rng);
  const MomentSequence y = MomentsOfMeasure(mu, 3);
  const MonomialBasis b(2, 3);
  for (int i = 0; i < b.size(); ++i) {
    for (int j = 0; j < b.size(); ++j) {
      const Complex expected = oracle::MeasureMoment(mu.atoms, mu.weights, b[i], b[j]);
      EXPECT_LT(std::abs(y.at(b[i], b[j]) - expected), 1e-12);
    }
  }
}

TEST(MomentSequenceTest, HermitianSymmetryAndApply) {
  MomentSequence y(1, 2);
  y.set({1}, {0}, Complex(0.5, 0.25));
  EXPECT_EQ(y.at({0}, {1}), Complex(0.5, -0.25));
  y.set({0}, {0}, 1.0);
  const CPoly p = CPoly::Var(1, 0) * Complex(2.0) + CPoly::Constant(1, 3.0);
  EXPECT_LT(std::abs(y.Apply(p) - Complex(4.0, 0.5)), 1e-15);
  EXPECT_THROW(y.Apply(CPoly::Var(1, 0).Pow(3)), std::out_of_range);
  EXPECT_EQ(y.at({2}, {1}), Complex(0.0));
}

TEST(MomentMatrixTest, MeasureMomentMatrixIsGramOfMonomialVectors) {
  std::mt19937_64 rng(4);
  const AtomicMeasure mu = RandomMeasure(2, 4, rng);
  const MomentSequence y = MomentsOfMeasure(mu, 2);
  const Eigen::MatrixXcd m = MomentMatrix(y, 2);
  const MonomialBasis b(2, 2);
  Eigen::MatrixXcd expected = Eigen::MatrixXcd::Zero(b.size(), b.size());
  for (int k = 0; k < mu.size(); ++k) {
    Eigen::VectorXcd v(b.size());
    for (int i = 0; i < b.size(); ++i) {
      v(i) = oracle::MonomialValue(mu.atoms[k], b[i], Exponent(2, 0));
    }
    expected += mu.weights[k] * v * v.adjoint();
  }
  EXPECT_LT((m - expected).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((m - m.adjoint()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(LocalizingMatrixTest, PsdWhenAtomsSatisfyConstraint) {
  std::mt19937_64 rng(8);
  const CPoly g = CPoly::Constant(2, 1.0) - CPoly::AbsSquared(2, 0) - CPoly::AbsSquared(2, 1);
  for (int trial = 0; trial < 10; ++trial) {
    AtomicMeasure mu = RandomMeasure(2, 3, rng);
    for (auto& z : mu.atoms) {
      const double nrm = std::sqrt(std::norm(z[0]) + std::norm(z[1]));
      if (nrm > 0.95) {
        for (auto& v : z) v *= 0.9 / nrm;
      }
    }
    const MomentSequence y = MomentsOfMeasure(mu, 3);
    const Eigen::MatrixXcd l = LocalizingMatrix(y, g, 2);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(l);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10);
  }
}

TEST(SymbolicMatrixTest, InstantiationMatchesNumericLocalizingMatrix) {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 3;
    const CPoly g = RandomSelfConjugate(n, 1, rng);
    const AtomicMeasure mu = RandomMeasure(n, 1 + trial % 3, rng);
    const MomentSequence y = MomentsOfMeasure(mu, 2);
    KeyTable table(PhaseLattice::Full(n));
    const MonomialBasis b(n, 1);
    const SymbolicMatrix s = LocalizingMatrixSymbolic(g, b.entries(), b.entries(), table);
    std::vector<Complex> values(table.size());
    for (int k = 0; k < table.size(); ++k) {
      values[k] = y.at(table.key(k).beta, table.key(k).gamma);
    }
    const Eigen::MatrixXcd inst = Instantiate(s, values);
    // Direct sum_k w_k g(z_k) v v^* with v = [z_k]_1.
    Eigen::MatrixXcd direct = Eigen::MatrixXcd::Zero(b.size(), b.size());
    for (int k = 0; k < mu.size(); ++k) {
      Eigen::VectorXcd v(b.size());
      for (int i = 0; i < b.size(); ++i) {
        v(i) = oracle::MonomialValue(mu.atoms[k], b[i], Exponent(n, 0));
      }
      direct += mu.weights[k] * g.Evaluate(mu.atoms[k]) * v * v.adjoint();
    }
    EXPECT_LT((inst - direct).cwiseAbs().maxCoeff(), 1e-10) << "trial " << trial;
    EXPECT_LT((LocalizingMatrix(y, g, 1) - direct).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(KeyTableTest, RejectsKeysOutsideLattice) {
  KeyTable table(PhaseLattice(2, {}));
  EXPECT_EQ(table.Intern(CanonicalKey(Exponent{1, 0}, Exponent{0, 1}).pair), -1);
  const int id = table.Intern(CanonicalKey(Exponent{1, 0}, Exponent{1, 0}).pair);
  EXPECT_GE(id, 0);
  EXPECT_EQ(table.Find(CanonicalKey(Exponent{1, 0}, Exponent{1, 0}).pair), id);
  EXPECT_EQ(table.size(), 1);
}

}  // namespace
}  // namespace rhsos
