#include "rhsos/poly.h"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.h"

namespace rhsos {
namespace {

CPoly RandomPoly(int n, int deg, int terms, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, deg);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  CPoly p(n);
  for (int t = 0; t < terms; ++t) {
    ExponentPair e{Exponent(n, 0), Exponent(n, 0)};
    for (int j = 0; j < n; ++j) {
      e.beta[j] = pick(rng) / n;
      e.gamma[j] = pick(rng) / n;
    }
    p.AddTerm(e, Complex(unif(rng), unif(rng)));
  }
  return p;
}

std::vector<Complex> RandomPoint(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<Complex> z(n);
  for (auto& v : z) v = Complex(g(rng), g(rng));
  return z;
}

TEST(GradedLexLessTest, DegreeFirstThenLargerLeadingEntry) {
  EXPECT_TRUE(GradedLexLess({0, 0}, {1, 0}));
  EXPECT_TRUE(GradedLexLess({1, 0}, {0, 1}));
  EXPECT_TRUE(GradedLexLess({0, 1}, {2, 0}));
  EXPECT_FALSE(GradedLexLess({1, 0}, {1, 0}));
}

TEST(CPolyTest, ArithmeticMatchesPointwiseEvaluation) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const CPoly p = RandomPoly(3, 4, 6, rng);
    const CPoly q = RandomPoly(3, 4, 6, rng);
    const auto z = RandomPoint(3, rng);
    const Complex pz = p.Evaluate(z);
    const Complex qz = q.Evaluate(z);
    EXPECT_LT(std::abs((p * q).Evaluate(z) - pz * qz), 1e-9 * (1 + std::abs(pz * qz)));
    EXPECT_LT(std::abs((p + q).Evaluate(z) - (pz + qz)), 1e-12 * (1 + std::abs(pz + qz)));
    EXPECT_LT(std::abs(p.Conjugate().Evaluate(z) - std::conj(pz)), 1e-12 * (1 + std::abs(pz)));
  }
}

TEST(CPolyTest, EvaluateMatchesMonomialOracle) {
  std::mt19937_64 rng(11);
  const CPoly p = RandomPoly(2, 3, 8, rng);
  const auto z = RandomPoint(2, rng);
  Complex expected = 0.0;
  for (const auto& [e, c] : p.terms()) expected += c * oracle::MonomialValue(z, e.beta, e.gamma);
  EXPECT_LT(std::abs(p.Evaluate(z) - expected), 1e-12 * (1 + std::abs(expected)));
}

TEST(CPolyTest, HermitianPartIsExactlySelfConjugateAndRealValued) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const CPoly h = RandomPoly(3, 4, 7, rng).HermitianPart();
    EXPECT_TRUE(h.IsSelfConjugate());
    EXPECT_EQ(h, h.Conjugate());
    const auto z = RandomPoint(3, rng);
    EXPECT_LT(std::abs(h.Evaluate(z).imag()), 1e-10 * (1 + std::abs(h.Evaluate(z))));
  }
}

TEST(CPolyTest, PrunesCancelledTerms) {
  CPoly p = CPoly::Var(2, 0) + CPoly::ConjVar(2, 1);
  p -= CPoly::Var(2, 0);
  EXPECT_EQ(p.terms().size(), 1u);
  p.AddTerm({{0, 0}, {0, 0}}, 1e-16);
  EXPECT_EQ(p.terms().size(), 1u);
}

TEST(CPolyTest, UnitPolynomialWithImaginaryLinearTermIsNotSelfConjugate) {
  CPoly p(1);
  p.AddTerm({{1}, {0}}, Complex(0.0, 1.0));
  EXPECT_FALSE(p.IsSelfConjugate());
  p.AddTerm({{0}, {1}}, Complex(0.0, -1.0));
  EXPECT_TRUE(p.IsSelfConjugate());
  EXPECT_TRUE(p.HasImaginaryCoefficients());
  EXPECT_FALSE(p.HasRealCoefficients());
}

TEST(CPolyTest, DegreesFollowTheLargerSide) {
  CPoly p = CPoly::Var(2, 0).Pow(3) * CPoly::ConjVar(2, 1) + CPoly::ConjVar(2, 0).Pow(2);
  EXPECT_EQ(p.HolomorphicDegree(), 3);
  EXPECT_EQ(p.AntiholomorphicDegree(), 2);
  EXPECT_EQ(p.Degree(), 3);
}

TEST(CPolyTest, ConjDerivativeMatchesFiniteDifferences) {
  std::mt19937_64 rng(5);
  const CPoly f = RandomPoly(2, 3, 6, rng).HermitianPart();
  const auto z = RandomPoint(2, rng);
  // For real-valued f, df/dconj(z) = (df/dx + i df/dy) / 2.
  const double h = 1e-6;
  for (int i = 0; i < 2; ++i) {
    auto zp = z;
    auto zm = z;
    zp[i] += h;
    zm[i] -= h;
    const double dx = (f.Evaluate(zp).real() - f.Evaluate(zm).real()) / (2 * h);
    zp = z;
    zm = z;
    zp[i] += Complex(0, h);
    zm[i] -= Complex(0, h);
    const double dy = (f.Evaluate(zp).real() - f.Evaluate(zm).real()) / (2 * h);
    const Complex d = f.ConjDerivative(i).Evaluate(z);
    EXPECT_NEAR(d.real(), 0.5 * dx, 1e-5 * (1 + std::abs(dx)));
    EXPECT_NEAR(d.imag(), 0.5 * dy, 1e-5 * (1 + std::abs(dy)));
  }
}

TEST(CPolyTest, ArityMismatchThrows) {
  CPoly p(2);
  EXPECT_THROW(p.AddTerm({{1}, {0}}, 1.0), MalformedInput);
  EXPECT_THROW(p += CPoly(3), MalformedInput);
}

TEST(CPOPInstanceTest, ValidateRejectsNonSelfConjugateData) {
  CPOPInstance inst;
  inst.n = 1;
  inst.objective = CPoly::Var(1, 0);
  EXPECT_THROW(inst.Validate(), MalformedInput);
  inst.objective = CPoly::AbsSquared(1, 0);
  inst.Validate();
  inst.complex_eqs.push_back(CPoly::Var(1, 0) - CPoly::Constant(1, 1.0));
  inst.Validate();
  inst.ineqs.push_back(CPoly::Var(1, 0));
  EXPECT_THROW(inst.Validate(), MalformedInput);
}

TEST(CPOPInstanceTest, ReportedValueAppliesSenseAndSquareRoot) {
  CPOPInstance inst;
  inst.n = 1;
  inst.sense = Sense::kMaximize;
  inst.value_transform = ValueTransform::kSqrt;
  EXPECT_DOUBLE_EQ(inst.ReportedValue(-0.25), 0.5);
  inst.value_transform = ValueTransform::kNone;
  EXPECT_DOUBLE_EQ(inst.ReportedValue(-0.25), 0.25);
}

TEST(DegreeStatsTest, ExampleWithLinearObjective) {
  CPOPInstance inst;
  inst.n = 2;
  inst.objective = CPoly::Var(2, 0) + CPoly::ConjVar(2, 0);
  inst.ineqs.push_back(CPoly::Constant(2, 1.0) - CPoly::AbsSquared(2, 1).Pow(2));
  inst.eqs.push_back(CPoly::AbsSquared(2, 0) - CPoly::Constant(2, 1.0));
  const DegreeStats s = ComputeDegreeStats(inst);
  EXPECT_EQ(s.d_f, 1);
  EXPECT_EQ(s.d_g, std::vector<int>{2});
  EXPECT_EQ(s.d_h, std::vector<int>{1});
  EXPECT_EQ(s.d_K, 2);
  EXPECT_EQ(s.d_min, 2);
}

TEST(ExpandToRealTest, AgreesWithComplexEvaluation) {
  std::mt19937_64 rng(9);
  const CPoly p = RandomPoly(2, 3, 6, rng);
  const auto [re, im] = ExpandToReal(p);
  const auto z = RandomPoint(2, rng);
  const std::vector<double> x = {z[0].real(), z[1].real(), z[0].imag(), z[1].imag()};
  const Complex v = p.Evaluate(z);
  EXPECT_NEAR(re.Evaluate(x), v.real(), 1e-10 * (1 + std::abs(v)));
  EXPECT_NEAR(im.Evaluate(x), v.imag(), 1e-10 * (1 + std::abs(v)));
}

TEST(ToRealPopTest, SplitsComplexEqualitiesIntoTwoRows) {
  CPOPInstance inst;
  inst.n = 1;
  inst.objective = CPoly::AbsSquared(1, 0);
  inst.complex_eqs.push_back(CPoly::Var(1, 0).Pow(2) - CPoly::Constant(1, 1.0));
  const RealPop pop = ToRealPop(inst);
  EXPECT_EQ(pop.m, 2);
  EXPECT_EQ(pop.eqs.size(), 2u);
  EXPECT_DOUBLE_EQ(pop.objective.coefficient({2, 0}), 1.0);
  EXPECT_DOUBLE_EQ(pop.objective.coefficient({0, 2}), 1.0);
}

}  // namespace
}  // namespace rhsos
