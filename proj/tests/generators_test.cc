#include "rhsos/generators.h"

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "oracles.h"
#include "rhsos/monomial_basis.h"

namespace rhsos {
namespace {

std::vector<Complex> RandomPoint(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<Complex> z(n);
  for (auto& v : z) v = Complex(g(rng), g(rng));
  return z;
}

TEST(RandomFormsTest, SelfConjugateRealAndReproducible) {
  for (std::uint64_t seed : {1u, 2u, 99u}) {
    for (int n = 1; n <= 4; ++n) {
      for (const CPOPInstance& inst : {RandomQuadratic(n, seed), RandomQuartic(n, seed)}) {
        EXPECT_TRUE(inst.objective.IsSelfConjugate());
        EXPECT_TRUE(inst.objective.HasRealCoefficients());
        EXPECT_NO_THROW(inst.Validate());
      }
      EXPECT_EQ(RandomQuartic(n, seed).objective, RandomQuartic(n, seed).objective);
    }
  }
  EXPECT_FALSE(RandomQuadratic(3, 1).objective == RandomQuadratic(3, 2).objective);
}

TEST(RandomFormsTest, ObjectiveIsQuadraticFormInMonomialVector) {
  std::mt19937_64 rng(4);
  for (int degree = 1; degree <= 2; ++degree) {
    const int n = 3;
    const CPOPInstance inst = degree == 1 ? RandomQuadratic(n, 8) : RandomQuartic(n, 8);
    const MonomialBasis b(n, degree);
    const Eigen::MatrixXd q = oracle::RandomSymmetric(b.size(), 8);
    const auto z = RandomPoint(n, rng);
    Eigen::VectorXcd v(b.size());
    for (int i = 0; i < b.size(); ++i) v(i) = oracle::MonomialValue(z, b[i], Exponent(n, 0));
    const Complex expected = (v.adjoint() * q.cast<Complex>() * v)(0);
    EXPECT_LT(std::abs(inst.objective.Evaluate(z) - expected), 1e-9 * (1 + std::abs(expected)));
    ASSERT_EQ(inst.eqs.size(), 1u);
  }
}

TEST(SmaleTest, ExtremalPolynomialIsFeasibleAndAttainsBound) {
  for (int n = 2; n <= 4; ++n) {
    const CPOPInstance inst = Smale(n);
    // Critical points of z^{n+1} + z: roots of z^n = -1/(n+1).
    std::vector<Complex> z(n + 1);
    const double radius = std::pow(1.0 / (n + 1), 1.0 / n);
    for (int k = 0; k < n; ++k) {
      z[k] = std::polar(radius, (2.0 * k + 1.0) * std::numbers::pi / n);
    }
    z[n] = static_cast<double>(n) / (n + 1);
    EXPECT_LE(inst.MaxViolation(z), 1e-10) << "n=" << n;
    const double value = inst.objective.Evaluate(z).real();
    EXPECT_NEAR(inst.ReportedValue(-value), static_cast<double>(n) / (n + 1), 1e-12);
    EXPECT_TRUE(inst.objective.HasRealCoefficients());
    for (const CPoly& g : inst.ineqs) EXPECT_TRUE(g.IsSelfConjugate());
  }
  EXPECT_THROW(Smale(1), std::invalid_argument);
}

TEST(SmaleTest, HMatchesIntegralDefinition) {
  // n = 2: p(t) = 3 (t - z1)(t - z2), H(y) = y^2 - 3/2 (z1 + z2) y + 3 z1 z2.
  std::mt19937_64 rng(6);
  const auto z = RandomPoint(3, rng);
  const Complex y = z[0];
  const Complex expected = y * y - 1.5 * (z[0] + z[1]) * y + 3.0 * z[0] * z[1];
  EXPECT_LT(std::abs(SmaleH(2, 0).Evaluate(z) - expected), 1e-12 * (1 + std::abs(expected)));
}

TEST(MordellTest, RegularPolygonAttainsConjecturedValue) {
  for (int n = 3; n <= 5; ++n) {
    const CPOPInstance inst = Mordell(n);
    std::vector<Complex> z(n - 1);
    for (int k = 0; k < n - 1; ++k) z[k] = std::polar(1.0, 2.0 * std::numbers::pi * k / n);
    EXPECT_LE(inst.MaxViolation(z), 1e-10);
    EXPECT_NEAR(inst.objective.Evaluate(z).real(), std::pow(n, n), 1e-8 * std::pow(n, n));
    EXPECT_EQ(inst.sense, Sense::kMaximize);
  }
  EXPECT_THROW(Mordell(6), std::invalid_argument);
}

TEST(PolyphaseTest, EnergyAndPeakMatchAutocorrelationOracle) {
  std::mt19937_64 rng(10);
  for (int n = 4; n <= 6; ++n) {
    const CPOPInstance energy = PolyphaseEnergy(n);
    const CPOPInstance peak = PolyphasePeak(n);
    for (int trial = 0; trial < 5; ++trial) {
      const auto z = oracle::RandomTorusPoint(n, rng);
      EXPECT_NEAR(energy.objective.Evaluate(z).real(), oracle::SidelobeEnergy(z), 1e-10);
      EXPECT_LE(energy.MaxViolation(z), 1e-12);
      auto zu = z;
      zu.push_back(oracle::SidelobePeak(z));
      EXPECT_LE(peak.MaxViolation(zu), 1e-10);
      zu.back() *= 0.99;
      EXPECT_GT(peak.MaxViolation(zu), 0.0);
    }
  }
}

TEST(ExampleTest, ObjectiveMatchesDefinition) {
  std::mt19937_64 rng(2);
  const CPOPInstance inst = UnimodularTriple();
  const auto z = oracle::RandomTorusPoint(3, rng);
  EXPECT_NEAR(inst.objective.Evaluate(z).real(), oracle::UnimodularTripleObjective(z), 1e-12);
  EXPECT_LE(inst.MaxViolation(oracle::UnimodularTripleReferencePoint()), 1e-5);
}

TEST(GapExampleTest, ComplexFormMatchesRealForm) {
  std::mt19937_64 rng(13);
  const RealPop pop = GapRealPop();
  const CPOPInstance inst = GapComplex();
  for (int trial = 0; trial < 10; ++trial) {
    const auto z = RandomPoint(2, rng);
    const std::vector<double> x = {z[0].real(), z[1].real(), z[0].imag(), z[1].imag()};
    EXPECT_NEAR(inst.objective.Evaluate(z).real(), pop.objective.Evaluate(x), 1e-10);
  }
  // x = (-sqrt 2, 1, 0, 0) is feasible with value 1 - sqrt 2.
  const double s2 = std::sqrt(2.0);
  const std::vector<double> x = {-s2, 1.0, 0.0, 0.0};
  for (const RPoly& h : pop.eqs) EXPECT_NEAR(h.Evaluate(x), 0.0, 1e-12);
  EXPECT_GE(pop.ineqs[0].Evaluate(x), 0.0);
  EXPECT_NEAR(pop.objective.Evaluate(x), 1.0 - s2, 1e-12);
}

TEST(FamilyTest, DispatchAndUnknownNames) {
  for (const std::string& f : FamilyNames()) {
    const int n = f == "mordell" ? 3 : f.rfind("polyphase", 0) == 0 ? 4 : 2;
    EXPECT_NO_THROW(MakeFamily(f, n, 1)) << f;
  }
  EXPECT_THROW(MakeFamily("nope", 2, 1), std::invalid_argument);
}

}  // namespace
}  // namespace rhsos
