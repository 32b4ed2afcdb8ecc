#include "rhsos/local_search.h"

#include <gtest/gtest.h>

#include "oracles.h"
#include "rhsos/generators.h"

namespace rhsos {
namespace {

TEST(LocalSearchTest, SphereQuadraticMatchesTrustRegionOracle) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto res = LocalUpperBound(RandomQuadratic(2, seed));
    ASSERT_TRUE(res.has_value());
    const double expected = oracle::SphereQuadraticMin(oracle::RandomSymmetric(3, seed));
    EXPECT_NEAR(res->min_form_value, expected, 1e-4) << "seed " << seed;
    EXPECT_LE(res->violation, 1e-9);
  }
}

TEST(LocalSearchTest, PolyphaseEnergyReachesHalf) {
  LocalSearchOptions opt;
  opt.samples = 10000;
  const auto res = LocalUpperBound(PolyphaseEnergy(4), opt);
  ASSERT_TRUE(res.has_value());
  EXPECT_LE(res->reported_value, 0.5 + 1e-3);
  EXPECT_NEAR(res->reported_value, oracle::SidelobeEnergy(res->point), 1e-9);
  EXPECT_LE(res->violation, 1e-9);
}

TEST(LocalSearchTest, PolyphasePeakUsesEpigraphVariable) {
  const auto res = LocalUpperBound(PolyphasePeak(4));
  ASSERT_TRUE(res.has_value());
  EXPECT_LE(res->reported_value, 0.5 + 1e-3);
  std::vector<Complex> code(res->point.begin(), res->point.end() - 1);
  EXPECT_NEAR(res->reported_value, oracle::SidelobePeak(code), 1e-9);
  EXPECT_LE(res->violation, 1e-9);
}

TEST(LocalSearchTest, MaximizationOnEllipsoidGivesLowerBound) {
  const auto res = LocalUpperBound(Mordell(3));
  ASSERT_TRUE(res.has_value());
  EXPECT_LE(res->reported_value, 27.0 + 1e-6);
  EXPECT_GE(res->reported_value, 27.0 - 1e-3);
  EXPECT_LE(res->violation, 1e-9);
}

TEST(LocalSearchTest, ThreeVariableExample) {
  const auto res = LocalUpperBound(UnimodularTriple());
  ASSERT_TRUE(res.has_value());
  EXPECT_NEAR(res->reported_value, -3.75, 1e-6);
}

TEST(LocalSearchTest, UnsupportedGeometryReturnsNothing) {
  EXPECT_FALSE(LocalUpperBound(Smale(2)).has_value());
  EXPECT_FALSE(LocalUpperBound(GapComplex()).has_value());
}

TEST(LocalSearchTest, SameSeedSameAnswer) {
  LocalSearchOptions opt;
  opt.samples = 500;
  opt.seed = 9;
  const auto a = LocalUpperBound(PolyphaseEnergy(5), opt);
  const auto b = LocalUpperBound(PolyphaseEnergy(5), opt);
  ASSERT_TRUE(a && b);
  EXPECT_EQ(a->min_form_value, b->min_form_value);
  EXPECT_EQ(a->point, b->point);
}

}  // namespace
}  // namespace rhsos
