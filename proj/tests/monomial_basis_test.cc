#include "rhsos/monomial_basis.h"

#include <gtest/gtest.h>

#include "oracles.h"

namespace rhsos {
namespace {

TEST(MonomialBasisTest, MatchesOdometerEnumeration) {
  for (int n = 1; n <= 4; ++n) {
    for (int r = 0; r <= 4; ++r) {
      const MonomialBasis b(n, r);
      EXPECT_EQ(b.entries(), oracle::EnumerateBasis(n, r)) << "n=" << n << " r=" << r;
    }
  }
}

TEST(MonomialBasisTest, IndexOfInvertsOperatorBracket) {
  const MonomialBasis b(3, 3);
  for (int i = 0; i < b.size(); ++i) EXPECT_EQ(b.IndexOf(b[i]), i);
  EXPECT_EQ(b.IndexOf({4, 0, 0}), -1);
  EXPECT_EQ(b.IndexOf({1, 1}), -1);
}

TEST(MonomialBasisTest, CountUpToIsAPrefix) {
  const MonomialBasis b(3, 4);
  for (int t = 0; t <= 4; ++t) {
    EXPECT_EQ(b.CountUpTo(t), BasisSize(3, t));
    for (int i = 0; i < b.CountUpTo(t); ++i) EXPECT_LE(Degree(b[i]), t);
  }
}

TEST(MonomialBasisTest, SmallCaseInOrder) {
  const MonomialBasis b(2, 2);
  const std::vector<Exponent> expected = {{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};
  EXPECT_EQ(b.entries(), expected);
}

TEST(BasisSizeTest, AgreesWithFloatingBinomial) {
  for (int n = 1; n <= 50; n += 7) {
    for (int r = 0; r <= 6; ++r) {
      EXPECT_EQ(static_cast<double>(BasisSize(n, r)), oracle::BinomialDouble(n + r, r));
    }
  }
  EXPECT_EQ(Binomial(5, 0), 1);
  EXPECT_EQ(Binomial(5, 6), 0);
}

}  // namespace
}  // namespace rhsos
