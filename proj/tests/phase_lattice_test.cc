#include "rhsos/phase_lattice.h"

#include <gtest/gtest.h>

#include "rhsos/generators.h"
#include "rhsos/monomial_basis.h"

namespace rhsos {
namespace {

TEST(PhaseLatticeTest, FullLatticeAdmitsEverything) {
  const PhaseLattice l = PhaseLattice::Full(3);
  EXPECT_TRUE(l.is_full());
  EXPECT_EQ(l.rank(), 3);
  EXPECT_TRUE(l.Admits({2, 0, 1}, {0, 1, 0}));
}

TEST(PhaseLatticeTest, ModulusOnlyDataKeepsBalancedMoments) {
  const CPoly p = CPoly::AbsSquared(2, 0) + CPoly::AbsSquared(2, 1).Pow(2);
  const PhaseLattice l = PhaseLattice::FromPolynomials(2, {p});
  EXPECT_EQ(l.rank(), 0);
  EXPECT_TRUE(l.Admits({1, 1}, {1, 1}));
  EXPECT_FALSE(l.Admits({1, 0}, {0, 1}));
}

TEST(PhaseLatticeTest, CrossTermGeneratesDifferenceDirection) {
  const CPoly p = CPoly::Var(2, 0) * CPoly::ConjVar(2, 1);
  const PhaseLattice l = PhaseLattice::FromPolynomials(2, {p.HermitianPart()});
  EXPECT_EQ(l.rank(), 1);
  EXPECT_TRUE(l.Contains({1, -1}));
  EXPECT_TRUE(l.Contains({-3, 3}));
  EXPECT_FALSE(l.Contains({1, 0}));
  EXPECT_TRUE(l.Admits({1, 0}, {0, 1}));
  EXPECT_FALSE(l.Admits({1, 0}, {0, 0}));
  EXPECT_EQ(l.Coset({1, 0}), l.Coset({0, 1}));
  EXPECT_NE(l.Coset({1, 0}), l.Coset({0, 0}));
}

TEST(PhaseLatticeTest, ReduceIsIdempotentAndLatticeInvariant) {
  const PhaseLattice l(3, {{2, 0, 1}, {0, 3, -1}});
  const std::vector<long long> v = {5, -4, 7};
  const auto r = l.Reduce(v);
  EXPECT_EQ(l.Reduce(r), r);
  std::vector<long long> shifted = v;
  for (int j = 0; j < 3; ++j) shifted[j] += 2 * l.basis()[0][j] - l.basis()[1][j];
  EXPECT_EQ(l.Reduce(shifted), r);
}

TEST(PhaseLatticeTest, PartitionCoversBasisOnce) {
  const CPOPInstance inst = PolyphaseEnergy(4);
  std::vector<CPoly> polys = {inst.objective};
  for (const CPoly& h : inst.eqs) polys.push_back(h);
  const PhaseLattice l = PhaseLattice::FromPolynomials(4, polys);
  const MonomialBasis b(4, 2);
  const auto classes = PartitionByCoset(l, b.entries());
  int total = 0;
  for (const auto& c : classes) {
    total += static_cast<int>(c.size());
    for (int i : c) EXPECT_EQ(l.Coset(b[i]), l.Coset(b[c.front()]));
  }
  EXPECT_EQ(total, b.size());
  EXPECT_GT(classes.size(), 1u);
}

}  // namespace
}  // namespace rhsos
