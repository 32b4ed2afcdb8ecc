#pragma once

#include <vector>

#include "rhsos/poly.h"

namespace rhsos {

/// Integer lattice spanned by the phase charges beta - gamma of a set of
/// monomials.
///
/// A polynomial built from such monomials is invariant under
/// z_j -> e^{i theta_j} z_j for every theta in the annihilator torus of the
/// lattice, so a moment L(z^b conj(z)^g) can be nonzero at an invariant
/// optimum only when b - g lies in the lattice.
class PhaseLattice {
 public:
  /// The full lattice Z^n (no reduction).
  static PhaseLattice Full(int n);
  /// Lattice spanned by the charges of every term of every polynomial.
  static PhaseLattice FromPolynomials(int n, const std::vector<CPoly>& polys);
  PhaseLattice(int n, const std::vector<std::vector<long long>>& generators);

  int n() const { return n_; }
  int rank() const { return static_cast<int>(basis_.size()); }
  bool is_full() const;

  /// Canonical representative of v + lattice.
  std::vector<long long> Reduce(std::vector<long long> v) const;
  bool Contains(const std::vector<long long>& v) const;
  /// Whether beta - gamma is in the lattice.
  bool Admits(const Exponent& beta, const Exponent& gamma) const;
  /// Canonical coset representative of alpha.
  std::vector<long long> Coset(const Exponent& alpha) const;

  /// Echelon basis rows (positive pivots, entries above pivots reduced).
  const std::vector<std::vector<long long>>& basis() const { return basis_; }

 private:
  int n_;
  std::vector<std::vector<long long>> basis_;
  std::vector<int> pivots_;
};

/// Groups indices of `alphas` by coset; classes ordered by first member.
std::vector<std::vector<int>> PartitionByCoset(
    const PhaseLattice& lattice, const std::vector<Exponent>& alphas);

}  // namespace rhsos
