#pragma once

#include <unordered_map>
#include <vector>

#include "rhsos/poly.h"

namespace rhsos {

struct ExponentHash {
  size_t operator()(const Exponent& e) const;
};

struct ExponentPairHash {
  size_t operator()(const ExponentPair& e) const;
};

/// All exponents alpha in N^n with |alpha| <= r, in graded order
/// (degree ascending, z_1 before z_2 within a degree).
class MonomialBasis {
 public:
  MonomialBasis(int n, int r);

  int n() const { return n_; }
  int order() const { return r_; }
  int size() const { return static_cast<int>(entries_.size()); }
  const Exponent& operator[](int i) const { return entries_[i]; }
  const std::vector<Exponent>& entries() const { return entries_; }
  /// Position of alpha, or -1 if absent.
  int IndexOf(const Exponent& alpha) const;
  /// Number of entries with |alpha| <= t.
  int CountUpTo(int t) const;

 private:
  int n_;
  int r_;
  std::vector<Exponent> entries_;
  std::unordered_map<Exponent, int, ExponentHash> index_;
};

/// binom(n + r, r) computed exactly in 64-bit integers.
long long BasisSize(int n, int r);
long long Binomial(int n, int k);

}  // namespace rhsos
