#pragma once

#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "rhsos/monomial_basis.h"
#include "rhsos/phase_lattice.h"
#include "rhsos/poly.h"

namespace rhsos {

/// Canonical representative of the unordered pair {(b, g), (g, b)}: the
/// smaller of the two under ExponentPairLess. `flipped` records whether the
/// input was the larger one, i.e. y_{b,g} = conj(y_key).
struct MomentKey {
  ExponentPair pair;
  bool flipped = false;
};

MomentKey CanonicalKey(const ExponentPair& e);
MomentKey CanonicalKey(const Exponent& beta, const Exponent& gamma);

/// Finite atomic measure sum_k w_k delta_{z_k}.
struct AtomicMeasure {
  int n = 0;
  std::vector<std::vector<Complex>> atoms;
  std::vector<double> weights;

  int size() const { return static_cast<int>(atoms.size()); }
};

/// Truncated complex moment sequence y_{b,g} = L(z^b conj(z)^g) for
/// |b|, |g| <= order, with y_{g,b} = conj(y_{b,g}).
///
/// Only canonical keys are stored; keys within the order that were never
/// set read as zero (moments removed by a symmetry reduction).
class MomentSequence {
 public:
  MomentSequence() = default;
  MomentSequence(int n, int order) : n_(n), order_(order) {}

  int n() const { return n_; }
  int order() const { return order_; }
  size_t num_stored() const { return values_.size(); }

  Complex at(const Exponent& beta, const Exponent& gamma) const;
  void set(const Exponent& beta, const Exponent& gamma, Complex value);
  /// L(p) = sum_t p_t y_t. Throws std::out_of_range if p exceeds the order.
  Complex Apply(const CPoly& p) const;
  /// True when every stored value is real within tol.
  bool IsReal(double tol = 0.0) const;

  const std::unordered_map<ExponentPair, Complex, ExponentPairHash>& values()
      const {
    return values_;
  }

 private:
  int n_ = 0;
  int order_ = 0;
  std::unordered_map<ExponentPair, Complex, ExponentPairHash> values_;
};

/// Moments of a finite atomic measure up to the given order.
MomentSequence MomentsOfMeasure(const AtomicMeasure& mu, int order);

/// Numeric moment matrix M_t(y), rows/cols indexed by MonomialBasis(n, t).
Eigen::MatrixXcd MomentMatrix(const MomentSequence& y, int t);
/// Numeric localizing matrix M_t(g y).
Eigen::MatrixXcd LocalizingMatrix(const MomentSequence& y, const CPoly& g,
                                  int t);
/// Moment matrix over explicit row and column exponent lists.
Eigen::MatrixXcd MomentMatrix(const MomentSequence& y,
                              const std::vector<Exponent>& rows,
                              const std::vector<Exponent>& cols);

/// Registry of canonical moment keys used by one relaxation. Keys outside
/// the admissible phase lattice are rejected.
class KeyTable {
 public:
  explicit KeyTable(PhaseLattice lattice) : lattice_(std::move(lattice)) {}

  /// Id of the canonical key, creating it if needed; -1 when the lattice
  /// forces this moment to zero.
  int Intern(const ExponentPair& canonical);
  /// Id of an existing key, or -1.
  int Find(const ExponentPair& canonical) const;
  int size() const { return static_cast<int>(keys_.size()); }
  const ExponentPair& key(int id) const { return keys_[id]; }
  const PhaseLattice& lattice() const { return lattice_; }

 private:
  PhaseLattice lattice_;
  std::vector<ExponentPair> keys_;
  std::unordered_map<ExponentPair, int, ExponentPairHash> index_;
};

/// coeff * (conjugated ? conj(y_key) : y_key).
struct KeyRef {
  int key = -1;
  bool conjugated = false;
  Complex coeff = 0.0;
};

struct LinearForm {
  std::vector<KeyRef> terms;
  Complex constant = 0.0;

  Complex Evaluate(const std::vector<Complex>& key_values) const;
};

/// Sparse linear form for sum_t g_t y_{b + b_t, c + c_t}. Terms falling on
/// rejected keys are dropped; terms on the same key are merged.
LinearForm LocalizingEntry(const CPoly& g, const Exponent& b,
                           const Exponent& c, KeyTable& table);

/// Matrix of linear forms over moment keys, indexed by row and column
/// exponent lists.
struct SymbolicMatrix {
  std::vector<Exponent> rows;
  std::vector<Exponent> cols;
  /// Row-major, rows.size() * cols.size() entries.
  std::vector<LinearForm> entries;

  int num_rows() const { return static_cast<int>(rows.size()); }
  int num_cols() const { return static_cast<int>(cols.size()); }
  const LinearForm& at(int i, int j) const {
    return entries[static_cast<size_t>(i) * cols.size() + j];
  }
};

SymbolicMatrix MomentMatrixSymbolic(const std::vector<Exponent>& basis,
                                    KeyTable& table);
SymbolicMatrix LocalizingMatrixSymbolic(const CPoly& g,
                                        const std::vector<Exponent>& rows,
                                        const std::vector<Exponent>& cols,
                                        KeyTable& table);

/// Numeric matrix from key values (indexed by key id).
Eigen::MatrixXcd Instantiate(const SymbolicMatrix& m,
                             const std::vector<Complex>& key_values);

}  // namespace rhsos
