#include "rhsos/moments.h"

#include <stdexcept>

namespace rhsos {

MomentKey CanonicalKey(const ExponentPair& e) {
  ExponentPair s = e.Swapped();
  if (ExponentPairLess{}(s, e)) return {std::move(s), true};
  return {e, false};
}

MomentKey CanonicalKey(const Exponent& beta, const Exponent& gamma) {
  return CanonicalKey(ExponentPair{beta, gamma});
}

Complex MomentSequence::at(const Exponent& beta, const Exponent& gamma) const {
  if (Degree(beta) > order_ || Degree(gamma) > order_) {
    throw std::out_of_range("moment beyond the sequence order");
  }
  const MomentKey k = CanonicalKey(beta, gamma);
  auto it = values_.find(k.pair);
  if (it == values_.end()) return 0.0;
  return k.flipped ? std::conj(it->second) : it->second;
}

void MomentSequence::set(const Exponent& beta, const Exponent& gamma,
                         Complex value) {
  if (Degree(beta) > order_ || Degree(gamma) > order_) {
    throw std::out_of_range("moment beyond the sequence order");
  }
  const MomentKey k = CanonicalKey(beta, gamma);
  values_[k.pair] = k.flipped ? std::conj(value) : value;
}

Complex MomentSequence::Apply(const CPoly& p) const {
  Complex total = 0.0;
  for (const auto& [e, c] : p.terms()) total += c * at(e.beta, e.gamma);
  return total;
}

bool MomentSequence::IsReal(double tol) const {
  for (const auto& [k, v] : values_) {
    if (std::abs(v.imag()) > tol) return false;
  }
  return true;
}

MomentSequence MomentsOfMeasure(const AtomicMeasure& mu, int order) {
  MomentSequence y(mu.n, order);
  MonomialBasis basis(mu.n, order);
  // Monomial values per atom.
  std::vector<std::vector<Complex>> mono(mu.size());
  for (int k = 0; k < mu.size(); ++k) {
    mono[k].resize(basis.size());
    for (int a = 0; a < basis.size(); ++a) {
      Complex v = 1.0;
      for (int j = 0; j < mu.n; ++j) {
        for (int p = 0; p < basis[a][j]; ++p) v *= mu.atoms[k][j];
      }
      mono[k][a] = v;
    }
  }
  for (int a = 0; a < basis.size(); ++a) {
    for (int b = a; b < basis.size(); ++b) {
      Complex v = 0.0;
      for (int k = 0; k < mu.size(); ++k) {
        v += mu.weights[k] * mono[k][a] * std::conj(mono[k][b]);
      }
      y.set(basis[a], basis[b], v);
    }
  }
  return y;
}

Eigen::MatrixXcd MomentMatrix(const MomentSequence& y,
                              const std::vector<Exponent>& rows,
                              const std::vector<Exponent>& cols) {
  Eigen::MatrixXcd m(rows.size(), cols.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    for (size_t j = 0; j < cols.size(); ++j) m(i, j) = y.at(rows[i], cols[j]);
  }
  return m;
}

Eigen::MatrixXcd MomentMatrix(const MomentSequence& y, int t) {
  MonomialBasis basis(y.n(), t);
  return MomentMatrix(y, basis.entries(), basis.entries());
}

Eigen::MatrixXcd LocalizingMatrix(const MomentSequence& y, const CPoly& g,
                                  int t) {
  MonomialBasis basis(y.n(), t);
  const int s = basis.size();
  Eigen::MatrixXcd m(s, s);
  Exponent b(y.n());
  Exponent c(y.n());
  for (int i = 0; i < s; ++i) {
    for (int j = 0; j < s; ++j) {
      Complex v = 0.0;
      for (const auto& [e, coeff] : g.terms()) {
        for (int q = 0; q < y.n(); ++q) {
          b[q] = basis[i][q] + e.beta[q];
          c[q] = basis[j][q] + e.gamma[q];
        }
        v += coeff * y.at(b, c);
      }
      m(i, j) = v;
    }
  }
  return m;
}

int KeyTable::Intern(const ExponentPair& canonical) {
  auto it = index_.find(canonical);
  if (it != index_.end()) return it->second;
  if (!lattice_.Admits(canonical.beta, canonical.gamma)) return -1;
  const int id = size();
  keys_.push_back(canonical);
  index_.emplace(canonical, id);
  return id;
}

int KeyTable::Find(const ExponentPair& canonical) const {
  auto it = index_.find(canonical);
  return it == index_.end() ? -1 : it->second;
}

Complex LinearForm::Evaluate(const std::vector<Complex>& key_values) const {
  Complex v = constant;
  for (const KeyRef& t : terms) {
    const Complex y = key_values[t.key];
    v += t.coeff * (t.conjugated ? std::conj(y) : y);
  }
  return v;
}

LinearForm LocalizingEntry(const CPoly& g, const Exponent& b, const Exponent& c,
                           KeyTable& table) {
  LinearForm form;
  const int n = static_cast<int>(b.size());
  ExponentPair e{Exponent(n), Exponent(n)};
  for (const auto& [t, coeff] : g.terms()) {
    for (int q = 0; q < n; ++q) {
      e.beta[q] = b[q] + t.beta[q];
      e.gamma[q] = c[q] + t.gamma[q];
    }
    const MomentKey k = CanonicalKey(e);
    const int id = table.Intern(k.pair);
    if (id < 0) continue;
    bool merged = false;
    for (KeyRef& r : form.terms) {
      if (r.key == id && r.conjugated == k.flipped) {
        r.coeff += coeff;
        merged = true;
        break;
      }
    }
    if (!merged) form.terms.push_back({id, k.flipped, coeff});
  }
  return form;
}

SymbolicMatrix MomentMatrixSymbolic(const std::vector<Exponent>& basis,
                                    KeyTable& table) {
  const int n = basis.empty() ? 0 : static_cast<int>(basis[0].size());
  return LocalizingMatrixSymbolic(CPoly::Constant(n, 1.0), basis, basis, table);
}

SymbolicMatrix LocalizingMatrixSymbolic(const CPoly& g,
                                        const std::vector<Exponent>& rows,
                                        const std::vector<Exponent>& cols,
                                        KeyTable& table) {
  SymbolicMatrix m;
  m.rows = rows;
  m.cols = cols;
  m.entries.reserve(rows.size() * cols.size());
  for (const Exponent& b : rows) {
    for (const Exponent& c : cols) {
      m.entries.push_back(LocalizingEntry(g, b, c, table));
    }
  }
  return m;
}

Eigen::MatrixXcd Instantiate(const SymbolicMatrix& m,
                             const std::vector<Complex>& key_values) {
  Eigen::MatrixXcd out(m.num_rows(), m.num_cols());
  for (int i = 0; i < m.num_rows(); ++i) {
    for (int j = 0; j < m.num_cols(); ++j) {
      out(i, j) = m.at(i, j).Evaluate(key_values);
    }
  }
  return out;
}

}  // namespace rhsos
