#include "rhsos/phase_lattice.h"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <numeric>

namespace rhsos {

namespace {

long long FloorDiv(long long a, long long b) {
  long long q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

void Axpy(std::vector<long long>& y, long long a,
          const std::vector<long long>& x) {
  for (size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

}  // namespace

PhaseLattice PhaseLattice::Full(int n) {
  std::vector<std::vector<long long>> gens;
  for (int i = 0; i < n; ++i) {
    std::vector<long long> e(n, 0);
    e[i] = 1;
    gens.push_back(e);
  }
  return PhaseLattice(n, gens);
}

PhaseLattice PhaseLattice::FromPolynomials(int n,
                                           const std::vector<CPoly>& polys) {
  std::vector<std::vector<long long>> gens;
  for (const CPoly& p : polys) {
    for (const auto& [e, c] : p.terms()) {
      std::vector<long long> v(n);
      bool nonzero = false;
      for (int j = 0; j < n; ++j) {
        v[j] = e.beta[j] - e.gamma[j];
        nonzero |= v[j] != 0;
      }
      if (nonzero) gens.push_back(v);
    }
  }
  return PhaseLattice(n, gens);
}

PhaseLattice::PhaseLattice(int n,
                           const std::vector<std::vector<long long>>& generators)
    : n_(n) {
  std::vector<std::vector<long long>> rows = generators;
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != n) {
      throw MalformedInput("lattice generator has wrong dimension");
    }
  }
  size_t top = 0;
  for (int col = 0; col < n && top < rows.size(); ++col) {
    // Euclid on column `col` over rows[top..].
    while (true) {
      size_t best = rows.size();
      for (size_t i = top; i < rows.size(); ++i) {
        if (rows[i][col] != 0 &&
            (best == rows.size() ||
             std::llabs(rows[i][col]) < std::llabs(rows[best][col]))) {
          best = i;
        }
      }
      if (best == rows.size()) break;
      std::swap(rows[top], rows[best]);
      bool done = true;
      for (size_t i = top + 1; i < rows.size(); ++i) {
        if (rows[i][col] != 0) {
          Axpy(rows[i], -(rows[i][col] / rows[top][col]), rows[top]);
          if (rows[i][col] != 0) done = false;
        }
      }
      if (done) break;
    }
    if (rows[top][col] == 0) continue;
    if (rows[top][col] < 0) {
      for (auto& v : rows[top]) v = -v;
    }
    pivots_.push_back(col);
    ++top;
  }
  rows.resize(top);
  basis_ = rows;
  // Reduce entries above each pivot into [0, pivot).
  for (size_t k = 0; k < basis_.size(); ++k) {
    const int col = pivots_[k];
    for (size_t i = 0; i < k; ++i) {
      Axpy(basis_[i], -FloorDiv(basis_[i][col], basis_[k][col]), basis_[k]);
    }
  }
}

bool PhaseLattice::is_full() const {
  if (rank() != n_) return false;
  for (size_t k = 0; k < basis_.size(); ++k) {
    if (basis_[k][pivots_[k]] != 1) return false;
  }
  return true;
}

std::vector<long long> PhaseLattice::Reduce(std::vector<long long> v) const {
  for (size_t k = 0; k < basis_.size(); ++k) {
    const int col = pivots_[k];
    Axpy(v, -FloorDiv(v[col], basis_[k][col]), basis_[k]);
  }
  return v;
}

bool PhaseLattice::Contains(const std::vector<long long>& v) const {
  const auto r = Reduce(v);
  return std::all_of(r.begin(), r.end(), [](long long x) { return x == 0; });
}

bool PhaseLattice::Admits(const Exponent& beta, const Exponent& gamma) const {
  std::vector<long long> v(n_);
  for (int j = 0; j < n_; ++j) v[j] = beta[j] - gamma[j];
  return Contains(v);
}

std::vector<long long> PhaseLattice::Coset(const Exponent& alpha) const {
  return Reduce(std::vector<long long>(alpha.begin(), alpha.end()));
}

std::vector<std::vector<int>> PartitionByCoset(
    const PhaseLattice& lattice, const std::vector<Exponent>& alphas) {
  std::map<std::vector<long long>, int> class_of;
  std::vector<std::vector<int>> classes;
  for (int i = 0; i < static_cast<int>(alphas.size()); ++i) {
    auto rep = lattice.Coset(alphas[i]);
    auto [it, inserted] =
        class_of.emplace(rep, static_cast<int>(classes.size()));
    if (inserted) classes.emplace_back();
    classes[it->second].push_back(i);
  }
  return classes;
}

}  // namespace rhsos
