#include "rhsos/monomial_basis.h"

#include <algorithm>
#include <functional>

namespace rhsos {

size_t ExponentHash::operator()(const Exponent& e) const {
  size_t h = e.size();
  for (int v : e) h = h * 1000003u ^ static_cast<size_t>(v + 0x9e37);
  return h;
}

size_t ExponentPairHash::operator()(const ExponentPair& e) const {
  ExponentHash h;
  return h(e.beta) * 31u + h(e.gamma);
}

namespace {

// Appends all exponents of total degree d, first entry descending.
void EnumerateDegree(int n, int d, int pos, Exponent& cur,
                     std::vector<Exponent>& out) {
  if (pos == n - 1) {
    cur[pos] = d;
    out.push_back(cur);
    return;
  }
  for (int k = d; k >= 0; --k) {
    cur[pos] = k;
    EnumerateDegree(n, d - k, pos + 1, cur, out);
  }
}

}  // namespace

MonomialBasis::MonomialBasis(int n, int r) : n_(n), r_(r) {
  if (n <= 0 || r < 0) throw MalformedInput("basis needs n >= 1 and r >= 0");
  Exponent cur(n, 0);
  for (int d = 0; d <= r; ++d) EnumerateDegree(n, d, 0, cur, entries_);
  for (int i = 0; i < size(); ++i) index_.emplace(entries_[i], i);
}

int MonomialBasis::IndexOf(const Exponent& alpha) const {
  auto it = index_.find(alpha);
  return it == index_.end() ? -1 : it->second;
}

int MonomialBasis::CountUpTo(int t) const {
  if (t < 0) return 0;
  return static_cast<int>(BasisSize(n_, std::min(t, r_)));
}

long long Binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

long long BasisSize(int n, int r) { return Binomial(n + r, r); }

}  // namespace rhsos
