#include "rhsos/generators.h"

#include <cmath>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>

#include "rhsos/monomial_basis.h"

namespace rhsos {

namespace {

CPoly SphereEquality(int num_vars, int count, double radius_sq) {
  CPoly h = CPoly::Constant(num_vars, -radius_sq);
  for (int i = 0; i < count; ++i) h += CPoly::AbsSquared(num_vars, i);
  return h;
}

CPOPInstance RandomForm(int n, int degree, std::uint64_t seed, const char* tag) {
  if (n < 1) throw std::invalid_argument("random instances need n >= 1");
  const MonomialBasis basis(n, degree);
  const int s = basis.size();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Eigen::MatrixXd q(s, s);
  for (int p = 0; p < s; ++p) {
    for (int r = p; r < s; ++r) {
      q(p, r) = unif(rng);
      q(r, p) = q(p, r);
    }
  }
  CPOPInstance inst;
  inst.name = std::string(tag) + "-n" + std::to_string(n) + "-s" + std::to_string(seed);
  inst.n = n;
  inst.objective = CPoly(n);
  for (int p = 0; p < s; ++p) {
    for (int r = 0; r < s; ++r) {
      inst.objective.AddTerm({basis[r], basis[p]}, q(p, r));
    }
  }
  inst.eqs.push_back(SphereEquality(n, n, 1.0));
  return inst;
}

// |w|^2 for a polynomial w.
CPoly AbsSq(const CPoly& w) { return w * w.Conjugate(); }

}  // namespace

CPOPInstance RandomQuadratic(int n, std::uint64_t seed) {
  return RandomForm(n, 1, seed, "random-quadratic");
}

CPOPInstance RandomQuartic(int n, std::uint64_t seed) {
  return RandomForm(n, 2, seed, "random-quartic");
}

CPoly SmaleH(int n, int i) {
  const int nv = n + 1;
  // Elementary symmetric polynomials e_0..e_n of z_1..z_n.
  std::vector<CPoly> e(n + 1, CPoly(nv));
  e[0] = CPoly::Constant(nv, 1.0);
  for (int j = 0; j < n; ++j) {
    for (int m = j + 1; m >= 1; --m) e[m] += CPoly::Var(nv, j) * e[m - 1];
  }
  // (n+1) prod (t - z_j) = (n+1) sum_k (-1)^{n-k} e_{n-k} t^k; integrate and
  // divide by t.
  CPoly h(nv);
  const CPoly zi = CPoly::Var(nv, i);
  for (int k = 0; k <= n; ++k) {
    const double sign = (n - k) % 2 == 0 ? 1.0 : -1.0;
    h += e[n - k] * zi.Pow(k) * Complex(sign * (n + 1) / (k + 1.0));
  }
  return h;
}

CPOPInstance Smale(int n) {
  if (n < 2) throw std::invalid_argument("smale needs n >= 2");
  const int nv = n + 1;
  CPOPInstance inst;
  inst.name = "smale-n" + std::to_string(n);
  inst.n = nv;
  inst.sense = Sense::kMaximize;
  inst.value_transform = ValueTransform::kSqrt;
  const CPoly u2 = CPoly::AbsSquared(nv, n);
  inst.objective = u2;
  for (int i = 0; i < n; ++i) {
    inst.ineqs.push_back((AbsSq(SmaleH(n, i)) - u2).HermitianPart());
  }
  CPoly prod = CPoly::Constant(nv, 1.0);
  for (int i = 0; i < n; ++i) prod = prod * CPoly::Var(nv, i);
  const double target = (n % 2 == 0 ? 1.0 : -1.0) / (n + 1);
  inst.complex_eqs.push_back(prod - CPoly::Constant(nv, target));
  inst.eqs.push_back(SphereEquality(nv, n, n * std::pow(1.0 / (n + 1), 2.0 / n)));
  inst.conjectured_optimum = static_cast<double>(n) / (n + 1);
  return inst;
}

CPOPInstance Mordell(int n) {
  if (n < 3 || n > 5) throw std::invalid_argument("mordell needs 3 <= n <= 5");
  const int m = n - 1;
  CPoly s(m);
  for (int i = 0; i < m; ++i) s += CPoly::Var(m, i);
  CPoly f = CPoly::Constant(m, 1.0);
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) f = f * AbsSq(CPoly::Var(m, i) - CPoly::Var(m, j));
  }
  for (int i = 0; i < m; ++i) f = f * AbsSq(CPoly::Var(m, i) + s);
  CPOPInstance inst;
  inst.name = "mordell-n" + std::to_string(n);
  inst.n = m;
  inst.sense = Sense::kMaximize;
  inst.objective = f.HermitianPart();
  inst.eqs.push_back((SphereEquality(m, m, n) + AbsSq(s)).HermitianPart());
  inst.conjectured_optimum = std::pow(n, n);
  return inst;
}

CPoly Autocorrelation(int n, int j, int num_vars) {
  CPoly a(num_vars);
  for (int i = 0; i + j < n; ++i) {
    a += CPoly::Var(num_vars, i) * CPoly::ConjVar(num_vars, i + j);
  }
  return a;
}

CPOPInstance PolyphaseEnergy(int n) {
  if (n < 4) throw std::invalid_argument("polyphase needs n >= 4");
  CPOPInstance inst;
  inst.name = "polyphase-energy-n" + std::to_string(n);
  inst.n = n;
  inst.objective = CPoly(n);
  for (int j = 1; j <= n - 2; ++j) inst.objective += AbsSq(Autocorrelation(n, j, n));
  inst.objective = inst.objective.HermitianPart();
  for (int i = 0; i < n; ++i) {
    inst.eqs.push_back(CPoly::AbsSquared(n, i) - CPoly::Constant(n, 1.0));
  }
  return inst;
}

CPOPInstance PolyphasePeak(int n) {
  if (n < 4) throw std::invalid_argument("polyphase needs n >= 4");
  const int nv = n + 1;
  CPOPInstance inst;
  inst.name = "polyphase-peak-n" + std::to_string(n);
  inst.n = nv;
  inst.value_transform = ValueTransform::kSqrt;
  const CPoly u2 = CPoly::AbsSquared(nv, n);
  inst.objective = u2;
  for (int j = 1; j <= n - 2; ++j) {
    inst.ineqs.push_back((u2 - AbsSq(Autocorrelation(n, j, nv))).HermitianPart());
  }
  for (int i = 0; i < n; ++i) {
    inst.eqs.push_back(CPoly::AbsSquared(nv, i) - CPoly::Constant(nv, 1.0));
  }
  return inst;
}

CPOPInstance UnimodularTriple() {
  const int n = 3;
  auto z = [](int i) { return CPoly::Var(n, i); };
  auto zb = [](int i) { return CPoly::ConjVar(n, i); };
  CPOPInstance inst;
  inst.name = "unimodular-triple";
  inst.n = n;
  inst.objective = z(0) * zb(1) * 0.5 + z(0) * zb(2) * 0.5 + z(1) * zb(0) * 0.5 +
                   z(1) * zb(1) * 0.25 + z(1) * zb(2) * 0.25 + z(2) * zb(0) * 0.5 +
                   z(2) * zb(1) * 0.25 + z(0) + z(1) + z(2) + zb(0) + zb(1) + zb(2);
  for (int i = 0; i < n; ++i) {
    inst.eqs.push_back(CPoly::AbsSquared(n, i) - CPoly::Constant(n, 1.0));
  }
  inst.conjectured_optimum = -3.75;
  return inst;
}

RealPop GapRealPop() {
  RealPop pop;
  pop.m = 4;
  auto mono = [](int a, int b, int c, int d) { return Exponent{a, b, c, d}; };
  pop.objective = RPoly(4);
  pop.objective.AddTerm(mono(0, 0, 0, 0), 3.0);
  pop.objective.AddTerm(mono(2, 0, 0, 0), -1.0);
  pop.objective.AddTerm(mono(0, 0, 2, 0), -1.0);
  pop.objective.AddTerm(mono(1, 2, 0, 0), 1.0);
  pop.objective.AddTerm(mono(0, 1, 1, 1), 2.0);
  pop.objective.AddTerm(mono(1, 0, 0, 2), -1.0);
  RPoly g(4);
  g.AddTerm(mono(0, 1, 0, 0), 1.0);
  pop.ineqs.push_back(g);
  RPoly h1(4);
  h1.AddTerm(mono(2, 0, 0, 0), 1.0);
  h1.AddTerm(mono(0, 0, 2, 0), 3.0);
  h1.AddTerm(mono(0, 0, 0, 0), -2.0);
  RPoly h2(4);
  h2.AddTerm(mono(0, 0, 0, 1), 1.0);
  RPoly h3(4);
  for (int j = 0; j < 4; ++j) {
    Exponent e(4, 0);
    e[j] = 2;
    h3.AddTerm(e, 1.0);
  }
  h3.AddTerm(mono(0, 0, 0, 0), -3.0);
  pop.eqs = {h1, h2, h3};
  return pop;
}

CPOPInstance GapComplex() {
  const int n = 2;
  auto z = [](int i) { return CPoly::Var(n, i); };
  auto zb = [](int i) { return CPoly::ConjVar(n, i); };
  CPOPInstance inst;
  inst.name = "rpop-gap";
  inst.n = n;
  inst.objective = CPoly::Constant(n, 3.0) - CPoly::AbsSquared(n, 0) +
                   z(0) * zb(1) * zb(1) * 0.5 + z(1) * z(1) * zb(0) * 0.5;
  inst.ineqs.push_back(z(1) + zb(1));
  inst.eqs.push_back(CPoly::AbsSquared(n, 0) - z(0) * z(0) * 0.25 -
                     zb(0) * zb(0) * 0.25 - CPoly::Constant(n, 1.0));
  inst.eqs.push_back(z(1) * z(1) + zb(1) * zb(1) - CPoly::AbsSquared(n, 1) * 2.0);
  inst.eqs.push_back(SphereEquality(n, n, 3.0));
  inst.conjectured_optimum = 1.0 - std::sqrt(2.0);
  return inst;
}

std::vector<std::string> FamilyNames() {
  return {"random-quadratic", "random-quartic", "smale", "mordell",
          "polyphase-energy", "polyphase-peak", "unimodular-triple", "rpop-gap"};
}

CPOPInstance MakeFamily(const std::string& family, int n, std::uint64_t seed) {
  if (family == "random-quadratic") return RandomQuadratic(n, seed);
  if (family == "random-quartic") return RandomQuartic(n, seed);
  if (family == "smale") return Smale(n);
  if (family == "mordell") return Mordell(n);
  if (family == "polyphase-energy") return PolyphaseEnergy(n);
  if (family == "polyphase-peak") return PolyphasePeak(n);
  if (family == "unimodular-triple") return UnimodularTriple();
  if (family == "rpop-gap") return GapComplex();
  throw std::invalid_argument("unknown family '" + family + "'");
}

}  // namespace rhsos
