#include "rhsos/poly.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace rhsos {

int Degree(const Exponent& e) { return std::accumulate(e.begin(), e.end(), 0); }

bool GradedLexLess(const Exponent& a, const Exponent& b) {
  const int da = Degree(a);
  const int db = Degree(b);
  if (da != db) return da < db;
  return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
}

bool ExponentPairLess::operator()(const ExponentPair& a,
                                  const ExponentPair& b) const {
  const int da = Degree(a.beta) + Degree(a.gamma);
  const int db = Degree(b.beta) + Degree(b.gamma);
  if (da != db) return da < db;
  if (a.beta != b.beta) return GradedLexLess(a.beta, b.beta);
  return GradedLexLess(a.gamma, b.gamma);
}

namespace {

Complex Pruned(Complex c) {
  double re = std::abs(c.real()) < kPruneTolerance ? 0.0 : c.real();
  double im = std::abs(c.imag()) < kPruneTolerance ? 0.0 : c.imag();
  return {re, im};
}

Complex IntPow(Complex z, int k) {
  Complex r = 1.0;
  for (int i = 0; i < k; ++i) r *= z;
  return r;
}

}  // namespace

CPoly CPoly::Constant(int num_vars, Complex c) {
  CPoly p(num_vars);
  p.AddTerm({Exponent(num_vars, 0), Exponent(num_vars, 0)}, c);
  return p;
}

CPoly CPoly::Var(int num_vars, int i) {
  ExponentPair e{Exponent(num_vars, 0), Exponent(num_vars, 0)};
  e.beta.at(i) = 1;
  return Monomial(e);
}

CPoly CPoly::ConjVar(int num_vars, int i) {
  ExponentPair e{Exponent(num_vars, 0), Exponent(num_vars, 0)};
  e.gamma.at(i) = 1;
  return Monomial(e);
}

CPoly CPoly::AbsSquared(int num_vars, int i) {
  ExponentPair e{Exponent(num_vars, 0), Exponent(num_vars, 0)};
  e.beta.at(i) = 1;
  e.gamma.at(i) = 1;
  return Monomial(e);
}

CPoly CPoly::Monomial(const ExponentPair& e, Complex c) {
  if (e.beta.size() != e.gamma.size()) {
    throw MalformedInput("exponent pair with mismatched lengths");
  }
  CPoly p(e.num_vars());
  p.AddTerm(e, c);
  return p;
}

Complex CPoly::coefficient(const ExponentPair& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? Complex(0.0) : it->second;
}

void CPoly::CheckArity(const ExponentPair& e) const {
  if (static_cast<int>(e.beta.size()) != n_ ||
      static_cast<int>(e.gamma.size()) != n_) {
    throw MalformedInput("monomial arity does not match polynomial arity " +
                         std::to_string(n_));
  }
  for (int v : e.beta) {
    if (v < 0) throw MalformedInput("negative exponent");
  }
  for (int v : e.gamma) {
    if (v < 0) throw MalformedInput("negative exponent");
  }
}

void CPoly::CheckArity(const CPoly& o) const {
  if (o.n_ != n_) {
    throw MalformedInput("polynomial arities differ: " + std::to_string(n_) +
                         " vs " + std::to_string(o.n_));
  }
}

void CPoly::AddTerm(const ExponentPair& e, Complex c) {
  CheckArity(e);
  auto [it, inserted] = terms_.try_emplace(e, 0.0);
  it->second = Pruned(it->second + c);
  if (it->second == Complex(0.0)) terms_.erase(it);
}

CPoly CPoly::Conjugate() const {
  CPoly out(n_);
  for (const auto& [e, c] : terms_) out.terms_.emplace(e.Swapped(), std::conj(c));
  return out;
}

CPoly CPoly::HermitianPart() const {
  CPoly out(n_);
  for (const auto& [e, c] : terms_) {
    const Complex other = coefficient(e.Swapped());
    const Complex v = Pruned((c + std::conj(other)) * 0.5);
    if (v != Complex(0.0)) out.terms_.emplace(e, v);
  }
  for (const auto& [e, c] : terms_) {
    const ExponentPair s = e.Swapped();
    if (terms_.count(s) == 0) {
      const Complex v = Pruned(std::conj(c) * 0.5);
      if (v != Complex(0.0)) out.terms_.emplace(s, v);
    }
  }
  return out;
}

CPoly CPoly::RealCoefficients() const {
  CPoly out(n_);
  for (const auto& [e, c] : terms_) {
    if (c.real() != 0.0) out.terms_.emplace(e, c.real());
  }
  return out;
}

bool CPoly::IsSelfConjugate() const {
  for (const auto& [e, c] : terms_) {
    if (coefficient(e.Swapped()) != std::conj(c)) return false;
  }
  return true;
}

bool CPoly::HasRealCoefficients() const {
  return std::all_of(terms_.begin(), terms_.end(),
                     [](const auto& t) { return t.second.imag() == 0.0; });
}

bool CPoly::HasImaginaryCoefficients() const {
  return std::all_of(terms_.begin(), terms_.end(),
                     [](const auto& t) { return t.second.real() == 0.0; });
}

int CPoly::Degree() const {
  int d = 0;
  for (const auto& [e, c] : terms_) {
    d = std::max({d, rhsos::Degree(e.beta), rhsos::Degree(e.gamma)});
  }
  return d;
}

int CPoly::HolomorphicDegree() const {
  int d = 0;
  for (const auto& [e, c] : terms_) d = std::max(d, rhsos::Degree(e.beta));
  return d;
}

int CPoly::AntiholomorphicDegree() const {
  int d = 0;
  for (const auto& [e, c] : terms_) d = std::max(d, rhsos::Degree(e.gamma));
  return d;
}

Complex CPoly::Evaluate(std::span<const Complex> z) const {
  if (static_cast<int>(z.size()) != n_) {
    throw MalformedInput("evaluation point has wrong dimension");
  }
  Complex total = 0.0;
  for (const auto& [e, c] : terms_) {
    Complex m = c;
    for (int j = 0; j < n_; ++j) {
      if (e.beta[j]) m *= IntPow(z[j], e.beta[j]);
      if (e.gamma[j]) m *= IntPow(std::conj(z[j]), e.gamma[j]);
    }
    total += m;
  }
  return total;
}

CPoly CPoly::ConjDerivative(int i) const {
  CPoly out(n_);
  for (const auto& [e, c] : terms_) {
    if (e.gamma[i] == 0) continue;
    ExponentPair d = e;
    d.gamma[i] -= 1;
    out.AddTerm(d, c * static_cast<double>(e.gamma[i]));
  }
  return out;
}

double CPoly::MaxAbsCoefficient() const {
  double m = 0.0;
  for (const auto& [e, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

CPoly& CPoly::operator+=(const CPoly& o) {
  CheckArity(o);
  for (const auto& [e, c] : o.terms_) AddTerm(e, c);
  return *this;
}

CPoly& CPoly::operator-=(const CPoly& o) {
  CheckArity(o);
  for (const auto& [e, c] : o.terms_) AddTerm(e, -c);
  return *this;
}

CPoly& CPoly::operator*=(Complex s) {
  TermMap scaled;
  for (const auto& [e, c] : terms_) {
    const Complex v = Pruned(c * s);
    if (v != Complex(0.0)) scaled.emplace(e, v);
  }
  terms_ = std::move(scaled);
  return *this;
}

CPoly CPoly::operator-() const { return *this * Complex(-1.0); }

CPoly operator*(const CPoly& a, const CPoly& b) {
  a.CheckArity(b);
  CPoly out(a.n_);
  ExponentPair e{Exponent(a.n_), Exponent(a.n_)};
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      for (int j = 0; j < a.n_; ++j) {
        e.beta[j] = ea.beta[j] + eb.beta[j];
        e.gamma[j] = ea.gamma[j] + eb.gamma[j];
      }
      auto [it, inserted] = out.terms_.try_emplace(e, 0.0);
      it->second += ca * cb;
    }
  }
  for (auto it = out.terms_.begin(); it != out.terms_.end();) {
    it->second = Pruned(it->second);
    it = it->second == Complex(0.0) ? out.terms_.erase(it) : std::next(it);
  }
  return out;
}

CPoly CPoly::Pow(int k) const {
  CPoly out = Constant(n_, 1.0);
  for (int i = 0; i < k; ++i) out = out * *this;
  return out;
}

std::string CPoly::ToString() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  for (const auto& [e, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << "(" << c.real() << (c.imag() < 0 ? "-" : "+") << std::abs(c.imag())
       << "i)";
    for (int j = 0; j < n_; ++j) {
      if (e.beta[j]) os << "*z" << j + 1 << "^" << e.beta[j];
    }
    for (int j = 0; j < n_; ++j) {
      if (e.gamma[j]) os << "*zbar" << j + 1 << "^" << e.gamma[j];
    }
  }
  return os.str();
}

double RPoly::coefficient(const Exponent& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? 0.0 : it->second;
}

void RPoly::AddTerm(const Exponent& e, double c) {
  if (static_cast<int>(e.size()) != m_) {
    throw MalformedInput("monomial arity does not match polynomial arity");
  }
  auto [it, inserted] = terms_.try_emplace(e, 0.0);
  it->second += c;
  if (std::abs(it->second) < kPruneTolerance) terms_.erase(it);
}

int RPoly::Degree() const {
  int d = 0;
  for (const auto& [e, c] : terms_) d = std::max(d, rhsos::Degree(e));
  return d;
}

double RPoly::Evaluate(std::span<const double> x) const {
  double total = 0.0;
  for (const auto& [e, c] : terms_) {
    double m = c;
    for (int j = 0; j < m_; ++j) {
      for (int k = 0; k < e[j]; ++k) m *= x[j];
    }
    total += m;
  }
  return total;
}

bool CPOPInstance::real_coefficients() const {
  auto real = [](const CPoly& p) { return p.HasRealCoefficients(); };
  return objective.HasRealCoefficients() &&
         std::all_of(ineqs.begin(), ineqs.end(), real) &&
         std::all_of(eqs.begin(), eqs.end(), real) &&
         std::all_of(complex_eqs.begin(), complex_eqs.end(), real);
}

bool CPOPInstance::self_conjugate() const {
  auto sc = [](const CPoly& p) { return p.IsSelfConjugate(); };
  return objective.IsSelfConjugate() &&
         std::all_of(ineqs.begin(), ineqs.end(), sc) &&
         std::all_of(eqs.begin(), eqs.end(), sc);
}

void CPOPInstance::Validate() const {
  if (n <= 0) throw MalformedInput("instance must have at least one variable");
  auto check = [&](const CPoly& p, const std::string& what, bool need_sc) {
    if (p.num_vars() != n) {
      throw MalformedInput(what + " has arity " +
                           std::to_string(p.num_vars()) + ", expected " +
                           std::to_string(n));
    }
    if (need_sc && !p.IsSelfConjugate()) {
      throw MalformedInput(what + " is not self-conjugate");
    }
  };
  check(objective, "objective", true);
  for (size_t i = 0; i < ineqs.size(); ++i) {
    check(ineqs[i], "inequality " + std::to_string(i), true);
  }
  for (size_t i = 0; i < eqs.size(); ++i) {
    check(eqs[i], "equality " + std::to_string(i), true);
  }
  for (size_t i = 0; i < complex_eqs.size(); ++i) {
    check(complex_eqs[i], "complex equality " + std::to_string(i), false);
  }
}

CPoly CPOPInstance::MinimizationObjective() const {
  return sense == Sense::kMaximize ? -objective : objective;
}

double CPOPInstance::ReportedValue(double min_form_value) const {
  double v = sense == Sense::kMaximize ? -min_form_value : min_form_value;
  if (value_transform == ValueTransform::kSqrt) v = std::sqrt(std::max(v, 0.0));
  return v;
}

double CPOPInstance::MaxViolation(std::span<const Complex> z) const {
  double worst = 0.0;
  for (const CPoly& g : ineqs) {
    worst = std::max(worst, -g.Evaluate(z).real());
  }
  for (const CPoly& h : eqs) worst = std::max(worst, std::abs(h.Evaluate(z)));
  for (const CPoly& h : complex_eqs) {
    worst = std::max(worst, std::abs(h.Evaluate(z)));
  }
  return worst;
}

bool CPOPInstance::IsFeasible(std::span<const Complex> z, double tol) const {
  return MaxViolation(z) <= tol;
}

DegreeStats ComputeDegreeStats(const CPOPInstance& inst) {
  DegreeStats s;
  s.d_f = inst.objective.Degree();
  int dg = 0;
  int dh = 0;
  for (const CPoly& g : inst.ineqs) {
    s.d_g.push_back(g.Degree());
    dg = std::max(dg, s.d_g.back());
  }
  for (const CPoly& h : inst.eqs) {
    s.d_h.push_back(h.Degree());
    dh = std::max(dh, s.d_h.back());
  }
  for (const CPoly& h : inst.complex_eqs) {
    s.d_h.push_back(h.Degree());
    dh = std::max(dh, s.d_h.back());
  }
  s.d_K = std::max({2, dg, dh});
  s.d_min = std::max({s.d_f, dg, dh});
  return s;
}

namespace {

using CTermMap = std::map<Exponent, Complex, RPoly::Less>;

CTermMap Multiply(const CTermMap& a, const CTermMap& b) {
  CTermMap out;
  for (const auto& [ea, ca] : a) {
    for (const auto& [eb, cb] : b) {
      Exponent e(ea.size());
      for (size_t j = 0; j < e.size(); ++j) e[j] = ea[j] + eb[j];
      out[e] += ca * cb;
    }
  }
  return out;
}

double Binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// (x_j + i x_{n+j})^b (x_j - i x_{n+j})^g over 2n variables.
CTermMap ExpandFactor(int n, int j, int b, int g) {
  CTermMap plus;
  CTermMap minus;
  const Complex I(0.0, 1.0);
  for (int k = 0; k <= b; ++k) {
    Exponent e(2 * n, 0);
    e[j] = b - k;
    e[n + j] = k;
    plus[e] += Binomial(b, k) * std::pow(I, k);
  }
  for (int k = 0; k <= g; ++k) {
    Exponent e(2 * n, 0);
    e[j] = g - k;
    e[n + j] = k;
    minus[e] += Binomial(g, k) * std::pow(-I, k);
  }
  return Multiply(plus, minus);
}

}  // namespace

std::pair<RPoly, RPoly> ExpandToReal(const CPoly& p) {
  const int n = p.num_vars();
  CTermMap total;
  for (const auto& [e, c] : p.terms()) {
    CTermMap acc;
    acc[Exponent(2 * n, 0)] = c;
    for (int j = 0; j < n; ++j) {
      if (e.beta[j] == 0 && e.gamma[j] == 0) continue;
      acc = Multiply(acc, ExpandFactor(n, j, e.beta[j], e.gamma[j]));
    }
    for (const auto& [ex, v] : acc) total[ex] += v;
  }
  RPoly re(2 * n);
  RPoly im(2 * n);
  for (const auto& [ex, v] : total) {
    if (std::abs(v.real()) >= kPruneTolerance) re.AddTerm(ex, v.real());
    if (std::abs(v.imag()) >= kPruneTolerance) im.AddTerm(ex, v.imag());
  }
  return {re, im};
}

namespace {

RPoly RealValued(const CPoly& p, const std::string& what) {
  auto [re, im] = ExpandToReal(p);
  for (const auto& [e, c] : im.terms()) {
    if (std::abs(c) > 1e-12) {
      throw MalformedInput(what + " is not real-valued after expansion");
    }
  }
  return re;
}

}  // namespace

RealPop ToRealPop(const CPOPInstance& inst) {
  RealPop out;
  out.m = 2 * inst.n;
  out.sense = inst.sense;
  out.objective = RealValued(inst.objective, "objective");
  for (const CPoly& g : inst.ineqs) out.ineqs.push_back(RealValued(g, "inequality"));
  for (const CPoly& h : inst.eqs) out.eqs.push_back(RealValued(h, "equality"));
  for (const CPoly& h : inst.complex_eqs) {
    auto [re, im] = ExpandToReal(h);
    if (!re.is_zero()) out.eqs.push_back(re);
    if (!im.is_zero()) out.eqs.push_back(im);
  }
  return out;
}

}  // namespace rhsos
