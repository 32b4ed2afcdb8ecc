#include "rhsos/local_search.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <Eigen/Dense>

namespace rhsos {

namespace {

// Flattened polynomial for repeated evaluation.
class Compiled {
 public:
  explicit Compiled(const CPoly& p) {
    for (const auto& [e, c] : p.terms()) {
      Term t;
      t.coefficient = c;
      for (int j = 0; j < e.num_vars(); ++j) {
        if (e.beta[j] > 0 || e.gamma[j] > 0) t.factors.push_back({j, e.beta[j], e.gamma[j]});
      }
      terms_.push_back(std::move(t));
    }
  }

  Complex operator()(const std::vector<Complex>& z) const {
    Complex sum = 0.0;
    for (const Term& t : terms_) {
      Complex v = t.coefficient;
      for (const Factor& f : t.factors) {
        const Complex zj = z[f.var];
        for (int k = 0; k < f.beta; ++k) v *= zj;
        const Complex cj = std::conj(zj);
        for (int k = 0; k < f.gamma; ++k) v *= cj;
      }
      sum += v;
    }
    return sum;
  }

 private:
  struct Factor {
    int var;
    int beta;
    int gamma;
  };
  struct Term {
    Complex coefficient;
    std::vector<Factor> factors;
  };
  std::vector<Term> terms_;
};

bool InvolvesVar(const CPoly& p, int i) {
  for (const auto& [e, c] : p.terms()) {
    if (e.beta[i] > 0 || e.gamma[i] > 0) return true;
  }
  return false;
}

struct Candidate {
  std::vector<Complex> z;
  double value;
};

// Keeps the `k` best candidates seen so far.
void Offer(std::vector<Candidate>& best, int k, std::vector<Complex> z, double v) {
  if (!std::isfinite(v)) return;
  if (static_cast<int>(best.size()) == k && v >= best.back().value) return;
  best.push_back({std::move(z), v});
  std::sort(best.begin(), best.end(),
            [](const Candidate& a, const Candidate& b) { return a.value < b.value; });
  if (static_cast<int>(best.size()) > k) best.pop_back();
}

LocalResult Finish(const CPOPInstance& inst, std::vector<Complex> z, double min_value) {
  LocalResult r;
  r.point = std::move(z);
  r.min_form_value = min_value;
  r.reported_value = inst.ReportedValue(min_value);
  r.violation = inst.MaxViolation(r.point);
  return r;
}

// ---------------------------------------------------------------------------
// Ellipsoid z^* A z = c.

struct Ellipsoid {
  Eigen::MatrixXcd a;
  double c = 0.0;
};

std::optional<Ellipsoid> DetectEllipsoid(const CPOPInstance& inst) {
  if (!inst.ineqs.empty() || !inst.complex_eqs.empty() || inst.eqs.size() != 1) {
    return std::nullopt;
  }
  const int n = inst.n;
  const CPoly& h = inst.eqs[0];
  Ellipsoid el;
  el.a = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& [e, coeff] : h.terms()) {
    const int db = Degree(e.beta);
    const int dg = Degree(e.gamma);
    if (db == 0 && dg == 0) {
      el.c = -coeff.real();
      continue;
    }
    if (db != 1 || dg != 1) return std::nullopt;
    const int j = static_cast<int>(std::find(e.beta.begin(), e.beta.end(), 1) - e.beta.begin());
    const int i = static_cast<int>(std::find(e.gamma.begin(), e.gamma.end(), 1) - e.gamma.begin());
    el.a(i, j) = coeff;
  }
  if (el.c <= 0.0) return std::nullopt;
  Eigen::LLT<Eigen::MatrixXcd> llt(el.a);
  if (llt.info() != Eigen::Success) return std::nullopt;
  return el;
}

std::vector<Complex> ToVector(const Eigen::VectorXcd& v) {
  return std::vector<Complex>(v.data(), v.data() + v.size());
}

Eigen::VectorXcd Project(const Ellipsoid& el, Eigen::VectorXcd z) {
  const double q = (z.adjoint() * el.a * z)(0).real();
  return z * std::sqrt(el.c / q);
}

std::optional<LocalResult> SearchEllipsoid(const CPOPInstance& inst, const Ellipsoid& el,
                                           const LocalSearchOptions& opt) {
  const int n = inst.n;
  const CPoly f = inst.MinimizationObjective();
  const Compiled value(f);
  std::vector<Compiled> grad;
  for (int i = 0; i < n; ++i) grad.emplace_back(f.ConjDerivative(i));
  auto eval = [&](const Eigen::VectorXcd& z) { return value(ToVector(z)).real(); };

  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> gauss;
  std::vector<Candidate> best;
  for (int s = 0; s < opt.samples; ++s) {
    Eigen::VectorXcd w(n);
    for (int i = 0; i < n; ++i) w(i) = Complex(gauss(rng), gauss(rng));
    w = Project(el, w);
    Offer(best, opt.refine_starts, ToVector(w), eval(w));
  }

  Candidate top{{}, std::numeric_limits<double>::infinity()};
  for (const Candidate& start : best) {
    Eigen::VectorXcd z = Eigen::Map<const Eigen::VectorXcd>(start.z.data(), n);
    double fz = start.value;
    double step = 1.0;
    for (int it = 0; it < 50 * opt.refine_sweeps; ++it) {
      const std::vector<Complex> zv = ToVector(z);
      Eigen::VectorXcd g(n);
      for (int i = 0; i < n; ++i) g(i) = grad[i](zv);
      // Remove the component along the constraint normal.
      const Eigen::VectorXcd normal = el.a * z;
      g -= normal * (normal.dot(g).real() / normal.squaredNorm());
      const double gn = g.squaredNorm();
      if (gn < 1e-26) break;
      bool moved = false;
      for (int bt = 0; bt < 40; ++bt) {
        const Eigen::VectorXcd trial = Project(el, z - step * g);
        const double ft = eval(trial);
        if (ft <= fz - 1e-4 * step * gn) {
          z = trial;
          fz = ft;
          step *= 2.0;
          moved = true;
          break;
        }
        step *= 0.5;
      }
      if (!moved) break;
    }
    if (fz < top.value) top = {ToVector(z), fz};
  }
  if (!std::isfinite(top.value)) return std::nullopt;
  return Finish(inst, top.z, top.value);
}

// ---------------------------------------------------------------------------
// Torus |z_i| = 1 with an optional epigraph variable.

struct Torus {
  std::vector<int> circle_vars;
  int epigraph_var = -1;
  std::vector<CPoly> epigraph_rhs;
};

std::optional<Torus> DetectTorus(const CPOPInstance& inst) {
  if (!inst.complex_eqs.empty() || inst.eqs.empty()) return std::nullopt;
  const int n = inst.n;
  Torus t;
  std::vector<bool> on_circle(n, false);
  for (const CPoly& h : inst.eqs) {
    bool matched = false;
    for (int i = 0; i < n && !matched; ++i) {
      if (h == CPoly::AbsSquared(n, i) - CPoly::Constant(n, 1.0)) {
        if (on_circle[i]) return std::nullopt;
        on_circle[i] = true;
        matched = true;
      }
    }
    if (!matched) return std::nullopt;
  }
  std::vector<int> free_vars;
  for (int i = 0; i < n; ++i) {
    if (on_circle[i]) {
      t.circle_vars.push_back(i);
    } else {
      free_vars.push_back(i);
    }
  }
  if (free_vars.empty()) {
    if (!inst.ineqs.empty()) return std::nullopt;
    return t;
  }
  if (free_vars.size() != 1 || inst.sense != Sense::kMinimize) return std::nullopt;
  const int u = free_vars[0];
  const CPoly u2 = CPoly::AbsSquared(n, u);
  if (!(inst.objective == u2)) return std::nullopt;
  for (const CPoly& g : inst.ineqs) {
    const CPoly q = u2 - g;
    if (InvolvesVar(q, u)) return std::nullopt;
    t.epigraph_rhs.push_back(q);
  }
  t.epigraph_var = u;
  return t;
}

std::optional<LocalResult> SearchTorus(const CPOPInstance& inst, const Torus& torus,
                                       const LocalSearchOptions& opt) {
  const int n = inst.n;
  const Compiled objective(inst.MinimizationObjective());
  std::vector<Compiled> rhs;
  for (const CPoly& q : torus.epigraph_rhs) rhs.emplace_back(q);
  // Objective value, with the epigraph variable set to its smallest
  // feasible modulus.
  auto eval = [&](std::vector<Complex>& z) {
    if (torus.epigraph_var < 0) return objective(z).real();
    double m = 0.0;
    for (const Compiled& q : rhs) m = std::max(m, q(z).real());
    z[torus.epigraph_var] = std::sqrt(m);
    return m;
  };

  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::vector<Candidate> best;
  std::vector<Complex> z(n, Complex(0.0));
  for (int s = 0; s < opt.samples; ++s) {
    for (int i : torus.circle_vars) z[i] = std::polar(1.0, phase(rng));
    const double v = eval(z);
    Offer(best, opt.refine_starts, z, v);
  }

  constexpr int kGrid = 24;
  const double width = 2.0 * std::numbers::pi / kGrid;
  const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
  Candidate top{{}, std::numeric_limits<double>::infinity()};
  for (Candidate c : best) {
    for (int sweep = 0; sweep < opt.refine_sweeps; ++sweep) {
      const double before = c.value;
      for (int i : torus.circle_vars) {
        std::vector<Complex> w = c.z;
        auto at = [&](double theta) {
          w[i] = std::polar(1.0, theta);
          return eval(w);
        };
        double best_theta = std::arg(c.z[i]);
        double best_value = c.value;
        for (int k = 0; k < kGrid; ++k) {
          const double theta = best_theta + k * width;
          const double v = at(theta);
          if (v < best_value) {
            best_value = v;
            best_theta = theta;
          }
        }
        double lo = best_theta - width;
        double hi = best_theta + width;
        double x1 = hi - golden * (hi - lo);
        double x2 = lo + golden * (hi - lo);
        double f1 = at(x1);
        double f2 = at(x2);
        for (int it = 0; it < 40; ++it) {
          if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - golden * (hi - lo);
            f1 = at(x1);
          } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + golden * (hi - lo);
            f2 = at(x2);
          }
        }
        const double mid = 0.5 * (lo + hi);
        const double fm = at(mid);
        if (fm < best_value) {
          best_value = fm;
          best_theta = mid;
        }
        if (best_value < c.value) {
          c.z[i] = std::polar(1.0, best_theta);
          c.value = eval(c.z);
        }
      }
      if (before - c.value <= 1e-13 * (1.0 + std::abs(before))) break;
    }
    if (c.value < top.value) top = c;
  }
  if (!std::isfinite(top.value)) return std::nullopt;
  return Finish(inst, top.z, top.value);
}

}  // namespace

std::optional<LocalResult> LocalUpperBound(const CPOPInstance& inst,
                                           const LocalSearchOptions& options) {
  if (options.samples < 1 || options.refine_starts < 1) {
    throw std::invalid_argument("local search needs at least one sample and start");
  }
  if (auto el = DetectEllipsoid(inst)) return SearchEllipsoid(inst, *el, options);
  if (auto torus = DetectTorus(inst)) return SearchTorus(inst, *torus, options);
  return std::nullopt;
}

}  // namespace rhsos
