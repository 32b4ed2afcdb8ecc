#include "rhsos/certificate.h"

#include <algorithm>
#include <cmath>

namespace rhsos {

namespace {

Exponent Sum(const Exponent& a, const Exponent& b) {
  Exponent e(a.size());
  for (size_t j = 0; j < a.size(); ++j) e[j] = a[j] + b[j];
  return e;
}

Eigen::MatrixXcd HermitianGram(const Eigen::MatrixXd& x, bool embedded) {
  if (!embedded) return x.cast<Complex>();
  const int s = static_cast<int>(x.rows() / 2);
  const Eigen::MatrixXd re = x.topLeftCorner(s, s) + x.bottomRightCorner(s, s);
  const Eigen::MatrixXd im = x.bottomLeftCorner(s, s) - x.topRightCorner(s, s);
  Eigen::MatrixXcd g(s, s);
  g.real() = re;
  g.imag() = im;
  return g;
}

double MinEigenvalue(const Eigen::MatrixXcd& g) {
  if (g.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (g + g.adjoint()),
                                                     Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

// Real-POP polynomial pieces are accumulated in a plain map.
using RealTerms = std::map<Exponent, double, RPoly::Less>;

void AddProduct(RealTerms& acc, double w, const Exponent& mono, const RPoly& p) {
  for (const auto& [e, c] : p.terms()) acc[Sum(mono, e)] += w * c;
}

double RealPopResidual(const LMIProgram& prog, const Certificate& cert) {
  const RealPop& pop = prog.real_pop;
  RealTerms acc;
  const double sign = pop.sense == Sense::kMaximize ? -1.0 : 1.0;
  for (const auto& [e, c] : pop.objective.terms()) acc[e] += sign * c;
  acc[Exponent(pop.m, 0)] -= cert.gamma;
  RPoly one(pop.m);
  one.AddTerm(Exponent(pop.m, 0), 1.0);
  for (const GramBlock& b : cert.blocks) {
    const RPoly& g = b.constraint < 0 ? one : pop.ineqs[b.constraint];
    const int s = static_cast<int>(b.basis.size());
    for (int p = 0; p < s; ++p) {
      for (int q = 0; q < s; ++q) {
        const double w = b.gram(p, q).real();
        if (w != 0.0) AddProduct(acc, -w, Sum(b.basis[p], b.basis[q]), g);
      }
    }
  }
  for (size_t j = 0; j < cert.real_equality_multipliers.size(); ++j) {
    for (const auto& [e, c] : cert.real_equality_multipliers[j].terms()) {
      AddProduct(acc, -c, e, pop.eqs[j]);
    }
  }
  double r = 0.0;
  for (const auto& [e, c] : acc) r = std::max(r, std::abs(c));
  return r;
}

double ObjectiveScale(const LMIProgram& prog) {
  if (prog.hierarchy == Hierarchy::kRealPop) {
    double s = 0.0;
    for (const auto& [e, c] : prog.real_pop.objective.terms()) {
      s = std::max(s, std::abs(c));
    }
    return s;
  }
  return prog.instance.objective.MaxAbsCoefficient();
}

}  // namespace

void EvaluateCertificate(const LMIProgram& prog, Certificate& cert) {
  cert.scale = ObjectiveScale(prog);
  cert.residual = CertificateResidual(prog, cert);
  cert.min_gram_eigenvalue = cert.blocks.empty() ? 0.0 : MinEigenvalue(cert.blocks[0].gram);
  for (const GramBlock& b : cert.blocks) {
    cert.min_gram_eigenvalue = std::min(cert.min_gram_eigenvalue, MinEigenvalue(b.gram));
  }
  const double s = std::max(1.0, cert.scale);
  cert.valid = cert.residual <= 1e-6 * s && cert.min_gram_eigenvalue >= -1e-8 * s;
}

CPoly GramPolynomial(const GramBlock& block) {
  const int n = block.basis.empty() ? 0 : static_cast<int>(block.basis[0].size());
  CPoly sigma(n);
  const int s = static_cast<int>(block.basis.size());
  for (int p = 0; p < s; ++p) {
    for (int q = 0; q < s; ++q) {
      const Complex w = block.gram(p, q);
      if (w != Complex(0.0)) sigma.AddTerm({block.basis[q], block.basis[p]}, w);
    }
  }
  return sigma;
}

Certificate RecoverCertificate(const LMIProgram& prog, const SdpSolution& sol) {
  Certificate cert;
  cert.hierarchy = prog.hierarchy;
  if (sol.gram.size() != prog.blocks.size() ||
      sol.multipliers.size() != static_cast<long>(prog.equality_origins.size())) {
    throw std::invalid_argument("solution does not match the relaxation");
  }
  for (size_t k = 0; k < prog.blocks.size(); ++k) {
    const BlockInfo& info = prog.blocks[k];
    cert.blocks.push_back({info.constraint, info.basis,
                           HermitianGram(sol.gram[k], info.embedded)});
  }
  const bool rpop = prog.hierarchy == Hierarchy::kRealPop;
  if (rpop) {
    const int m = prog.real_pop.m;
    cert.real_equality_multipliers.assign(prog.real_pop.eqs.size(), RPoly(m));
  } else {
    const int n = prog.instance.n;
    cert.equality_multipliers.assign(
        prog.instance.eqs.size() + prog.instance.complex_eqs.size(), CPoly(n));
  }
  for (size_t j = 0; j < prog.equality_origins.size(); ++j) {
    // Merged rows are identical, so the first origin represents the row.
    const EqualityOrigin& o = prog.equality_origins[j].front();
    const double lambda = sol.multipliers(static_cast<long>(j));
    if (o.constraint < 0) {
      cert.gamma += lambda / o.scale;
      continue;
    }
    const double w = lambda / o.scale;
    if (rpop) {
      cert.real_equality_multipliers[o.constraint].AddTerm(Sum(o.beta, o.gamma), w);
      continue;
    }
    const Complex c = o.imaginary_part ? Complex(0.0, -0.5 * w) : Complex(0.5 * w);
    cert.equality_multipliers[o.constraint].AddTerm({o.beta, o.gamma}, c);
  }
  EvaluateCertificate(prog, cert);
  return cert;
}

Certificate SymmetrizeCertificate(const LMIProgram& prog, const Certificate& cert) {
  Certificate out = cert;
  out.hierarchy = prog.hierarchy;
  for (GramBlock& b : out.blocks) b.gram = b.gram.real().cast<Complex>();
  for (CPoly& tau : out.equality_multipliers) tau = tau.RealCoefficients();
  EvaluateCertificate(prog, out);
  return out;
}

CPoly CertificateRemainder(const LMIProgram& prog, const Certificate& cert) {
  if (prog.hierarchy == Hierarchy::kRealPop) {
    throw std::invalid_argument("remainder polynomial is defined for z-hierarchies");
  }
  const CPOPInstance& inst = prog.instance;
  const int n = inst.n;
  CPoly rem = inst.MinimizationObjective();
  rem -= CPoly::Constant(n, cert.gamma);
  for (const GramBlock& b : cert.blocks) {
    const CPoly sigma = GramPolynomial(b);
    if (b.constraint < 0) {
      rem -= sigma;
    } else {
      rem -= sigma * inst.ineqs[b.constraint];
    }
  }
  const size_t n_real = inst.eqs.size();
  for (size_t j = 0; j < cert.equality_multipliers.size(); ++j) {
    const CPoly& h = j < n_real ? inst.eqs[j] : inst.complex_eqs[j - n_real];
    const CPoly th = cert.equality_multipliers[j] * h;
    rem -= th;
    rem -= th.Conjugate();
  }
  if (prog.hierarchy == Hierarchy::kReal) {
    // Swap exponents without conjugating coefficients.
    CPoly swapped(n);
    for (const auto& [e, c] : rem.terms()) swapped.AddTerm(e.Swapped(), c);
    rem = (rem + swapped) * Complex(0.5);
  }
  return rem;
}

double CertificateResidual(const LMIProgram& prog, const Certificate& cert) {
  if (prog.hierarchy == Hierarchy::kRealPop) return RealPopResidual(prog, cert);
  return CertificateRemainder(prog, cert).MaxAbsCoefficient();
}

}  // namespace rhsos
