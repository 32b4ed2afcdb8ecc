#include "rhsos/extraction.h"

#include <algorithm>
#include <cmath>
#include <random>

namespace rhsos {

std::string ToString(ExtractionStatus s) {
  switch (s) {
    case ExtractionStatus::kExtracted:
      return "extracted";
    case ExtractionStatus::kNoCertificate:
      return "no-certificate";
    case ExtractionStatus::kFailed:
      return "failed";
  }
  return "unknown";
}

RankResult NumericalRank(const Eigen::MatrixXcd& m, double tol) {
  RankResult r;
  if (m.rows() == 0) return r;
  const Eigen::MatrixXcd h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  Eigen::VectorXd sv = es.eigenvalues().cwiseAbs();
  std::sort(sv.data(), sv.data() + sv.size(), std::greater<double>());
  r.singular_values = sv;
  const double cut = tol * std::max(1.0, sv(0));
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) > cut) ++r.rank;
  }
  return r;
}

FlatnessReport CheckFlatness(const MomentSequence& y, int t, int d_k, double tol) {
  if (t - d_k < 0) {
    throw std::invalid_argument("flatness needs t >= d_K");
  }
  if (t > y.order()) {
    throw std::invalid_argument("flatness order exceeds the available moments");
  }
  FlatnessReport rep;
  rep.t = t;
  const RankResult hi = NumericalRank(MomentMatrix(y, t), tol);
  const RankResult lo = NumericalRank(MomentMatrix(y, t - d_k), tol);
  rep.rank_t = hi.rank;
  rep.rank_low = lo.rank;
  rep.flat = hi.rank == lo.rank;
  rep.singular_values = hi.singular_values;
  return rep;
}

std::vector<bool> CheckHyponormality(const MomentSequence& y, int t, int d_k) {
  const int k = t - d_k;
  if (k < 0) throw std::invalid_argument("hyponormality needs t >= d_K");
  if (k + 1 > y.order()) {
    throw std::invalid_argument("hyponormality needs moments of order t-d_K+1");
  }
  const MonomialBasis b(y.n(), k);
  const int s = b.size();
  std::vector<bool> out;
  for (int i = 0; i < y.n(); ++i) {
    Eigen::MatrixXcd g(2 * s, 2 * s);
    for (int p = 0; p < s; ++p) {
      for (int q = 0; q < s; ++q) {
        Exponent bp = b[p];
        Exponent bq = b[q];
        Exponent bpi = bp;
        Exponent bqi = bq;
        bpi[i] += 1;
        bqi[i] += 1;
        g(p, q) = y.at(bp, bq);
        g(p, s + q) = y.at(bp, bqi);
        g(s + p, q) = y.at(bpi, bq);
        g(s + p, s + q) = y.at(bpi, bqi);
      }
    }
    const Eigen::MatrixXcd h = 0.5 * (g + g.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
    const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    out.push_back(es.eigenvalues()(0) >= -1e-8 * scale);
  }
  return out;
}

namespace {

Exponent Unit(int n, int i) {
  Exponent e(n, 0);
  e[i] = 1;
  return e;
}

}  // namespace

AtomicMeasure ExtractRank1(const MomentSequence& y, double tol) {
  const int n = y.n();
  if (y.order() >= 1) {
    const int rank = NumericalRank(MomentMatrix(y, 1), tol).rank;
    if (rank != 1) {
      throw ExtractionFailure("rank-one extraction needs rank M_1 = 1, got " +
                              std::to_string(rank));
    }
  }
  const Exponent zero(n, 0);
  const Complex y00 = y.at(zero, zero);
  if (std::abs(y00) < 1e-12) throw ExtractionFailure("zero mass");
  AtomicMeasure mu;
  mu.n = n;
  std::vector<Complex> z(n);
  for (int i = 0; i < n; ++i) z[i] = y.at(Unit(n, i), zero) / y00;
  mu.atoms.push_back(z);
  mu.weights.push_back(y00.real());
  return mu;
}

ShiftClassification ClassifyShiftPair(const std::vector<Eigen::Matrix2d>& shifts,
                                      double r) {
  double sym_err = 0.0;
  double rot_err = 0.0;
  for (const Eigen::Matrix2d& t : shifts) {
    sym_err = std::max(sym_err, std::abs(t(0, 1) - t(1, 0)));
    rot_err = std::max({rot_err, std::abs(t(0, 0) - t(1, 1)),
                        std::abs(t(0, 1) + t(1, 0))});
  }
  const double tol = 1e-6 * std::max(1.0, std::abs(r));
  if (sym_err <= tol && sym_err <= rot_err) {
    return {ShiftCase::kSymmetric, sym_err};
  }
  if (rot_err <= tol) return {ShiftCase::kRotationScaling, rot_err};
  if (sym_err <= tol) return {ShiftCase::kSymmetric, sym_err};
  throw ExtractionFailure("shift operators fit neither normal form");
}

namespace {

// Factor M_t = V V^* using the leading s eigenpairs.
Eigen::MatrixXcd LeadingFactor(const Eigen::MatrixXcd& m, int s) {
  const Eigen::MatrixXcd h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  const int n = static_cast<int>(h.rows());
  Eigen::MatrixXcd v(n, s);
  for (int k = 0; k < s; ++k) {
    const int idx = n - 1 - k;
    v.col(k) = es.eigenvectors().col(idx) *
               std::sqrt(std::max(es.eigenvalues()(idx), 0.0));
  }
  return v;
}

// Least-squares shifts V_{A+e_i} = V_A T_i on rows |alpha| <= low.
std::vector<Eigen::MatrixXcd> ShiftOperators(const Eigen::MatrixXcd& v,
                                             const MonomialBasis& basis, int low) {
  const int n = basis.n();
  std::vector<int> rows;
  for (int a = 0; a < basis.size(); ++a) {
    if (Degree(basis[a]) <= low) rows.push_back(a);
  }
  Eigen::MatrixXcd va(rows.size(), v.cols());
  for (size_t p = 0; p < rows.size(); ++p) va.row(p) = v.row(rows[p]);
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(va);
  std::vector<Eigen::MatrixXcd> out;
  for (int i = 0; i < n; ++i) {
    Eigen::MatrixXcd vs(rows.size(), v.cols());
    for (size_t p = 0; p < rows.size(); ++p) {
      Exponent e = basis[rows[p]];
      e[i] += 1;
      vs.row(p) = v.row(basis.IndexOf(e));
    }
    out.push_back(cod.solve(vs));
  }
  return out;
}

}  // namespace

std::vector<Eigen::Matrix2d> RealShiftOperators(const MomentSequence& y, int t,
                                                int d_k) {
  const MonomialBasis basis(y.n(), t);
  const Eigen::MatrixXd m = MomentMatrix(y, t).real();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
  const int s = static_cast<int>(m.rows());
  Eigen::MatrixXcd v(s, 2);
  for (int k = 0; k < 2; ++k) {
    v.col(k) = (es.eigenvectors().col(s - 1 - k) *
                std::sqrt(std::max(es.eigenvalues()(s - 1 - k), 0.0)))
                   .cast<Complex>();
  }
  std::vector<Eigen::Matrix2d> out;
  for (const auto& t_i : ShiftOperators(v, basis, t - d_k)) out.push_back(t_i.real());
  return out;
}

MomentSequence SymmetrizeMoments(const MomentSequence& y) {
  MomentSequence out(y.n(), y.order());
  for (const auto& [k, v] : y.values()) out.set(k.beta, k.gamma, v.real());
  return out;
}

AtomicMeasure ConjugatePairFromM1(const MomentSequence& y) {
  const int n = y.n();
  const Eigen::MatrixXd m1 = MomentMatrix(SymmetrizeMoments(y), 1).real();
  if (m1(0, 0) <= 1e-12) throw ExtractionFailure("zero mass");
  const Eigen::VectorXd l0 = m1.col(0) / std::sqrt(m1(0, 0));
  const Eigen::MatrixXd rest = m1 - l0 * l0.transpose();
  int j = 0;
  rest.diagonal().maxCoeff(&j);
  if (rest(j, j) < 1e-8) {
    throw ExtractionFailure("degenerate M_1: second pivot below 1e-8");
  }
  Eigen::VectorXd l1 = rest.col(j) / std::sqrt(rest(j, j));
  for (int i = 0; i < l1.size(); ++i) {
    if (std::abs(l1(i)) > 1e-12) {
      if (l1(i) < 0) l1 = -l1;
      break;
    }
  }
  AtomicMeasure mu;
  mu.n = n;
  std::vector<Complex> z(n);
  for (int i = 0; i < n; ++i) z[i] = Complex(l0(i + 1), l1(i + 1));
  std::vector<Complex> zc(n);
  for (int i = 0; i < n; ++i) zc[i] = std::conj(z[i]);
  mu.atoms = {z, zc};
  mu.weights = {0.5 * m1(0, 0), 0.5 * m1(0, 0)};
  return mu;
}

AtomicMeasure ExtractFlat(const MomentSequence& y, int t, int d_k, double tol) {
  const int n = y.n();
  const FlatnessReport rep = CheckFlatness(y, t, d_k, tol);
  if (!rep.flat) throw ExtractionFailure("moment sequence is not flat");
  const int s = rep.rank_t;
  const MonomialBasis basis(n, t);
  const Eigen::MatrixXcd v = LeadingFactor(MomentMatrix(y, t), s);
  const auto shifts = ShiftOperators(v, basis, t - d_k);

  double norm_scale = 1.0;
  for (const auto& ti : shifts) norm_scale = std::max(norm_scale, ti.norm());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double c =
          (shifts[i] * shifts[j] - shifts[j] * shifts[i]).norm();
      if (c > 1e-5 * norm_scale * norm_scale) {
        throw ExtractionFailure("shift operators do not commute");
      }
    }
  }

  auto atoms_from = [&](unsigned seed, Eigen::MatrixXcd* vp_out) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXcd comb = Eigen::MatrixXcd::Zero(s, s);
    for (int i = 0; i < n; ++i) comb += u(rng) * shifts[i];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comb);
    if (es.info() != Eigen::Success) {
      throw ExtractionFailure("eigendecomposition failed");
    }
    Eigen::MatrixXcd p = es.eigenvectors();
    for (int k = 0; k < s; ++k) p.col(k).normalize();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(p);
    const double cond = svd.singularValues()(0) / svd.singularValues()(s - 1);
    if (!(cond < 1e8)) throw ExtractionFailure("shift operators are defective");
    const Eigen::MatrixXcd p_inv = p.inverse();
    std::vector<std::vector<Complex>> pts(s, std::vector<Complex>(n));
    for (int i = 0; i < n; ++i) {
      const Eigen::MatrixXcd d = p_inv * shifts[i] * p;
      const double off = (d - Eigen::MatrixXcd(d.diagonal().asDiagonal())).norm();
      if (off > 1e-5 * norm_scale) {
        throw ExtractionFailure("shift operators are not jointly diagonalizable");
      }
      for (int k = 0; k < s; ++k) pts[k][i] = d(k, k);
    }
    if (vp_out) *vp_out = v * p;
    return pts;
  };
  Eigen::MatrixXcd vp;
  AtomicMeasure mu;
  mu.n = n;
  mu.atoms = atoms_from(20240611u, &vp);
  for (int k = 0; k < s; ++k) mu.weights.push_back(std::norm(vp(0, k)));

  AtomicMeasure check;
  check.n = n;
  check.atoms = atoms_from(977u, nullptr);
  check.weights.assign(s, 1.0);
  double scale = 1.0;
  for (const auto& a : mu.atoms) {
    for (const Complex& c : a) scale = std::max(scale, std::abs(c));
  }
  if (AtomDistance(mu, check) > 1e-6 * scale) {
    throw ExtractionFailure("eigenvalue pairing differs between combinations");
  }
  return mu;
}

AtomicMeasure ExtractRank2(const MomentSequence& y, int t, int d_k,
                           const std::function<bool(const AtomicMeasure&)>& validate) {
  try {
    AtomicMeasure mu = ConjugatePairFromM1(y);
    if (validate ? validate(mu) : MomentReproductionError(y, mu, t) <= 1e-6) return mu;
  } catch (const ExtractionFailure&) {
  }
  if (y.IsReal(1e-9)) {
    // Classifies first so that a misdetected rank surfaces as a failure.
    ClassifyShiftPair(RealShiftOperators(y, t, d_k), 1.0);
  }
  AtomicMeasure mu = ExtractFlat(y, t, d_k);
  if (validate && !validate(mu)) {
    throw ExtractionFailure("rank-two atoms failed validation");
  }
  return mu;
}

double MomentReproductionError(const MomentSequence& y, const AtomicMeasure& mu,
                               int t) {
  const MomentSequence ym = MomentsOfMeasure(mu, t);
  const MonomialBasis b(y.n(), t);
  double err = 0.0;
  for (int i = 0; i < b.size(); ++i) {
    for (int j = 0; j < b.size(); ++j) {
      err = std::max(err, std::abs(y.at(b[i], b[j]) - ym.at(b[i], b[j])));
    }
  }
  return err;
}

double AtomDistance(const AtomicMeasure& a, const AtomicMeasure& b) {
  auto dist = [](const std::vector<Complex>& p, const std::vector<Complex>& q) {
    double s = 0.0;
    for (size_t i = 0; i < p.size(); ++i) s += std::norm(p[i] - q[i]);
    return std::sqrt(s);
  };
  auto directed = [&](const AtomicMeasure& x, const AtomicMeasure& z) {
    double worst = 0.0;
    for (const auto& p : x.atoms) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& q : z.atoms) best = std::min(best, dist(p, q));
      worst = std::max(worst, best);
    }
    return worst;
  };
  if (a.atoms.empty() || b.atoms.empty()) {
    return a.atoms.empty() && b.atoms.empty()
               ? 0.0
               : std::numeric_limits<double>::infinity();
  }
  return std::max(directed(a, b), directed(b, a));
}

namespace {

struct Validator {
  const LMIProgram& prog;
  double bound_min;  // minimization-form bound

  AtomCheck Check(const std::vector<Complex>& z, double w) const {
    AtomCheck c;
    c.point = z;
    c.weight = w;
    if (prog.instance.n > 0) {
      c.violation = prog.instance.MaxViolation(z);
      const double fz = prog.instance.objective.Evaluate(z).real();
      c.objective = fz;
    } else {
      const RealPop& pop = prog.real_pop;
      const int n = pop.m / 2;
      std::vector<double> x(pop.m);
      for (int j = 0; j < n; ++j) {
        x[j] = z[j].real();
        x[n + j] = z[j].imag();
      }
      for (const RPoly& g : pop.ineqs) c.violation = std::max(c.violation, -g.Evaluate(x));
      for (const RPoly& h : pop.eqs) {
        c.violation = std::max(c.violation, std::abs(h.Evaluate(x)));
      }
      c.objective = pop.objective.Evaluate(x);
    }
    return c;
  }

  bool Sense() const {
    return (prog.instance.n > 0 ? prog.instance.sense : prog.real_pop.sense) ==
           Sense::kMaximize;
  }

  bool Accept(const AtomCheck& c) const {
    const double f_min = Sense() ? -c.objective : c.objective;
    return c.violation <= 1e-4 &&
           std::abs(f_min - bound_min) <= 1e-3 * (1.0 + std::abs(bound_min));
  }

  bool AcceptAll(const AtomicMeasure& mu) const {
    if (mu.atoms.empty()) return false;
    for (int k = 0; k < mu.size(); ++k) {
      if (!Accept(Check(mu.atoms[k], mu.weights[k]))) return false;
    }
    return true;
  }
};

}  // namespace

ExtractionResult AnalyzeSolution(const LMIProgram& prog, const SdpSolution& sol,
                                 double rank_tol) {
  ExtractionResult res;
  const MomentSequence y = MomentsFromSolution(prog, sol.y);
  const int r = prog.order;
  int d_min = 1;
  int d_k = 2;
  if (prog.instance.n > 0) {
    const DegreeStats ds = ComputeDegreeStats(prog.instance);
    d_min = ds.d_min;
    d_k = ds.d_K;
  } else {
    int dmax = (prog.real_pop.objective.Degree() + 1) / 2;
    int dc = 0;
    for (const RPoly& g : prog.real_pop.ineqs) dc = std::max(dc, (g.Degree() + 1) / 2);
    for (const RPoly& h : prog.real_pop.eqs) dc = std::max(dc, (h.Degree() + 1) / 2);
    d_min = std::max(dmax, dc);
    d_k = std::max(2, dc);
  }
  d_min = std::max(d_min, 1);
  Validator val{prog, sol.sos_objective};

  auto finish = [&](const AtomicMeasure& mu, const std::string& method) {
    res.measure = mu;
    res.method = method;
    res.atoms.clear();
    bool ok = !mu.atoms.empty();
    for (int k = 0; k < mu.size(); ++k) {
      res.atoms.push_back(val.Check(mu.atoms[k], mu.weights[k]));
      ok = ok && val.Accept(res.atoms.back());
    }
    res.status = ok ? ExtractionStatus::kExtracted : ExtractionStatus::kFailed;
    if (!ok) res.message = "extracted atoms failed feasibility/objective validation";
    return ok;
  };

  try {
    for (int t = d_min; t <= r; ++t) {
      if (NumericalRank(MomentMatrix(y, t), rank_tol).rank == 1) {
        finish(ExtractRank1(y, rank_tol), "rank-one");
        return res;
      }
    }
    const bool real_moments = y.IsReal(1e-9);
    for (int t = std::max(d_k, d_min); t <= r; ++t) {
      FlatnessReport rep = CheckFlatness(y, t, d_k, rank_tol);
      const bool flat = rep.flat;
      const int s = rep.rank_t;
      if (flat && s > 2) {
        const auto hypo = CheckHyponormality(y, t, d_k);
        rep.hyponormal = std::all_of(hypo.begin(), hypo.end(), [](bool b) { return b; });
      }
      res.flatness.push_back(rep);
      if (!flat) continue;
      if (s == 1) {
        finish(ExtractRank1(y, rank_tol), "rank-one");
      } else if (s == 2) {
        AtomicMeasure mu = ExtractRank2(
            real_moments ? y : y, t, d_k,
            [&](const AtomicMeasure& m) { return val.AcceptAll(m); });
        finish(mu, "rank-two");
      } else {
        if (!*res.flatness.back().hyponormal) {
          res.status = ExtractionStatus::kNoCertificate;
          res.message = "flat but not hyponormal";
          return res;
        }
        finish(ExtractFlat(y, t, d_k, rank_tol), "flat");
      }
      return res;
    }
    // No flat order: the first-order conjugate-pair factorization can still
    // produce certified atoms when M_1 has rank two.
    if (NumericalRank(MomentMatrix(SymmetrizeMoments(y), 1), rank_tol).rank == 2) {
      AtomicMeasure mu = ConjugatePairFromM1(y);
      if (val.AcceptAll(mu)) {
        finish(mu, "conjugate-pair");
        return res;
      }
    }
  } catch (const ExtractionFailure& e) {
    res.status = ExtractionStatus::kFailed;
    res.message = e.what();
    return res;
  }
  res.status = ExtractionStatus::kNoCertificate;
  res.message = "no certificate of optimality";
  return res;
}

}  // namespace rhsos
