#include "rhsos/sdp_solver.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <stdexcept>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>

namespace rhsos {

std::string ToString(SdpStatus s) {
  switch (s) {
    case SdpStatus::kOptimal:
      return "optimal";
    case SdpStatus::kNearOptimal:
      return "near-optimal";
    case SdpStatus::kMaxIterations:
      return "max-iterations";
    case SdpStatus::kInfeasibleSuspected:
      return "infeasible-suspected";
    case SdpStatus::kNumericalFailure:
      return "numerical-failure";
  }
  return "unknown";
}

Eigen::MatrixXd EvaluateBlock(const SdpBlock& block, const Eigen::VectorXd& y) {
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(block.size, block.size);
  for (const BlockEntry& e : block.entries) {
    const double v = e.var < 0 ? e.value : e.value * y(e.var);
    s(e.row, e.col) += v;
    if (e.row != e.col) s(e.col, e.row) += v;
  }
  return s;
}

FeasibilityReport CertifyFeasibility(const SdpProblem& problem,
                                     const Eigen::VectorXd& y) {
  FeasibilityReport r;
  r.min_eigenvalue = std::numeric_limits<double>::infinity();
  for (const SdpBlock& b : problem.blocks) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(EvaluateBlock(b, y),
                                                      Eigen::EigenvaluesOnly);
    const double lo = b.size > 0 ? es.eigenvalues()(0) : 0.0;
    r.min_eigenvalues.push_back(lo);
    r.min_eigenvalue = std::min(r.min_eigenvalue, lo);
  }
  for (const LinearEquality& eq : problem.equalities) {
    double v = -eq.rhs;
    for (const auto& [i, a] : eq.terms) v += a * y(i);
    r.max_equality_violation = std::max(r.max_equality_violation, std::abs(v));
  }
  r.objective = problem.cost.dot(y) + problem.cost_constant;
  return r;
}

void WriteSdpDump(const SdpProblem& problem, std::ostream& out) {
  out << std::setprecision(17);
  out << "vars " << problem.num_vars << "\n";
  out << "blocks " << problem.blocks.size() << "\n";
  out << "equalities " << problem.equalities.size() << "\n";
  out << "constant " << problem.cost_constant << "\n";
  for (int i = 0; i < problem.num_vars; ++i) {
    if (problem.cost(i) != 0.0) out << "c " << i << " " << problem.cost(i) << "\n";
  }
  for (size_t k = 0; k < problem.blocks.size(); ++k) {
    const SdpBlock& b = problem.blocks[k];
    out << "block " << k << " " << b.size << "\n";
    for (const BlockEntry& e : b.entries) {
      out << "F " << k << " " << e.var << " " << e.row << " " << e.col << " "
          << e.value << "\n";
    }
  }
  for (size_t j = 0; j < problem.equalities.size(); ++j) {
    const LinearEquality& eq = problem.equalities[j];
    for (const auto& [i, a] : eq.terms) {
      out << "E " << j << " " << i << " " << a << "\n";
    }
    out << "b " << j << " " << eq.rhs << "\n";
  }
}

namespace {

using Clock = std::chrono::steady_clock;

// Union-find over variables with optional fixed values at the roots.
class VariableClasses {
 public:
  explicit VariableClasses(int m) : parent_(m), fixed_(m) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  int Find(int i) {
    while (parent_[i] != i) {
      parent_[i] = parent_[parent_[i]];
      i = parent_[i];
    }
    return i;
  }

  const std::optional<double>& fixed(int root) const { return fixed_[root]; }

  // Returns false on an inconsistent assignment.
  bool Fix(int root, double value) {
    if (fixed_[root]) return Close(*fixed_[root], value);
    fixed_[root] = value;
    return true;
  }

  bool Merge(int a, int b) {
    a = Find(a);
    b = Find(b);
    if (a == b) return true;
    if (fixed_[a] && fixed_[b] && !Close(*fixed_[a], *fixed_[b])) return false;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
    if (!fixed_[a]) fixed_[a] = fixed_[b];
    return true;
  }

 private:
  static bool Close(double a, double b) {
    return std::abs(a - b) <= 1e-9 * (1.0 + std::abs(a));
  }

  std::vector<int> parent_;
  std::vector<std::optional<double>> fixed_;
};

struct SparseRow {
  std::vector<std::pair<int, double>> terms;
  double rhs = 0.0;
};

// Rewrites an original equality over class roots, moving fixed roots to the
// right-hand side and dropping negligible coefficients.
SparseRow ReduceRow(const LinearEquality& eq, VariableClasses& classes) {
  std::map<int, double> acc;
  double rhs = eq.rhs;
  double scale = 0.0;
  for (const auto& [i, a] : eq.terms) {
    const int r = classes.Find(i);
    scale = std::max(scale, std::abs(a));
    if (classes.fixed(r)) {
      rhs -= a * *classes.fixed(r);
    } else {
      acc[r] += a;
    }
  }
  SparseRow out;
  out.rhs = rhs;
  for (const auto& [r, a] : acc) {
    if (std::abs(a) > 1e-13 * scale) out.terms.emplace_back(r, a);
  }
  return out;
}

struct ClassEntry {
  int row;
  int col;
  double value;
};

// Block data in class (merged variable) space.
struct ClassBlock {
  int size = 0;
  Eigen::MatrixXd constant;
  std::vector<int> vars;
  std::vector<std::vector<ClassEntry>> coeffs;
};

double EntryWeight(const ClassEntry& e) { return e.row == e.col ? 0.5 : 1.0; }

// Reduced problem seen by the interior-point iterations. Class variables are
// ordered so that the ones free of remaining equalities come first; the rest
// are parametrized as y_T = base_T + null_T * w in elimination mode.
struct ReducedProblem {
  int num_classes = 0;
  int num_free = 0;  // leading classes mapped by identity
  Eigen::MatrixXd null_t;
  Eigen::VectorXd base;  // particular class vector
  std::vector<ClassBlock> blocks;
  Eigen::VectorXd cost_class;
  double cost_constant = 0.0;
  // KKT-mode equality rows over v.
  Eigen::MatrixXd eq_v;
  Eigen::VectorXd eq_rhs;

  int num_v() const {
    return num_free + static_cast<int>(null_t.cols());
  }

  // v -> class direction (without the base).
  Eigen::VectorXd ToClass(const Eigen::VectorXd& v) const {
    Eigen::VectorXd c(num_classes);
    c.head(num_free) = v.head(num_free);
    if (num_classes > num_free) {
      c.tail(num_classes - num_free) = null_t * v.tail(null_t.cols());
    }
    return c;
  }

  // Transpose of ToClass.
  Eigen::VectorXd FromClass(const Eigen::VectorXd& g) const {
    Eigen::VectorXd v(num_v());
    v.head(num_free) = g.head(num_free);
    if (null_t.cols() > 0) {
      v.tail(null_t.cols()) =
          null_t.transpose() * g.tail(num_classes - num_free);
    }
    return v;
  }

  // sum_c d_c F_{k,c} for every block.
  std::vector<Eigen::MatrixXd> Adjoint(const Eigen::VectorXd& d_class) const {
    std::vector<Eigen::MatrixXd> out;
    out.reserve(blocks.size());
    for (const ClassBlock& b : blocks) {
      Eigen::MatrixXd m = Eigen::MatrixXd::Zero(b.size, b.size);
      for (size_t q = 0; q < b.vars.size(); ++q) {
        const double d = d_class(b.vars[q]);
        if (d == 0.0) continue;
        for (const ClassEntry& e : b.coeffs[q]) {
          m(e.row, e.col) += d * e.value;
          if (e.row != e.col) m(e.col, e.row) += d * e.value;
        }
      }
      out.push_back(std::move(m));
    }
    return out;
  }

  // (sum_k <F_{k,c}, X_k>)_c.
  Eigen::VectorXd Apply(const std::vector<Eigen::MatrixXd>& x) const {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(num_classes);
    for (size_t k = 0; k < blocks.size(); ++k) {
      const ClassBlock& b = blocks[k];
      for (size_t q = 0; q < b.vars.size(); ++q) {
        double s = 0.0;
        for (const ClassEntry& e : b.coeffs[q]) {
          s += e.row == e.col ? e.value * x[k](e.row, e.row)
                              : e.value * (x[k](e.row, e.col) + x[k](e.col, e.row));
        }
        g(b.vars[q]) += s;
      }
    }
    return g;
  }
};

double Inner(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a.array() * b.array()).sum();
}

// Largest step keeping x + alpha * dx positive semidefinite (capped).
double MaxStep(const Eigen::MatrixXd& x, const Eigen::MatrixXd& dx) {
  if (x.rows() == 0) return 1e30;
  Eigen::LLT<Eigen::MatrixXd> llt(x);
  if (llt.info() != Eigen::Success) return 0.0;
  Eigen::MatrixXd l_inv_dx = llt.matrixL().solve(dx);
  Eigen::MatrixXd b = llt.matrixL().solve(l_inv_dx.transpose());
  b = 0.5 * (b + b.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues()(0);
  return lo >= 0.0 ? 1e30 : -1.0 / lo;
}

struct Scaling {
  Eigen::MatrixXd g;
  Eigen::MatrixXd g_inv;
  Eigen::MatrixXd w;
  Eigen::VectorXd lambda;
};

std::optional<Scaling> NtScaling(const Eigen::MatrixXd& x,
                                 const Eigen::MatrixXd& s) {
  Scaling sc;
  const int n = static_cast<int>(x.rows());
  if (n == 0) return sc;
  Eigen::LLT<Eigen::MatrixXd> lx(x);
  Eigen::LLT<Eigen::MatrixXd> ls(s);
  if (lx.info() != Eigen::Success || ls.info() != Eigen::Success) {
    return std::nullopt;
  }
  const Eigen::MatrixXd lxm = lx.matrixL();
  const Eigen::MatrixXd lsm = ls.matrixL();
  const Eigen::MatrixXd prod = lsm.transpose() * lxm;
  Eigen::MatrixXd v;
  if (n <= 64) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(prod, Eigen::ComputeFullV);
    sc.lambda = svd.singularValues();
    v = svd.matrixV();
  } else {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(prod, Eigen::ComputeFullV);
    sc.lambda = svd.singularValues();
    v = svd.matrixV();
  }
  if (sc.lambda.minCoeff() <= 0.0) return std::nullopt;
  const Eigen::VectorXd inv_sqrt = sc.lambda.array().rsqrt();
  sc.g = lxm * v * inv_sqrt.asDiagonal();
  // g^{-1} = diag(sqrt(lambda)) v' lx^{-1}
  Eigen::MatrixXd lx_inv_t =
      lxm.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(n, n));
  sc.g_inv = sc.lambda.array().sqrt().matrix().asDiagonal() * v.transpose() *
             lx_inv_t;
  sc.w = sc.g * sc.g.transpose();
  sc.w = 0.5 * (sc.w + sc.w.transpose());
  return sc;
}

// Schur matrix in class space: M_ij = sum_k <F_{k,i}, W_k F_{k,j} W_k>.
Eigen::MatrixXd SchurClass(const ReducedProblem& rp,
                           const std::vector<Scaling>& sc) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rp.num_classes, rp.num_classes);
  for (size_t k = 0; k < rp.blocks.size(); ++k) {
    const ClassBlock& b = rp.blocks[k];
    const Eigen::MatrixXd& w = sc[k].w;
    const size_t nv = b.vars.size();
    for (size_t qi = 0; qi < nv; ++qi) {
      const auto& fi = b.coeffs[qi];
      for (size_t qj = qi; qj < nv; ++qj) {
        const auto& fj = b.coeffs[qj];
        double s = 0.0;
        for (const ClassEntry& e : fi) {
          const double we = EntryWeight(e) * e.value;
          for (const ClassEntry& f : fj) {
            s += we * EntryWeight(f) * f.value *
                 (w(e.col, f.row) * w(e.row, f.col) +
                  w(e.col, f.col) * w(f.row, e.row));
          }
        }
        s *= 2.0;
        const int ci = b.vars[qi];
        const int cj = b.vars[qj];
        m(ci, cj) += s;
        if (ci != cj) m(cj, ci) += s;
      }
    }
  }
  return m;
}

Eigen::MatrixXd SchurV(const ReducedProblem& rp, const Eigen::MatrixXd& mc) {
  const int f = rp.num_free;
  const int t = rp.num_classes - f;
  const int nw = static_cast<int>(rp.null_t.cols());
  if (nw == 0 && t == 0) return mc;
  Eigen::MatrixXd mv(f + nw, f + nw);
  mv.topLeftCorner(f, f) = mc.topLeftCorner(f, f);
  const Eigen::MatrixXd mtn = mc.bottomRightCorner(t, t) * rp.null_t;
  const Eigen::MatrixXd cross = mc.topRightCorner(f, t) * rp.null_t;
  mv.topRightCorner(f, nw) = cross;
  mv.bottomLeftCorner(nw, f) = cross.transpose();
  mv.bottomRightCorner(nw, nw) = rp.null_t.transpose() * mtn;
  return mv;
}

// Solves the Newton system for (dv, dlam) given the Schur factorization.
// The Schur matrix is factored after symmetric diagonal scaling to unit
// diagonal, which keeps the Cholesky pivots comparable late in the run.
struct NewtonSolver {
  Eigen::LLT<Eigen::MatrixXd> llt;
  Eigen::VectorXd dscale;  // D^{-1/2}
  Eigen::MatrixXd m;
  Eigen::MatrixXd eq;  // KKT rows
  Eigen::LDLT<Eigen::MatrixXd> reduced;  // eq M^{-1} eq'
  Eigen::MatrixXd m_inv_eq_t;
  double reg = 0.0;

  Eigen::MatrixXd SolveM(const Eigen::MatrixXd& rhs) const {
    Eigen::MatrixXd t = dscale.asDiagonal() * rhs;
    t = llt.solve(t);
    return dscale.asDiagonal() * t;
  }

  bool Factor(const Eigen::MatrixXd& schur, const Eigen::MatrixXd& eq_rows) {
    m = schur;
    eq = eq_rows;
    const int n = static_cast<int>(m.rows());
    if (n == 0) return eq.rows() == 0;
    const double diag_max = std::max(m.diagonal().cwiseAbs().maxCoeff(), 1e-300);
    dscale.resize(n);
    for (int i = 0; i < n; ++i) {
      dscale(i) = 1.0 / std::sqrt(std::max(m(i, i), 1e-30 * diag_max));
    }
    const Eigen::MatrixXd scaled = dscale.asDiagonal() * m * dscale.asDiagonal();
    reg = 0.0;
    for (int attempt = 0; attempt < 10; ++attempt) {
      Eigen::MatrixXd mm = scaled;
      if (reg > 0.0) mm.diagonal().array() += reg;
      llt.compute(mm);
      if (llt.info() == Eigen::Success) break;
      reg = reg == 0.0 ? 1e-14 : reg * 10.0;
    }
    if (llt.info() != Eigen::Success) return false;
    if (eq.rows() > 0) {
      m_inv_eq_t = SolveM(eq.transpose());
      reduced.compute(eq * m_inv_eq_t);
      if (reduced.info() != Eigen::Success) return false;
    }
    return true;
  }

  // [M, -E'; E, 0] [dv; dl] = [h; re]
  void Solve(const Eigen::VectorXd& h, const Eigen::VectorXd& re,
             Eigen::VectorXd& dv, Eigen::VectorXd& dl) const {
    if (m.rows() == 0) {
      dv.resize(0);
      dl = Eigen::VectorXd::Zero(eq.rows());
      return;
    }
    auto solve_once = [&](const Eigen::VectorXd& rh, const Eigen::VectorXd& rr,
                          Eigen::VectorXd& x, Eigen::VectorXd& l) {
      Eigen::VectorXd mh = SolveM(rh);
      if (eq.rows() > 0) {
        l = reduced.solve(rr - eq * mh);
        x = mh + m_inv_eq_t * l;
      } else {
        l.resize(0);
        x = mh;
      }
    };
    solve_once(h, re, dv, dl);
    // One round of iterative refinement against the unregularized system.
    Eigen::VectorXd r1 = h - m * dv;
    if (eq.rows() > 0) r1 += eq.transpose() * dl;
    Eigen::VectorXd r2 = eq.rows() > 0 ? Eigen::VectorXd(re - eq * dv)
                                       : Eigen::VectorXd(0);
    Eigen::VectorXd cx;
    Eigen::VectorXd cl;
    solve_once(r1, r2, cx, cl);
    dv += cx;
    if (eq.rows() > 0) dl += cl;
  }
};

struct Presolved {
  bool inconsistent = false;
  std::string message;
  ReducedProblem rp;
  std::vector<int> class_of;  // original var -> class, -1 if fixed
  std::vector<double> fixed_value;
  bool kkt = false;
};

Presolved RunPresolve(const SdpProblem& p, EqualityMode mode) {
  Presolved out;
  const int m = p.num_vars;
  VariableClasses classes(m);
  std::vector<char> consumed(p.equalities.size(), 0);
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t j = 0; j < p.equalities.size(); ++j) {
      if (consumed[j]) continue;
      SparseRow r = ReduceRow(p.equalities[j], classes);
      const double scale = 1.0 + std::abs(p.equalities[j].rhs);
      if (r.terms.empty()) {
        if (std::abs(r.rhs) > 1e-9 * scale) {
          out.inconsistent = true;
          out.message = "equality constraints are inconsistent";
          return out;
        }
        consumed[j] = 1;
        continue;
      }
      if (r.terms.size() == 1) {
        if (!classes.Fix(r.terms[0].first, r.rhs / r.terms[0].second)) {
          out.inconsistent = true;
          out.message = "conflicting fixed values";
          return out;
        }
        consumed[j] = 1;
        changed = true;
        continue;
      }
      if (r.terms.size() == 2 && r.rhs == 0.0) {
        const double a = r.terms[0].second;
        const double b = r.terms[1].second;
        if (std::abs(a + b) <= 1e-14 * std::max(std::abs(a), std::abs(b))) {
          if (!classes.Merge(r.terms[0].first, r.terms[1].first)) {
            out.inconsistent = true;
            out.message = "conflicting merged values";
            return out;
          }
          consumed[j] = 1;
          changed = true;
        }
      }
    }
  }

  // Remaining rows over unfixed roots.
  std::vector<SparseRow> rows;
  std::vector<char> touched(m, 0);
  for (size_t j = 0; j < p.equalities.size(); ++j) {
    if (consumed[j]) continue;
    SparseRow r = ReduceRow(p.equalities[j], classes);
    if (r.terms.empty()) {
      if (std::abs(r.rhs) > 1e-9 * (1.0 + std::abs(p.equalities[j].rhs))) {
        out.inconsistent = true;
        out.message = "equality constraints are inconsistent";
        return out;
      }
      continue;
    }
    for (const auto& [root, a] : r.terms) touched[root] = 1;
    rows.push_back(std::move(r));
  }

  // Class numbering: untouched roots first, then touched ones.
  std::vector<int> root_class(m, -1);
  int next = 0;
  for (int pass = 0; pass < 2; ++pass) {
    for (int i = 0; i < m; ++i) {
      if (classes.Find(i) != i || classes.fixed(i)) continue;
      if ((pass == 0) == (touched[i] == 0)) root_class[i] = next++;
    }
  }
  int num_untouched = 0;
  for (int i = 0; i < m; ++i) {
    if (classes.Find(i) == i && !classes.fixed(i) && !touched[i]) {
      ++num_untouched;
    }
  }
  ReducedProblem& rp = out.rp;
  rp.num_classes = next;
  out.class_of.assign(m, -1);
  out.fixed_value.assign(m, 0.0);
  for (int i = 0; i < m; ++i) {
    const int r = classes.Find(i);
    if (classes.fixed(r)) {
      out.fixed_value[i] = *classes.fixed(r);
    } else {
      out.class_of[i] = root_class[r];
    }
  }

  // Class-space blocks.
  rp.cost_class = Eigen::VectorXd::Zero(rp.num_classes);
  rp.cost_constant = p.cost_constant;
  for (int i = 0; i < m; ++i) {
    if (out.class_of[i] >= 0) {
      rp.cost_class(out.class_of[i]) += p.cost(i);
    } else {
      rp.cost_constant += p.cost(i) * out.fixed_value[i];
    }
  }
  for (const SdpBlock& b : p.blocks) {
    ClassBlock cb;
    cb.size = b.size;
    cb.constant = Eigen::MatrixXd::Zero(b.size, b.size);
    std::map<int, std::map<std::pair<int, int>, double>> acc;
    for (const BlockEntry& e : b.entries) {
      int r = std::min(e.row, e.col);
      int c = std::max(e.row, e.col);
      double v = e.value;
      int cls = -1;
      if (e.var >= 0) {
        cls = out.class_of[e.var];
        if (cls < 0) v *= out.fixed_value[e.var];
      }
      if (cls < 0) {
        cb.constant(r, c) += v;
        if (r != c) cb.constant(c, r) += v;
      } else {
        acc[cls][{r, c}] += v;
      }
    }
    for (const auto& [cls, entries] : acc) {
      std::vector<ClassEntry> list;
      for (const auto& [rc, v] : entries) {
        if (v != 0.0) list.push_back({rc.first, rc.second, v});
      }
      if (list.empty()) continue;
      cb.vars.push_back(cls);
      cb.coeffs.push_back(std::move(list));
    }
    rp.blocks.push_back(std::move(cb));
  }

  // Dense handling of the remaining rows.
  const int t = rp.num_classes - num_untouched;
  rp.base = Eigen::VectorXd::Zero(rp.num_classes);
  if (rows.empty()) {
    rp.num_free = rp.num_classes;
    rp.null_t.resize(0, 0);
    return out;
  }
  const int pr = static_cast<int>(rows.size());
  Eigen::MatrixXd e_t = Eigen::MatrixXd::Zero(pr, t);
  Eigen::VectorXd rhs(pr);
  for (int j = 0; j < pr; ++j) {
    for (const auto& [root, a] : rows[j].terms) {
      e_t(j, root_class[root] - num_untouched) += a;
    }
    rhs(j) = rows[j].rhs;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(e_t.transpose());
  qr.setThreshold(1e-10);
  const int k = static_cast<int>(qr.rank());
  const Eigen::MatrixXd r_full = qr.matrixR().template triangularView<Eigen::Upper>();
  const Eigen::MatrixXd q = qr.householderQ();
  const auto perm = qr.colsPermutation().indices();
  Eigen::VectorXd rhs_perm(pr);
  for (int i = 0; i < pr; ++i) rhs_perm(i) = rhs(perm(i));
  Eigen::VectorXd u = Eigen::VectorXd::Zero(k);
  if (k > 0) {
    u = r_full.topLeftCorner(k, k).transpose().triangularView<Eigen::Lower>().solve(
        rhs_perm.head(k));
  }
  const Eigen::VectorXd z_t = q.leftCols(k) * u;
  const double resid = (e_t * z_t - rhs).cwiseAbs().maxCoeff();
  if (resid > 1e-8 * (1.0 + rhs.cwiseAbs().maxCoeff())) {
    out.inconsistent = true;
    out.message = "equality constraints are inconsistent (residual " +
                  std::to_string(resid) + ")";
    return out;
  }
  rp.base.tail(t) = z_t;
  const double ratio =
      k > 0 ? std::abs(r_full(k - 1, k - 1)) / std::abs(r_full(0, 0)) : 1.0;
  out.kkt = mode == EqualityMode::kKkt ||
            (mode == EqualityMode::kAuto && ratio < 1e-7);
  if (out.kkt) {
    rp.num_free = rp.num_classes;
    rp.null_t.resize(0, 0);
    rp.eq_v = Eigen::MatrixXd::Zero(k, rp.num_classes);
    rp.eq_rhs.resize(k);
    for (int i = 0; i < k; ++i) {
      rp.eq_v.row(i).tail(t) = e_t.row(perm(i));
      rp.eq_rhs(i) = rhs(perm(i));
    }
  } else {
    rp.num_free = num_untouched;
    rp.null_t = q.rightCols(t - k);
  }
  return out;
}

double FrobNorm(const std::vector<Eigen::MatrixXd>& ms) {
  double s = 0.0;
  for (const auto& m : ms) s += m.squaredNorm();
  return std::sqrt(s);
}

}  // namespace

SdpSolution SolveSdp(const SdpProblem& problem, const SdpOptions& options) {
  const auto start = Clock::now();
  SdpSolution sol;
  if (problem.cost.size() != problem.num_vars) {
    throw std::invalid_argument("cost vector length does not match num_vars");
  }
  Presolved pre = RunPresolve(problem, options.equality_mode);
  if (pre.inconsistent) {
    sol.status = SdpStatus::kInfeasibleSuspected;
    sol.message = pre.message;
    sol.y = Eigen::VectorXd::Zero(problem.num_vars);
    return sol;
  }
  ReducedProblem& rp = pre.rp;
  sol.used_kkt = pre.kkt;
  const int nv = rp.num_v();
  sol.reduced_vars = nv;
  const int nb = static_cast<int>(rp.blocks.size());

  // Constant part including the particular solution.
  std::vector<Eigen::MatrixXd> c0 = rp.Adjoint(rp.base);
  for (int k = 0; k < nb; ++k) c0[k] += rp.blocks[k].constant;
  const double const_obj = rp.cost_constant + rp.cost_class.dot(rp.base);
  const Eigen::VectorXd cost_v = rp.FromClass(rp.cost_class);
  const Eigen::MatrixXd& eq_v = rp.eq_v;
  const Eigen::VectorXd eq_rhs =
      eq_v.rows() > 0 ? Eigen::VectorXd(rp.eq_rhs - eq_v * rp.base)
                      : Eigen::VectorXd(0);

  // Starting point.
  int total_dim = 0;
  std::vector<double> xi(nb, 10.0);
  std::vector<double> eta(nb, 10.0);
  {
    std::vector<double> fmax(nb, 0.0);
    std::vector<double> ratio(nb, 0.0);
    for (int k = 0; k < nb; ++k) {
      const ClassBlock& b = rp.blocks[k];
      for (size_t q = 0; q < b.vars.size(); ++q) {
        double f2 = 0.0;
        for (const ClassEntry& e : b.coeffs[q]) {
          f2 += (e.row == e.col ? 1.0 : 2.0) * e.value * e.value;
        }
        const double fn = std::sqrt(f2);
        fmax[k] = std::max(fmax[k], fn);
        ratio[k] = std::max(ratio[k],
                            (1.0 + std::abs(rp.cost_class(b.vars[q]))) / (1.0 + fn));
      }
      const double s = rp.blocks[k].size;
      total_dim += rp.blocks[k].size;
      xi[k] = std::max({10.0, std::sqrt(s), s * ratio[k]});
      eta[k] = std::max({10.0, std::sqrt(s), fmax[k], c0[k].norm()});
    }
  }
  std::vector<Eigen::MatrixXd> x(nb);
  std::vector<Eigen::MatrixXd> s(nb);
  for (int k = 0; k < nb; ++k) {
    const int n = rp.blocks[k].size;
    x[k] = xi[k] * Eigen::MatrixXd::Identity(n, n);
    s[k] = eta[k] * Eigen::MatrixXd::Identity(n, n);
  }
  Eigen::VectorXd v = Eigen::VectorXd::Zero(nv);
  Eigen::VectorXd lam = Eigen::VectorXd::Zero(eq_v.rows());

  // Fixed Gram operator A A^* for restoring the linear constraints on X.
  Eigen::LLT<Eigen::MatrixXd> restore;
  {
    std::vector<Scaling> unit(nb);
    for (int k = 0; k < nb; ++k) {
      const int n = rp.blocks[k].size;
      unit[k].w = Eigen::MatrixXd::Identity(n, n);
    }
    if (nv > 0) restore.compute(SchurV(rp, SchurClass(rp, unit)));
  }

  const double cost_norm = cost_v.norm();
  const double c0_norm = FrobNorm(c0) + eq_rhs.norm();

  struct Snapshot {
    std::vector<Eigen::MatrixXd> x, s;
    Eigen::VectorXd v, lam;
    double merit = std::numeric_limits<double>::infinity();
    double mobj = 0, sobj = 0, gap = 0, pinf = 0, dinf = 0;
    int iter = 0;
  } best;

  double step_p = 0.0;
  double step_d = 0.0;
  int stalls = 0;
  SdpStatus status = SdpStatus::kMaxIterations;
  std::string message;
  int iter = 0;
  for (;; ++iter) {
    // Residuals and objectives.
    const Eigen::VectorXd a_x = rp.FromClass(rp.Apply(x));
    Eigen::VectorXd r_p = cost_v - a_x;
    if (eq_v.rows() > 0) r_p -= eq_v.transpose() * lam;
    const Eigen::VectorXd v_class = rp.ToClass(v);
    std::vector<Eigen::MatrixXd> r_d = rp.Adjoint(v_class);
    for (int k = 0; k < nb; ++k) r_d[k] += c0[k] - s[k];
    Eigen::VectorXd r_e =
        eq_v.rows() > 0 ? Eigen::VectorXd(eq_rhs - eq_v * v) : Eigen::VectorXd(0);
    double xs = 0.0;
    double c0x = 0.0;
    for (int k = 0; k < nb; ++k) {
      xs += Inner(x[k], s[k]);
      c0x += Inner(c0[k], x[k]);
    }
    const double mu = total_dim > 0 ? xs / total_dim : 0.0;
    const double mobj = cost_v.dot(v) + const_obj;
    const double sobj = -c0x + (eq_v.rows() > 0 ? eq_rhs.dot(lam) : 0.0) + const_obj;
    const double pinf = r_p.norm() / (1.0 + cost_norm);
    const double dinf =
        std::sqrt(std::pow(FrobNorm(r_d), 2) + r_e.squaredNorm()) / (1.0 + c0_norm);
    const double gap = std::abs(mobj - sobj) / (1.0 + std::abs(mobj) + std::abs(sobj));
    sol.history.push_back({iter, mobj, sobj, pinf, dinf, mu, step_p, step_d});
    if (options.verbose) {
      std::cerr << std::scientific << std::setprecision(3) << "it " << iter
                << " mom " << mobj << " sos " << sobj << " gap " << gap
                << " pinf " << pinf << " dinf " << dinf << " mu " << mu
                << " ap " << step_p << " ad " << step_d << "\n";
    }
    const double merit = std::max({gap, pinf, dinf});
    if (merit < best.merit) {
      best.x = x;
      best.s = s;
      best.v = v;
      best.lam = lam;
      best.merit = merit;
      best.mobj = mobj;
      best.sobj = sobj;
      best.gap = gap;
      best.pinf = pinf;
      best.dinf = dinf;
      best.iter = iter;
    }
    if (gap <= options.tol && pinf <= options.tol && dinf <= options.tol) {
      status = SdpStatus::kOptimal;
      break;
    }
    if (iter >= options.max_iter) {
      status = SdpStatus::kMaxIterations;
      message = "iteration limit reached";
      break;
    }
    double xtrace = 0.0;
    for (int k = 0; k < nb; ++k) xtrace += x[k].trace();
    if (xtrace > 1e14 || v.cwiseAbs().maxCoeff() > 1e14) {
      status = SdpStatus::kInfeasibleSuspected;
      message = "iterates diverging";
      break;
    }

    // Scaling and Schur complement.
    std::vector<Scaling> sc(nb);
    bool ok = true;
    for (int k = 0; k < nb && ok; ++k) {
      auto r = NtScaling(x[k], s[k]);
      if (!r) {
        ok = false;
      } else {
        sc[k] = std::move(*r);
      }
    }
    NewtonSolver newton;
    if (ok) ok = newton.Factor(SchurV(rp, SchurClass(rp, sc)), eq_v);
    if (!ok) {
      status = SdpStatus::kNumericalFailure;
      message = "factorization failed";
      break;
    }
    if (options.verbose && newton.reg > 0.0) {
      std::cerr << "   schur regularization " << newton.reg << "\n";
    }

    std::vector<Eigen::MatrixXd> wrw(nb);
    for (int k = 0; k < nb; ++k) wrw[k] = sc[k].w * r_d[k] * sc[k].w;

    // Solves for a direction given the scaled complementarity targets.
    auto direction = [&](const std::vector<Eigen::MatrixXd>& t_scaled,
                         std::vector<Eigen::MatrixXd>& dx,
                         std::vector<Eigen::MatrixXd>& ds, Eigen::VectorXd& dv,
                         Eigen::VectorXd& dl) {
      std::vector<Eigen::MatrixXd> rhs_mat(nb);
      std::vector<Eigen::MatrixXd> r_mat(nb);
      for (int k = 0; k < nb; ++k) {
        r_mat[k] = sc[k].g * t_scaled[k] * sc[k].g.transpose();
        rhs_mat[k] = r_mat[k] - wrw[k];
      }
      const Eigen::VectorXd h = rp.FromClass(rp.Apply(rhs_mat)) - r_p;
      newton.Solve(h, r_e, dv, dl);
      ds = rp.Adjoint(rp.ToClass(dv));
      dx.resize(nb);
      for (int k = 0; k < nb; ++k) {
        ds[k] += r_d[k];
        ds[k] = 0.5 * (ds[k] + ds[k].transpose());
        dx[k] = r_mat[k] - sc[k].w * ds[k] * sc[k].w;
        dx[k] = 0.5 * (dx[k] + dx[k].transpose());
      }
    };
    auto steps = [&](const std::vector<Eigen::MatrixXd>& dx,
                     const std::vector<Eigen::MatrixXd>& ds, double& ap,
                     double& ad) {
      ap = 1e30;
      ad = 1e30;
      for (int k = 0; k < nb; ++k) {
        ap = std::min(ap, MaxStep(x[k], dx[k]));
        ad = std::min(ad, MaxStep(s[k], ds[k]));
      }
    };

    // Predictor.
    std::vector<Eigen::MatrixXd> t_aff(nb);
    for (int k = 0; k < nb; ++k) {
      t_aff[k] = (-sc[k].lambda).asDiagonal();
    }
    std::vector<Eigen::MatrixXd> dx_a, ds_a;
    Eigen::VectorXd dv_a, dl_a;
    direction(t_aff, dx_a, ds_a, dv_a, dl_a);
    double ap_a, ad_a;
    steps(dx_a, ds_a, ap_a, ad_a);
    ap_a = std::min(1.0, ap_a);
    ad_a = std::min(1.0, ad_a);
    double xs_aff = 0.0;
    for (int k = 0; k < nb; ++k) {
      xs_aff += Inner(x[k] + ap_a * dx_a[k], s[k] + ad_a * ds_a[k]);
    }
    const double mu_aff = total_dim > 0 ? xs_aff / total_dim : 0.0;
    const double expon = std::max(1.0, 3.0 * std::pow(std::min(ap_a, ad_a), 2));
    const double sigma =
        mu > 0 ? std::min(1.0, std::pow(std::max(mu_aff, 0.0) / mu, expon)) : 0.0;

    // Corrector.
    std::vector<Eigen::MatrixXd> t_cor(nb);
    for (int k = 0; k < nb; ++k) {
      const Eigen::MatrixXd dxt = sc[k].g_inv * dx_a[k] * sc[k].g_inv.transpose();
      const Eigen::MatrixXd dzt = sc[k].g.transpose() * ds_a[k] * sc[k].g;
      const Eigen::MatrixXd corr = dxt * dzt + dzt * dxt;
      const Eigen::VectorXd& l = sc[k].lambda;
      const int n = static_cast<int>(l.size());
      Eigen::MatrixXd t(n, n);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          double num = -corr(i, j);
          if (i == j) num += 2.0 * sigma * mu - 2.0 * l(i) * l(i);
          t(i, j) = num / (l(i) + l(j));
        }
      }
      t_cor[k] = 0.5 * (t + t.transpose());
    }
    std::vector<Eigen::MatrixXd> dx, ds;
    Eigen::VectorXd dv, dl;
    direction(t_cor, dx, ds, dv, dl);
    double ap, ad;
    steps(dx, ds, ap, ad);
    const double tau = 0.9 + 0.09 * std::min(step_p, step_d);
    step_p = std::min(1.0, tau * ap);
    step_d = std::min(1.0, tau * ad);
    for (int k = 0; k < nb; ++k) {
      x[k] += step_p * dx[k];
      s[k] += step_d * ds[k];
    }
    if (lam.size() > 0) lam += step_p * dl;
    v += step_d * dv;

    // Pulls X back toward A(X) = c - E' lam, which rounding in the Newton
    // solve lets drift once the scaling becomes ill-conditioned.
    if (nv > 0 && restore.info() == Eigen::Success) {
      Eigen::VectorXd r = cost_v - rp.FromClass(rp.Apply(x));
      if (eq_v.rows() > 0) r -= eq_v.transpose() * lam;
      const std::vector<Eigen::MatrixXd> dx_fix =
          rp.Adjoint(rp.ToClass(Eigen::VectorXd(restore.solve(r))));
      double theta = 1.0;
      for (int k = 0; k < nb; ++k) theta = std::min(theta, 0.5 * MaxStep(x[k], dx_fix[k]));
      for (int k = 0; k < nb; ++k) x[k] += theta * dx_fix[k];
    }
    if (step_p < 1e-9 && step_d < 1e-9) {
      if (++stalls >= 3) {
        status = SdpStatus::kNumericalFailure;
        message = "step length stalled";
        break;
      }
    } else {
      stalls = 0;
    }
  }

  if ((status == SdpStatus::kNumericalFailure || status == SdpStatus::kMaxIterations) &&
      best.merit <= 1e3 * options.tol) {
    message += "; best iterate " + std::to_string(best.iter) + " kept";
    status = SdpStatus::kNearOptimal;
  }
  if (status != SdpStatus::kOptimal && best.merit < std::numeric_limits<double>::infinity()) {
    x = best.x;
    s = best.s;
    v = best.v;
    lam = best.lam;
  }
  const Snapshot& fin = best;
  sol.status = status;
  sol.message = message;
  sol.iterations = iter;
  if (status == SdpStatus::kOptimal) {
    const auto& h = sol.history.back();
    sol.moment_objective = h.moment_objective;
    sol.sos_objective = h.sos_objective;
    sol.primal_infeasibility = h.primal_infeasibility;
    sol.dual_infeasibility = h.dual_infeasibility;
  } else {
    sol.moment_objective = fin.mobj;
    sol.sos_objective = fin.sobj;
    sol.primal_infeasibility = fin.pinf;
    sol.dual_infeasibility = fin.dinf;
  }
  sol.relative_gap = std::abs(sol.moment_objective - sol.sos_objective) /
                     (1.0 + std::abs(sol.moment_objective) +
                      std::abs(sol.sos_objective));

  // Back to the original variables.
  const Eigen::VectorXd y_class = rp.base + rp.ToClass(v);
  sol.y.resize(problem.num_vars);
  for (int i = 0; i < problem.num_vars; ++i) {
    sol.y(i) = pre.class_of[i] >= 0 ? y_class(pre.class_of[i]) : pre.fixed_value[i];
  }
  sol.gram = x;
  sol.slack.clear();
  for (const SdpBlock& b : problem.blocks) sol.slack.push_back(EvaluateBlock(b, sol.y));

  // Equality multipliers: least squares on E' lambda = cost - A(X).
  const int p = static_cast<int>(problem.equalities.size());
  sol.multipliers = Eigen::VectorXd::Zero(p);
  if (p > 0) {
    Eigen::VectorXd r = problem.cost;
    for (size_t k = 0; k < problem.blocks.size(); ++k) {
      for (const BlockEntry& e : problem.blocks[k].entries) {
        if (e.var < 0) continue;
        r(e.var) -= e.row == e.col
                        ? e.value * x[k](e.row, e.row)
                        : e.value * (x[k](e.row, e.col) + x[k](e.col, e.row));
      }
    }
    std::vector<Eigen::Triplet<double>> trip;
    for (int j = 0; j < p; ++j) {
      for (const auto& [i, a] : problem.equalities[j].terms) trip.emplace_back(i, j, a);
    }
    Eigen::SparseMatrix<double> et(problem.num_vars, p);
    et.setFromTriplets(trip.begin(), trip.end());
    Eigen::LeastSquaresConjugateGradient<Eigen::SparseMatrix<double>> lscg;
    lscg.setTolerance(1e-15);
    lscg.setMaxIterations(std::max(1000, 20 * p));
    lscg.compute(et);
    sol.multipliers = lscg.solve(r);
  }
  sol.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return sol;
}

}  // namespace rhsos
