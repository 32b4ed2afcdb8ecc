#include "rhsos/relaxation.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

namespace rhsos {

std::string ToString(Hierarchy h) {
  switch (h) {
    case Hierarchy::kReal:
      return "real";
    case Hierarchy::kComplex:
      return "complex";
    case Hierarchy::kRealPop:
      return "rpop";
  }
  return "unknown";
}

Hierarchy ParseHierarchy(const std::string& s) {
  if (s == "real") return Hierarchy::kReal;
  if (s == "complex") return Hierarchy::kComplex;
  if (s == "rpop") return Hierarchy::kRealPop;
  throw std::invalid_argument("unknown hierarchy '" + s + "'");
}

std::vector<int> LMIProgram::block_sizes() const {
  std::vector<int> out;
  for (const SdpBlock& b : sdp.blocks) out.push_back(b.size);
  return out;
}

namespace {

using TermMap = std::map<int, double>;

// Collects equality rows, merging rows that agree up to scaling.
class EqualityCollector {
 public:
  void Add(const TermMap& terms, double rhs, EqualityOrigin origin,
           SdpProblem& sdp, std::vector<std::vector<EqualityOrigin>>& origins) {
    double scale = 0.0;
    for (const auto& [v, a] : terms) scale = std::max(scale, std::abs(a));
    if (scale == 0.0) return;
    double lead = 0.0;
    for (const auto& [v, a] : terms) {
      if (std::abs(a) > 1e-13 * scale) {
        lead = a;
        break;
      }
    }
    const double norm = lead < 0 ? -scale : scale;
    LinearEquality row;
    std::vector<long long> key;
    for (const auto& [v, a] : terms) {
      if (std::abs(a) <= 1e-13 * scale) continue;
      const double c = a / norm;
      row.terms.emplace_back(v, c);
      key.push_back(v);
      key.push_back(std::llround(c * 1e11));
    }
    row.rhs = rhs / norm;
    key.push_back(std::llround(row.rhs * 1e11));
    origin.scale = norm;
    auto it = index_.find(key);
    if (it != index_.end()) {
      origins[it->second].push_back(std::move(origin));
      return;
    }
    index_.emplace(key, static_cast<int>(sdp.equalities.size()));
    sdp.equalities.push_back(std::move(row));
    origins.push_back({std::move(origin)});
  }

 private:
  std::map<std::vector<long long>, int> index_;
};

// Splits a complex linear form into real and imaginary coefficient maps over
// SDP variables.
struct VarMap {
  bool complex = false;
  std::vector<int> re;
  std::vector<int> im;  // -1 for self-paired keys

  void Parts(const LinearForm& f, TermMap& re_part, TermMap& im_part) const {
    for (const KeyRef& t : f.terms) {
      const double a = t.coeff.real();
      const double b = t.coeff.imag();
      if (!complex) {
        if (a != 0.0) re_part[re[t.key]] += a;
        if (b != 0.0) im_part[re[t.key]] += b;
        continue;
      }
      const double sgn = t.conjugated ? -1.0 : 1.0;
      if (a != 0.0) re_part[re[t.key]] += a;
      if (b != 0.0) im_part[re[t.key]] += b;
      if (im[t.key] >= 0) {
        if (b != 0.0) re_part[im[t.key]] += -b * sgn;
        if (a != 0.0) im_part[im[t.key]] += a * sgn;
      }
    }
    Prune(re_part);
    Prune(im_part);
  }

  static void Prune(TermMap& m) {
    double scale = 0.0;
    for (const auto& [v, a] : m) scale = std::max(scale, std::abs(a));
    for (auto it = m.begin(); it != m.end();) {
      it = std::abs(it->second) <= 1e-14 * std::max(scale, 1.0) ? m.erase(it)
                                                                 : std::next(it);
    }
  }
};

struct PendingBlock {
  BlockInfo info;
  SymbolicMatrix forms;
};

struct PendingEquality {
  LinearForm form;
  EqualityOrigin origin;
};

std::vector<std::vector<Exponent>> SplitBasis(const MonomialBasis& basis,
                                              const PhaseLattice& lattice,
                                              bool split) {
  if (!split) return {basis.entries()};
  std::vector<std::vector<Exponent>> out;
  for (const auto& cls : PartitionByCoset(lattice, basis.entries())) {
    std::vector<Exponent> b;
    for (int i : cls) b.push_back(basis[i]);
    out.push_back(std::move(b));
  }
  return out;
}

// Leading (largest graded) exponent of a polynomial given by its exponents.
Exponent Leading(const std::vector<Exponent>& exps) {
  Exponent best = exps.front();
  for (const Exponent& e : exps) {
    if (GradedLexLess(best, e)) best = e;
  }
  return best;
}

bool Dominates(const Exponent& e, const Exponent& l) {
  for (size_t j = 0; j < e.size(); ++j) {
    if (e[j] < l[j]) return false;
  }
  return true;
}

// A row-elimination rule: rows e >= lead with |e| - |lead| <= max_shift go.
struct EliminationRule {
  Exponent lead;
  int max_shift = 0;
};

std::vector<Exponent> KeptRows(const std::vector<Exponent>& basis,
                               const std::vector<EliminationRule>& rules) {
  std::vector<Exponent> kept;
  for (const Exponent& e : basis) {
    bool drop = false;
    for (const EliminationRule& rule : rules) {
      if (Dominates(e, rule.lead) && Degree(e) - Degree(rule.lead) <= rule.max_shift) {
        drop = true;
        break;
      }
    }
    if (!drop) kept.push_back(e);
  }
  return kept;
}

// Leading monomials of the holomorphic (or, conjugated, antiholomorphic)
// complex equalities.
std::vector<Exponent> HolomorphicLeads(const CPOPInstance& inst) {
  std::vector<Exponent> leads;
  for (const CPoly& h : inst.complex_eqs) {
    if (h.is_zero()) continue;
    std::vector<Exponent> exps;
    if (h.AntiholomorphicDegree() == 0) {
      for (const auto& [e, c] : h.terms()) exps.push_back(e.beta);
    } else if (h.HolomorphicDegree() == 0) {
      for (const auto& [e, c] : h.terms()) exps.push_back(e.gamma);
    } else {
      continue;
    }
    if (Degree(Leading(exps)) > 0) leads.push_back(Leading(exps));
  }
  return leads;
}

void CheckOrder(const DegreeStats& ds, int order) {
  if (order < ds.d_min) {
    throw OrderTooSmall("relaxation order " + std::to_string(order) +
                        " is below the minimum " + std::to_string(ds.d_min));
  }
}

LMIProgram BuildComplexFamily(const CPOPInstance& inst, int order,
                              const BuildOptions& options, bool complex) {
  inst.Validate();
  if (!complex) {
    for (const CPoly* p : {&inst.objective}) {
      if (!p->HasRealCoefficients()) {
        throw HierarchyMismatch("real hierarchy needs a real-coefficient objective");
      }
    }
    for (const CPoly& g : inst.ineqs) {
      if (!g.HasRealCoefficients()) {
        throw HierarchyMismatch(
            "real hierarchy needs real-coefficient inequalities");
      }
    }
    for (const CPoly& h : inst.eqs) {
      if (!h.HasRealCoefficients() && !h.HasImaginaryCoefficients()) {
        throw HierarchyMismatch(
            "real hierarchy needs real or purely imaginary equality coefficients");
      }
    }
    for (const CPoly& h : inst.complex_eqs) {
      if (!h.HasRealCoefficients()) {
        throw HierarchyMismatch(
            "real hierarchy needs real-coefficient complex equalities");
      }
    }
  }
  const DegreeStats ds = ComputeDegreeStats(inst);
  CheckOrder(ds, order);
  const int n = inst.n;

  std::vector<CPoly> all = {inst.objective};
  all.insert(all.end(), inst.ineqs.begin(), inst.ineqs.end());
  all.insert(all.end(), inst.eqs.begin(), inst.eqs.end());
  all.insert(all.end(), inst.complex_eqs.begin(), inst.complex_eqs.end());
  PhaseLattice lattice = options.phase_symmetry
                             ? PhaseLattice::FromPolynomials(n, all)
                             : PhaseLattice::Full(n);

  LMIProgram prog;
  prog.hierarchy = complex ? Hierarchy::kComplex : Hierarchy::kReal;
  prog.order = order;
  prog.instance = inst;
  prog.phase_symmetry = options.phase_symmetry;
  prog.keys = KeyTable(lattice);
  KeyTable& keys = prog.keys;

  // Symbolic assembly. Every row z^{L+a} of a block of order t is covered
  // by the equality rows once |a| <= t - |L|, which basis membership implies.
  std::vector<EliminationRule> rules;
  if (options.facial_reduction) {
    for (const Exponent& l : HolomorphicLeads(inst)) rules.push_back({l, order});
  }
  auto reduce = [&](PendingBlock& pb, std::vector<Exponent> b) {
    const std::vector<Exponent> kept = KeptRows(b, rules);
    pb.info.eliminated = static_cast<int>(b.size() - kept.size());
    pb.info.basis = kept;
  };
  std::vector<PendingBlock> pending;
  const MonomialBasis mbasis(n, order);
  for (auto& b : SplitBasis(mbasis, lattice, options.phase_symmetry)) {
    PendingBlock pb;
    pb.info.constraint = -1;
    reduce(pb, b);
    if (pb.info.basis.empty()) continue;
    b = pb.info.basis;
    pb.info.embedded = complex;
    pb.forms = MomentMatrixSymbolic(b, keys);
    pending.push_back(std::move(pb));
  }
  for (size_t i = 0; i < inst.ineqs.size(); ++i) {
    const MonomialBasis lb(n, order - ds.d_g[i]);
    for (auto& b : SplitBasis(lb, lattice, options.phase_symmetry)) {
      PendingBlock pb;
      pb.info.constraint = static_cast<int>(i);
      reduce(pb, b);
      if (pb.info.basis.empty()) continue;
      b = pb.info.basis;
      pb.info.embedded = complex;
      pb.forms = LocalizingMatrixSymbolic(inst.ineqs[i], b, b, keys);
      pending.push_back(std::move(pb));
    }
  }
  std::vector<PendingEquality> eq_forms;
  for (size_t i = 0; i < inst.eqs.size(); ++i) {
    const MonomialBasis lb(n, order - ds.d_h[i]);
    for (auto& b : SplitBasis(lb, lattice, options.phase_symmetry)) {
      for (size_t p = 0; p < b.size(); ++p) {
        for (size_t q = p; q < b.size(); ++q) {
          PendingEquality pe;
          pe.form = LocalizingEntry(inst.eqs[i], b[p], b[q], keys);
          pe.origin.constraint = static_cast<int>(i);
          pe.origin.beta = b[p];
          pe.origin.gamma = b[q];
          eq_forms.push_back(std::move(pe));
        }
      }
    }
  }
  for (size_t i = 0; i < inst.complex_eqs.size(); ++i) {
    const CPoly& h = inst.complex_eqs[i];
    const MonomialBasis rows(n, order - h.HolomorphicDegree());
    const MonomialBasis cols(n, order - h.AntiholomorphicDegree());
    for (const Exponent& a : rows.entries()) {
      for (const Exponent& c : cols.entries()) {
        if (options.phase_symmetry) {
          // Entry vanishes identically unless a - c + charge(h) is admissible.
          bool any = false;
          for (const auto& [e, coeff] : h.terms()) {
            Exponent bb(n), gg(n);
            for (int j = 0; j < n; ++j) {
              bb[j] = a[j] + e.beta[j];
              gg[j] = c[j] + e.gamma[j];
            }
            if (lattice.Admits(bb, gg)) {
              any = true;
              break;
            }
          }
          if (!any) continue;
        }
        PendingEquality pe;
        pe.form = LocalizingEntry(h, a, c, keys);
        pe.origin.constraint = static_cast<int>(inst.eqs.size() + i);
        pe.origin.beta = a;
        pe.origin.gamma = c;
        eq_forms.push_back(std::move(pe));
      }
    }
  }
  const CPoly f = inst.MinimizationObjective();
  LinearForm objective;
  {
    const Exponent zero(n, 0);
    objective = LocalizingEntry(f, zero, zero, keys);
  }

  // Variables.
  VarMap vm;
  vm.complex = complex;
  int nvars = 0;
  for (int k = 0; k < keys.size(); ++k) {
    vm.re.push_back(nvars++);
    prog.variables.push_back({k, false});
    const ExponentPair& e = keys.key(k);
    if (complex && e.beta != e.gamma) {
      vm.im.push_back(nvars++);
      prog.variables.push_back({k, true});
    } else {
      vm.im.push_back(-1);
    }
  }
  SdpProblem& sdp = prog.sdp;
  sdp.num_vars = nvars;
  sdp.cost = Eigen::VectorXd::Zero(nvars);
  {
    TermMap re, im;
    vm.Parts(objective, re, im);
    for (const auto& [v, a] : re) sdp.cost(v) += a;
    sdp.cost_constant = objective.constant.real();
  }

  // Blocks.
  for (PendingBlock& pb : pending) {
    const int s = static_cast<int>(pb.info.basis.size());
    SdpBlock blk;
    blk.size = complex ? 2 * s : s;
    for (int i = 0; i < s; ++i) {
      for (int j = i; j < s; ++j) {
        TermMap re, im;
        vm.Parts(pb.forms.at(i, j), re, im);
        for (const auto& [v, a] : re) {
          blk.entries.push_back({i, j, v, a});
          if (complex) blk.entries.push_back({s + i, s + j, v, a});
        }
        if (complex) {
          // Top-right block holds -Im(H): (i, s+j) = -B_ij, (j, s+i) = B_ij.
          for (const auto& [v, a] : im) {
            if (i == j) continue;
            blk.entries.push_back({i, s + j, v, -a});
            blk.entries.push_back({j, s + i, v, a});
          }
        }
      }
    }
    sdp.blocks.push_back(std::move(blk));
    prog.blocks.push_back(std::move(pb.info));
  }

  // Equalities: normalization first.
  EqualityCollector collector;
  {
    TermMap t{{vm.re[0], 1.0}};
    EqualityOrigin o;
    o.constraint = -1;
    o.beta = Exponent(n, 0);
    o.gamma = Exponent(n, 0);
    collector.Add(t, 1.0, o, sdp, prog.equality_origins);
  }
  for (PendingEquality& pe : eq_forms) {
    TermMap re, im;
    vm.Parts(pe.form, re, im);
    if (!re.empty()) {
      EqualityOrigin o = pe.origin;
      o.imaginary_part = false;
      collector.Add(re, -pe.form.constant.real(), o, sdp, prog.equality_origins);
    }
    if (!im.empty()) {
      EqualityOrigin o = pe.origin;
      o.imaginary_part = true;
      collector.Add(im, -pe.form.constant.imag(), o, sdp, prog.equality_origins);
    }
  }
  return prog;
}

}  // namespace

LMIProgram BuildRealRelaxation(const CPOPInstance& inst, int order,
                               const BuildOptions& options) {
  return BuildComplexFamily(inst, order, options, false);
}

LMIProgram BuildComplexRelaxation(const CPOPInstance& inst, int order,
                                  const BuildOptions& options) {
  return BuildComplexFamily(inst, order, options, true);
}

namespace {

int HalfDegree(const RPoly& p) { return (p.Degree() + 1) / 2; }

}  // namespace

LMIProgram BuildRealPopRelaxation(const RealPop& pop, int order,
                                  const BuildOptions& options) {
  int need = HalfDegree(pop.objective);
  for (const RPoly& g : pop.ineqs) need = std::max(need, HalfDegree(g));
  for (const RPoly& h : pop.eqs) need = std::max(need, HalfDegree(h));
  if (order < need) {
    throw OrderTooSmall("relaxation order " + std::to_string(order) +
                        " is below the minimum " + std::to_string(need));
  }
  const int m = pop.m;
  LMIProgram prog;
  prog.hierarchy = Hierarchy::kRealPop;
  prog.order = order;
  prog.real_pop = pop;
  std::unordered_map<Exponent, int, ExponentHash> index;
  auto var = [&](const Exponent& a) {
    auto [it, inserted] = index.emplace(a, static_cast<int>(prog.real_moments.size()));
    if (inserted) {
      prog.real_moments.push_back(a);
      prog.variables.push_back({it->second, false});
    }
    return it->second;
  };
  auto add = [&](const Exponent& a, const Exponent& b, const Exponent& c) {
    Exponent e(m);
    for (int j = 0; j < m; ++j) e[j] = a[j] + b[j] + c[j];
    return var(e);
  };
  const Exponent zero(m, 0);
  const MonomialBasis mb(m, order);
  for (int i = 0; i < mb.size(); ++i) {
    for (int j = i; j < mb.size(); ++j) add(mb[i], mb[j], zero);
  }

  struct RawBlock {
    BlockInfo info;
    std::vector<BlockEntry> entries;
    int size;
  };
  std::vector<RawBlock> raw;
  // Equality h is imposed on x^d h for |d| <= 2 (order - ceil(deg h / 2)),
  // so row x^{L+a} of a block of order t with multiplier degree deg_g is
  // redundant once |a| <= t - deg h and |a| + t + deg_g fits that range.
  auto rules_for = [&](int t, int deg_g) {
    std::vector<EliminationRule> rules;
    if (!options.facial_reduction) return rules;
    for (const RPoly& h : pop.eqs) {
      if (h.is_zero()) continue;
      std::vector<Exponent> exps;
      for (const auto& [e, c] : h.terms()) exps.push_back(e);
      const Exponent lead = Leading(exps);
      const int deg = Degree(lead);
      if (deg == 0) continue;
      const int shift = std::min(t - deg, 2 * (order - HalfDegree(h)) - t - deg_g);
      if (shift >= 0) rules.push_back({lead, shift});
    }
    return rules;
  };
  auto localizing = [&](const RPoly& g, int t, int constraint) {
    const MonomialBasis full(m, t);
    const std::vector<Exponent> b = KeptRows(full.entries(), rules_for(t, g.Degree()));
    if (b.empty()) return;
    RawBlock rb;
    rb.size = static_cast<int>(b.size());
    rb.info.constraint = constraint;
    rb.info.basis = b;
    rb.info.eliminated = full.size() - rb.size;
    for (int i = 0; i < rb.size; ++i) {
      for (int j = i; j < rb.size; ++j) {
        std::map<int, double> acc;
        for (const auto& [e, c] : g.terms()) acc[add(b[i], b[j], e)] += c;
        for (const auto& [v, c] : acc) {
          if (c != 0.0) rb.entries.push_back({i, j, v, c});
        }
      }
    }
    raw.push_back(std::move(rb));
  };
  RPoly one(m);
  one.AddTerm(zero, 1.0);
  localizing(one, order, -1);
  for (size_t i = 0; i < pop.ineqs.size(); ++i) {
    localizing(pop.ineqs[i], order - HalfDegree(pop.ineqs[i]), static_cast<int>(i));
  }
  struct RawEq {
    std::map<int, double> terms;
    EqualityOrigin origin;
  };
  std::vector<RawEq> raw_eqs;
  for (size_t i = 0; i < pop.eqs.size(); ++i) {
    const MonomialBasis b(m, order - HalfDegree(pop.eqs[i]));
    for (int p = 0; p < b.size(); ++p) {
      for (int q = p; q < b.size(); ++q) {
        RawEq re;
        for (const auto& [e, c] : pop.eqs[i].terms()) re.terms[add(b[p], b[q], e)] += c;
        re.origin.constraint = static_cast<int>(i);
        re.origin.beta = b[p];
        re.origin.gamma = b[q];
        raw_eqs.push_back(std::move(re));
      }
    }
  }
  RPoly f = pop.objective;
  if (pop.sense == Sense::kMaximize) {
    RPoly neg(m);
    for (const auto& [e, c] : f.terms()) neg.AddTerm(e, -c);
    f = neg;
  }
  std::map<int, double> cost;
  for (const auto& [e, c] : f.terms()) cost[var(e)] += c;

  SdpProblem& sdp = prog.sdp;
  sdp.num_vars = static_cast<int>(prog.real_moments.size());
  sdp.cost = Eigen::VectorXd::Zero(sdp.num_vars);
  for (const auto& [v, c] : cost) sdp.cost(v) += c;
  for (RawBlock& rb : raw) {
    sdp.blocks.push_back({rb.size, std::move(rb.entries)});
    prog.blocks.push_back(std::move(rb.info));
  }
  EqualityCollector collector;
  {
    EqualityOrigin o;
    o.beta = zero;
    o.gamma = zero;
    collector.Add({{var(zero), 1.0}}, 1.0, o, sdp, prog.equality_origins);
  }
  for (RawEq& re : raw_eqs) {
    collector.Add(re.terms, 0.0, re.origin, sdp, prog.equality_origins);
  }
  return prog;
}

LMIProgram BuildRealPopRelaxation(const CPOPInstance& inst, int order,
                                  const BuildOptions& options) {
  inst.Validate();
  LMIProgram prog = BuildRealPopRelaxation(ToRealPop(inst), order, options);
  prog.instance = inst;
  return prog;
}

LMIProgram BuildRelaxation(const CPOPInstance& inst, Hierarchy h, int order,
                           const BuildOptions& options) {
  switch (h) {
    case Hierarchy::kReal:
      return BuildRealRelaxation(inst, order, options);
    case Hierarchy::kComplex:
      return BuildComplexRelaxation(inst, order, options);
    case Hierarchy::kRealPop:
      return BuildRealPopRelaxation(inst, order, options);
  }
  throw std::invalid_argument("unknown hierarchy");
}

MomentSequence MomentsFromSolution(const LMIProgram& prog,
                                   const Eigen::VectorXd& y) {
  if (prog.hierarchy == Hierarchy::kRealPop) {
    const int n = prog.real_pop.m / 2;
    MomentSequence seq(n, prog.order);
    std::unordered_map<Exponent, int, ExponentHash> index;
    for (size_t i = 0; i < prog.real_moments.size(); ++i) {
      index.emplace(prog.real_moments[i], static_cast<int>(i));
    }
    auto value = [&](const Exponent& a) {
      auto it = index.find(a);
      return it == index.end() ? 0.0 : y(it->second);
    };
    const MonomialBasis b(n, prog.order);
    for (int i = 0; i < b.size(); ++i) {
      for (int j = 0; j < b.size(); ++j) {
        const MomentKey k = CanonicalKey(b[i], b[j]);
        if (k.flipped) continue;
        auto [re, im] = ExpandToReal(CPoly::Monomial({b[i], b[j]}));
        double vr = 0.0;
        double vi = 0.0;
        for (const auto& [e, c] : re.terms()) vr += c * value(e);
        for (const auto& [e, c] : im.terms()) vi += c * value(e);
        seq.set(b[i], b[j], {vr, vi});
      }
    }
    return seq;
  }
  MomentSequence seq(prog.instance.n, prog.order);
  std::vector<Complex> vals(prog.keys.size(), 0.0);
  for (size_t v = 0; v < prog.variables.size(); ++v) {
    const VariableInfo& info = prog.variables[v];
    if (info.imaginary) {
      vals[info.key] += Complex(0.0, y(v));
    } else {
      vals[info.key] += y(v);
    }
  }
  for (int k = 0; k < prog.keys.size(); ++k) {
    seq.set(prog.keys.key(k).beta, prog.keys.key(k).gamma, vals[k]);
  }
  return seq;
}

Eigen::MatrixXcd SolutionMomentMatrix(const LMIProgram& prog,
                                      const Eigen::VectorXd& y, int t) {
  return MomentMatrix(MomentsFromSolution(prog, y), t);
}

ComplexityStats ComputeComplexityStats(int n, int r) {
  ComplexityStats s;
  const long long side = BasisSize(n, r);
  s.real = {side, side * (side + 1) / 2};
  s.complex = {2 * side, side * side};
  s.real_pop = {BasisSize(2 * n, r), Binomial(2 * n + 2 * r, 2 * r)};
  return s;
}

long long EnumeratedKeyCount(int n, int r) {
  KeyTable keys(PhaseLattice::Full(n));
  const MonomialBasis b(n, r);
  for (int i = 0; i < b.size(); ++i) {
    for (int j = i; j < b.size(); ++j) keys.Intern(CanonicalKey(b[i], b[j]).pair);
  }
  return keys.size();
}

}  // namespace rhsos
