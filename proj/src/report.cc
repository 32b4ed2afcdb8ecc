#include "rhsos/report.h"

#include <chrono>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "rhsos/problem_io.h"

namespace rhsos {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// JSON has no NaN or infinity; those are written as strings.
ordered_json Num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double GetNum(const json& j, const std::string& path) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw ProblemParseError(path, "expected a number");
}

const json& At(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) {
    throw ProblemParseError(path + "/" + key, "missing field");
  }
  return j.at(key);
}

double NumAt(const json& j, const std::string& key, const std::string& path) {
  return GetNum(At(j, key, path), path + "/" + key);
}

template <typename T>
T Get(const json& j, const std::string& key, const std::string& path) {
  try {
    return At(j, key, path).get<T>();
  } catch (const json::exception&) {
    throw ProblemParseError(path + "/" + key, "wrong type");
  }
}

ordered_json ComplexVector(const std::vector<Complex>& z) {
  ordered_json a = ordered_json::array();
  for (const Complex& c : z) a.push_back({Num(c.real()), Num(c.imag())});
  return a;
}

std::vector<Complex> ParseComplexVector(const json& j, const std::string& path) {
  if (!j.is_array()) throw ProblemParseError(path, "expected an array");
  std::vector<Complex> z;
  for (size_t i = 0; i < j.size(); ++i) {
    const std::string p = path + "/" + std::to_string(i);
    if (!j[i].is_array() || j[i].size() != 2) throw ProblemParseError(p, "expected [re, im]");
    z.emplace_back(GetNum(j[i][0], p + "/0"), GetNum(j[i][1], p + "/1"));
  }
  return z;
}

ordered_json RealVector(const Eigen::VectorXd& v) {
  ordered_json a = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(Num(v(i)));
  return a;
}

Eigen::VectorXd ParseRealVector(const json& j, const std::string& path) {
  if (!j.is_array()) throw ProblemParseError(path, "expected an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) v(i) = GetNum(j[i], path + "/" + std::to_string(i));
  return v;
}

ordered_json Matrix(const Eigen::MatrixXd& m) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(RealVector(m.row(i).transpose()));
  return rows;
}

Eigen::MatrixXd ParseMatrix(const json& j, int size, const std::string& path) {
  if (!j.is_array() || static_cast<int>(j.size()) != size) {
    throw ProblemParseError(path, "expected " + std::to_string(size) + " rows");
  }
  Eigen::MatrixXd m(size, size);
  for (int i = 0; i < size; ++i) {
    const std::string p = path + "/" + std::to_string(i);
    const Eigen::VectorXd row = ParseRealVector(j[i], p);
    if (row.size() != size) throw ProblemParseError(p, "wrong row length");
    m.row(i) = row.transpose();
  }
  return m;
}

ordered_json CPolyTerms(const CPoly& p) {
  ordered_json a = ordered_json::array();
  for (const auto& [e, c] : p.terms()) {
    a.push_back({{"beta", e.beta}, {"gamma", e.gamma}, {"re", Num(c.real())},
                 {"im", Num(c.imag())}});
  }
  return a;
}

CPoly ParseCPolyTerms(const json& j, int n, const std::string& path) {
  if (!j.is_array()) throw ProblemParseError(path, "expected a term list");
  CPoly p(n);
  for (size_t k = 0; k < j.size(); ++k) {
    const std::string tp = path + "/" + std::to_string(k);
    p.AddTerm({Get<Exponent>(j[k], "beta", tp), Get<Exponent>(j[k], "gamma", tp)},
              Complex(NumAt(j[k], "re", tp), NumAt(j[k], "im", tp)));
  }
  return p;
}

SdpStatus ParseStatus(const std::string& s, const std::string& path) {
  for (SdpStatus st : {SdpStatus::kOptimal, SdpStatus::kNearOptimal, SdpStatus::kMaxIterations,
                       SdpStatus::kInfeasibleSuspected, SdpStatus::kNumericalFailure}) {
    if (ToString(st) == s) return st;
  }
  throw ProblemParseError(path, "unknown solver status '" + s + "'");
}

ExtractionStatus ParseExtractionStatus(const std::string& s, const std::string& path) {
  for (ExtractionStatus st : {ExtractionStatus::kExtracted, ExtractionStatus::kNoCertificate,
                              ExtractionStatus::kFailed}) {
    if (ToString(st) == s) return st;
  }
  throw ProblemParseError(path, "unknown extraction status '" + s + "'");
}

ordered_json CertificateJson(const Certificate& c) {
  ordered_json j;
  j["gamma"] = Num(c.gamma);
  j["residual"] = Num(c.residual);
  j["scale"] = Num(c.scale);
  j["min_gram_eigenvalue"] = Num(c.min_gram_eigenvalue);
  j["valid"] = c.valid;
  ordered_json blocks = ordered_json::array();
  for (const GramBlock& b : c.blocks) {
    ordered_json bj;
    bj["constraint"] = b.constraint;
    bj["basis"] = b.basis;
    bj["re"] = Matrix(b.gram.real());
    bj["im"] = Matrix(b.gram.imag());
    blocks.push_back(std::move(bj));
  }
  j["blocks"] = std::move(blocks);
  ordered_json taus = ordered_json::array();
  for (const CPoly& t : c.equality_multipliers) taus.push_back(CPolyTerms(t));
  j["equality_multipliers"] = std::move(taus);
  ordered_json rtaus = ordered_json::array();
  for (const RPoly& t : c.real_equality_multipliers) {
    ordered_json terms = ordered_json::array();
    for (const auto& [e, v] : t.terms()) terms.push_back({{"alpha", e}, {"c", Num(v)}});
    rtaus.push_back(std::move(terms));
  }
  j["real_equality_multipliers"] = std::move(rtaus);
  return j;
}

Certificate ParseCertificate(const json& j, Hierarchy h, int n, int m, const std::string& path) {
  Certificate c;
  c.hierarchy = h;
  c.gamma = NumAt(j, "gamma", path);
  c.residual = NumAt(j, "residual", path);
  c.scale = NumAt(j, "scale", path);
  c.min_gram_eigenvalue = NumAt(j, "min_gram_eigenvalue", path);
  c.valid = Get<bool>(j, "valid", path);
  const json& blocks = At(j, "blocks", path);
  for (size_t k = 0; k < blocks.size(); ++k) {
    const std::string bp = path + "/blocks/" + std::to_string(k);
    GramBlock b;
    b.constraint = Get<int>(blocks[k], "constraint", bp);
    b.basis = Get<std::vector<Exponent>>(blocks[k], "basis", bp);
    const int s = static_cast<int>(b.basis.size());
    const Eigen::MatrixXd re = ParseMatrix(At(blocks[k], "re", bp), s, bp + "/re");
    const Eigen::MatrixXd im = ParseMatrix(At(blocks[k], "im", bp), s, bp + "/im");
    b.gram.resize(s, s);
    b.gram.real() = re;
    b.gram.imag() = im;
    c.blocks.push_back(std::move(b));
  }
  const json& taus = At(j, "equality_multipliers", path);
  for (size_t k = 0; k < taus.size(); ++k) {
    c.equality_multipliers.push_back(
        ParseCPolyTerms(taus[k], n, path + "/equality_multipliers/" + std::to_string(k)));
  }
  const json& rtaus = At(j, "real_equality_multipliers", path);
  for (size_t k = 0; k < rtaus.size(); ++k) {
    const std::string tp = path + "/real_equality_multipliers/" + std::to_string(k);
    RPoly t(m);
    for (size_t q = 0; q < rtaus[k].size(); ++q) {
      const std::string qp = tp + "/" + std::to_string(q);
      t.AddTerm(Get<Exponent>(rtaus[k][q], "alpha", qp), NumAt(rtaus[k][q], "c", qp));
    }
    c.real_equality_multipliers.push_back(std::move(t));
  }
  return c;
}

ordered_json AtomJson(const AtomCheck& a) {
  ordered_json j;
  j["point"] = ComplexVector(a.point);
  j["weight"] = Num(a.weight);
  j["violation"] = Num(a.violation);
  j["objective"] = Num(a.objective);
  return j;
}

AtomCheck ParseAtom(const json& j, const std::string& path) {
  AtomCheck a;
  a.point = ParseComplexVector(At(j, "point", path), path + "/point");
  a.weight = NumAt(j, "weight", path);
  a.violation = NumAt(j, "violation", path);
  a.objective = NumAt(j, "objective", path);
  return a;
}

MomentCheck CheckMoments(const LMIProgram& prog, const Eigen::VectorXd& y) {
  const FeasibilityReport f = CertifyFeasibility(prog.sdp, y);
  return {f.min_eigenvalue, f.max_equality_violation, f.objective};
}

LMIProgram Rebuild(const RunReport& r) {
  BuildOptions bo;
  bo.phase_symmetry = r.phase_symmetry;
  bo.facial_reduction = r.facial_reduction;
  return BuildRelaxation(r.instance, r.hierarchy, r.order, bo);
}

}  // namespace

RunReport RunSolve(const CPOPInstance& inst, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  RunReport r;
  r.instance = inst;
  r.hierarchy = options.hierarchy;
  r.order = options.order;
  r.phase_symmetry = options.build.phase_symmetry;
  r.facial_reduction = options.build.facial_reduction;
  r.tol = options.sdp.tol;

  const LMIProgram prog = BuildRelaxation(inst, options.hierarchy, options.order, options.build);
  r.block_sizes = prog.block_sizes();
  r.num_vars = prog.num_vars();
  r.num_equalities = static_cast<int>(prog.sdp.equalities.size());

  const SdpSolution sol = SolveSdp(prog.sdp, options.sdp);
  r.status = sol.status;
  r.message = sol.message;
  r.iterations = sol.iterations;
  r.relative_gap = sol.relative_gap;
  r.primal_infeasibility = sol.primal_infeasibility;
  r.dual_infeasibility = sol.dual_infeasibility;
  r.min_form_bound = sol.sos_objective;
  r.moment_objective = sol.moment_objective;
  r.raw_bound = inst.sense == Sense::kMaximize ? -sol.sos_objective : sol.sos_objective;
  r.bound = inst.ReportedValue(sol.sos_objective);
  r.y = sol.y;
  r.moment_check = CheckMoments(prog, sol.y);
  r.certificate = RecoverCertificate(prog, sol);

  const bool converged =
      sol.status == SdpStatus::kOptimal || sol.status == SdpStatus::kNearOptimal;
  if (options.extract) {
    r.extraction_run = true;
    if (converged) {
      r.extraction = AnalyzeSolution(prog, sol, options.rank_tol);
    } else {
      r.extraction.status = ExtractionStatus::kFailed;
      r.extraction.message = "solver did not converge";
    }
  }
  if (options.local_search) r.local = LocalUpperBound(inst, options.local);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::string SerializeReport(const RunReport& r) {
  ordered_json doc;
  doc["format"] = "rhsos-report-1";
  doc["instance"] = ordered_json::parse(SerializeProblem(r.instance));
  doc["hierarchy"] = ToString(r.hierarchy);
  doc["order"] = r.order;
  doc["phase_symmetry"] = r.phase_symmetry;
  doc["facial_reduction"] = r.facial_reduction;
  doc["tol"] = Num(r.tol);

  ordered_json solver;
  solver["status"] = ToString(r.status);
  solver["message"] = r.message;
  solver["iterations"] = r.iterations;
  solver["relative_gap"] = Num(r.relative_gap);
  solver["primal_infeasibility"] = Num(r.primal_infeasibility);
  solver["dual_infeasibility"] = Num(r.dual_infeasibility);
  doc["solver"] = std::move(solver);

  doc["bound"] = Num(r.bound);
  doc["raw_bound"] = Num(r.raw_bound);
  doc["min_form_bound"] = Num(r.min_form_bound);
  doc["moment_objective"] = Num(r.moment_objective);

  doc["block_sizes"] = r.block_sizes;
  doc["num_vars"] = r.num_vars;
  doc["num_equalities"] = r.num_equalities;
  doc["y"] = RealVector(r.y);
  doc["moment_check"] = {{"min_eigenvalue", Num(r.moment_check.min_eigenvalue)},
                         {"max_equality_violation", Num(r.moment_check.max_equality_violation)},
                         {"objective", Num(r.moment_check.objective)}};
  doc["certificate"] = CertificateJson(r.certificate);

  if (r.extraction_run) {
    ordered_json ex;
    ex["status"] = ToString(r.extraction.status);
    ex["method"] = r.extraction.method;
    ex["message"] = r.extraction.message;
    ordered_json atoms = ordered_json::array();
    for (const AtomCheck& a : r.extraction.atoms) atoms.push_back(AtomJson(a));
    ex["atoms"] = std::move(atoms);
    ordered_json flat = ordered_json::array();
    for (const FlatnessReport& f : r.extraction.flatness) {
      ordered_json fj;
      fj["t"] = f.t;
      fj["rank_t"] = f.rank_t;
      fj["rank_low"] = f.rank_low;
      fj["flat"] = f.flat;
      fj["hyponormal"] = f.hyponormal ? ordered_json(*f.hyponormal) : ordered_json(nullptr);
      fj["singular_values"] = RealVector(f.singular_values);
      flat.push_back(std::move(fj));
    }
    ex["flatness"] = std::move(flat);
    doc["extraction"] = std::move(ex);
  } else {
    doc["extraction"] = nullptr;
  }

  if (r.local) {
    doc["local_upper_bound"] = {{"point", ComplexVector(r.local->point)},
                                {"min_form_value", Num(r.local->min_form_value)},
                                {"reported_value", Num(r.local->reported_value)},
                                {"violation", Num(r.local->violation)}};
  } else {
    doc["local_upper_bound"] = nullptr;
  }
  doc["seconds"] = Num(r.seconds);
  return doc.dump(2) + "\n";
}

RunReport ParseReport(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ProblemParseError("byte " + std::to_string(e.byte), "syntax error");
  }
  const std::string root;
  if (Get<std::string>(doc, "format", root) != "rhsos-report-1") {
    throw ProblemParseError("/format", "unsupported report format");
  }
  RunReport r;
  r.instance = ParseProblem(At(doc, "instance", root).dump());
  try {
    r.hierarchy = ParseHierarchy(Get<std::string>(doc, "hierarchy", root));
  } catch (const std::invalid_argument& e) {
    throw ProblemParseError("/hierarchy", e.what());
  }
  r.order = Get<int>(doc, "order", root);
  r.phase_symmetry = Get<bool>(doc, "phase_symmetry", root);
  r.facial_reduction = Get<bool>(doc, "facial_reduction", root);
  r.tol = NumAt(doc, "tol", root);

  const json& solver = At(doc, "solver", root);
  r.status = ParseStatus(Get<std::string>(solver, "status", "/solver"), "/solver/status");
  r.message = Get<std::string>(solver, "message", "/solver");
  r.iterations = Get<int>(solver, "iterations", "/solver");
  r.relative_gap = NumAt(solver, "relative_gap", "/solver");
  r.primal_infeasibility = NumAt(solver, "primal_infeasibility", "/solver");
  r.dual_infeasibility = NumAt(solver, "dual_infeasibility", "/solver");

  r.bound = NumAt(doc, "bound", root);
  r.raw_bound = NumAt(doc, "raw_bound", root);
  r.min_form_bound = NumAt(doc, "min_form_bound", root);
  r.moment_objective = NumAt(doc, "moment_objective", root);
  r.block_sizes = Get<std::vector<int>>(doc, "block_sizes", root);
  r.num_vars = Get<int>(doc, "num_vars", root);
  r.num_equalities = Get<int>(doc, "num_equalities", root);
  r.y = ParseRealVector(At(doc, "y", root), "/y");
  const json& mc = At(doc, "moment_check", root);
  r.moment_check.min_eigenvalue = NumAt(mc, "min_eigenvalue", "/moment_check");
  r.moment_check.max_equality_violation =
      NumAt(mc, "max_equality_violation", "/moment_check");
  r.moment_check.objective = NumAt(mc, "objective", "/moment_check");
  const int m = 2 * r.instance.n;
  r.certificate =
      ParseCertificate(At(doc, "certificate", root), r.hierarchy, r.instance.n, m, "/certificate");

  const json& ex = At(doc, "extraction", root);
  if (!ex.is_null()) {
    r.extraction_run = true;
    r.extraction.status =
        ParseExtractionStatus(Get<std::string>(ex, "status", "/extraction"), "/extraction/status");
    r.extraction.method = Get<std::string>(ex, "method", "/extraction");
    r.extraction.message = Get<std::string>(ex, "message", "/extraction");
    const json& atoms = At(ex, "atoms", "/extraction");
    for (size_t k = 0; k < atoms.size(); ++k) {
      r.extraction.atoms.push_back(ParseAtom(atoms[k], "/extraction/atoms/" + std::to_string(k)));
    }
    r.extraction.measure.n = r.instance.n;
    for (const AtomCheck& a : r.extraction.atoms) {
      r.extraction.measure.atoms.push_back(a.point);
      r.extraction.measure.weights.push_back(a.weight);
    }
    const json& flat = At(ex, "flatness", "/extraction");
    for (size_t k = 0; k < flat.size(); ++k) {
      const std::string fp = "/extraction/flatness/" + std::to_string(k);
      FlatnessReport f;
      f.t = Get<int>(flat[k], "t", fp);
      f.rank_t = Get<int>(flat[k], "rank_t", fp);
      f.rank_low = Get<int>(flat[k], "rank_low", fp);
      f.flat = Get<bool>(flat[k], "flat", fp);
      const json& h = At(flat[k], "hyponormal", fp);
      if (!h.is_null()) f.hyponormal = h.get<bool>();
      f.singular_values = ParseRealVector(At(flat[k], "singular_values", fp), fp);
      r.extraction.flatness.push_back(std::move(f));
    }
  }
  const json& local = At(doc, "local_upper_bound", root);
  if (!local.is_null()) {
    LocalResult l;
    l.point = ParseComplexVector(At(local, "point", "/local_upper_bound"), "/local_upper_bound");
    l.min_form_value = NumAt(local, "min_form_value", "/local_upper_bound");
    l.reported_value = NumAt(local, "reported_value", "/local_upper_bound");
    l.violation = NumAt(local, "violation", "/local_upper_bound");
    r.local = std::move(l);
  }
  r.seconds = NumAt(doc, "seconds", root);
  return r;
}

VerifyResult VerifyReport(const RunReport& r, double tol) {
  VerifyResult out;
  auto compare = [&](const std::string& what, double recorded, double recomputed) {
    const double d = std::abs(recorded - recomputed);
    if (std::isnan(recorded) && std::isnan(recomputed)) return;
    out.max_discrepancy = std::max(out.max_discrepancy, d);
    if (!(d <= tol * std::max(1.0, std::abs(recorded)))) {
      out.ok = false;
      out.failures.push_back(what + ": recorded " + std::to_string(recorded) +
                             ", recomputed " + std::to_string(recomputed));
    }
  };

  const LMIProgram prog = Rebuild(r);
  if (prog.num_vars() != r.y.size() || prog.block_sizes() != r.block_sizes) {
    out.ok = false;
    out.failures.push_back("rebuilt relaxation does not match the recorded layout");
    return out;
  }
  const MomentCheck mc = CheckMoments(prog, r.y);
  compare("moment min eigenvalue", r.moment_check.min_eigenvalue, mc.min_eigenvalue);
  compare("moment equality violation", r.moment_check.max_equality_violation,
          mc.max_equality_violation);
  compare("moment objective", r.moment_check.objective, mc.objective);

  Certificate cert = r.certificate;
  if (cert.blocks.size() != prog.blocks.size()) {
    out.ok = false;
    out.failures.push_back("certificate block count does not match the relaxation");
    return out;
  }
  EvaluateCertificate(prog, cert);
  compare("certificate residual", r.certificate.residual, cert.residual);
  compare("certificate min Gram eigenvalue", r.certificate.min_gram_eigenvalue,
          cert.min_gram_eigenvalue);
  if (cert.valid != r.certificate.valid) {
    out.ok = false;
    out.failures.push_back("certificate validity flag differs");
  }
  compare("reported bound", r.bound, r.instance.ReportedValue(r.min_form_bound));

  if (r.extraction_run) {
    for (size_t k = 0; k < r.extraction.atoms.size(); ++k) {
      const AtomCheck& a = r.extraction.atoms[k];
      const std::string tag = "atom " + std::to_string(k);
      if (static_cast<int>(a.point.size()) != r.instance.n) {
        out.ok = false;
        out.failures.push_back(tag + " has the wrong dimension");
        continue;
      }
      const double violation = r.instance.MaxViolation(a.point);
      compare(tag + " violation", a.violation, violation);
      compare(tag + " objective", a.objective, r.instance.objective.Evaluate(a.point).real());
      if (r.extraction.status == ExtractionStatus::kExtracted && violation > 1e-4) {
        out.ok = false;
        out.failures.push_back(tag + " is infeasible");
      }
    }
  }
  if (r.local) {
    if (static_cast<int>(r.local->point.size()) != r.instance.n) {
      out.ok = false;
      out.failures.push_back("local point has the wrong dimension");
    } else {
      compare("local violation", r.local->violation, r.instance.MaxViolation(r.local->point));
      compare("local value", r.local->min_form_value,
              r.instance.MinimizationObjective().Evaluate(r.local->point).real());
    }
  }
  return out;
}

}  // namespace rhsos
