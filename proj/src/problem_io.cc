#include "rhsos/problem_io.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace rhsos {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// Line and column (both 1-based) of a byte offset.
std::string LineColumn(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  int line = 1;
  int col = 1;
  for (std::size_t i = 0; i < offset; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ":" + std::to_string(col);
}

std::string Describe(const ExponentPair& e) {
  auto vec = [](const Exponent& x) {
    std::string s = "[";
    for (size_t i = 0; i < x.size(); ++i) s += (i ? "," : "") + std::to_string(x[i]);
    return s + "]";
  };
  return "beta=" + vec(e.beta) + " gamma=" + vec(e.gamma);
}

Exponent ParseExponent(const json& j, int n, const std::string& path) {
  if (!j.is_array()) throw ProblemParseError(path, "expected an array");
  if (static_cast<int>(j.size()) != n) {
    throw ProblemParseError(path, "expected " + std::to_string(n) + " entries");
  }
  Exponent e(n);
  for (int i = 0; i < n; ++i) {
    if (!j[i].is_number_integer() || j[i].get<long long>() < 0) {
      throw ProblemParseError(path + "/" + std::to_string(i),
                              "expected a non-negative integer");
    }
    e[i] = j[i].get<int>();
  }
  return e;
}

double ParseNumber(const json& term, const char* key, const std::string& path) {
  if (!term.contains(key)) return 0.0;
  const json& v = term.at(key);
  if (!v.is_number()) throw ProblemParseError(path + "/" + key, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ProblemParseError(path + "/" + key, "not finite");
  return d;
}

// Parses a term list; when `self_conjugate` is set, names the first term
// whose conjugate partner does not match.
CPoly ParsePoly(const json& j, int n, const std::string& path, bool self_conjugate) {
  if (!j.is_array()) throw ProblemParseError(path, "expected a term list");
  CPoly p(n);
  std::vector<ExponentPair> order;
  for (size_t k = 0; k < j.size(); ++k) {
    const std::string tp = path + "/" + std::to_string(k);
    const json& t = j[k];
    if (!t.is_object()) throw ProblemParseError(tp, "expected a term object");
    for (const char* key : {"beta", "gamma"}) {
      if (!t.contains(key)) throw ProblemParseError(tp, std::string("missing '") + key + "'");
    }
    for (auto it = t.begin(); it != t.end(); ++it) {
      if (it.key() != "beta" && it.key() != "gamma" && it.key() != "re" && it.key() != "im") {
        throw ProblemParseError(tp, "unknown field '" + it.key() + "'");
      }
    }
    ExponentPair e{ParseExponent(t.at("beta"), n, tp + "/beta"),
                   ParseExponent(t.at("gamma"), n, tp + "/gamma")};
    p.AddTerm(e, Complex(ParseNumber(t, "re", tp), ParseNumber(t, "im", tp)));
    order.push_back(std::move(e));
  }
  if (self_conjugate) {
    for (size_t k = 0; k < order.size(); ++k) {
      const Complex c = p.coefficient(order[k]);
      const Complex partner = p.coefficient(order[k].Swapped());
      if (std::abs(c - std::conj(partner)) > 1e-12 * std::max(1.0, std::abs(c))) {
        throw ProblemParseError(path + "/" + std::to_string(k),
                                "term " + Describe(order[k]) +
                                    " has no matching conjugate partner");
      }
    }
    p = p.HermitianPart();
  }
  return p;
}

std::vector<CPoly> ParsePolyList(const json& doc, const char* key, int n,
                                 bool self_conjugate) {
  std::vector<CPoly> out;
  if (!doc.contains(key)) return out;
  const json& list = doc.at(key);
  const std::string path = std::string("/") + key;
  if (!list.is_array()) throw ProblemParseError(path, "expected a list of polynomials");
  for (size_t i = 0; i < list.size(); ++i) {
    out.push_back(ParsePoly(list[i], n, path + "/" + std::to_string(i), self_conjugate));
  }
  return out;
}

ordered_json TermsJson(const CPoly& p) {
  ordered_json terms = ordered_json::array();
  for (const auto& [e, c] : p.terms()) {
    ordered_json t;
    t["beta"] = e.beta;
    t["gamma"] = e.gamma;
    t["re"] = c.real();
    t["im"] = c.imag();
    terms.push_back(std::move(t));
  }
  return terms;
}

}  // namespace

CPOPInstance ParseProblem(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ProblemParseError(LineColumn(text, e.byte == 0 ? 0 : e.byte - 1),
                            "syntax error");
  }
  if (!doc.is_object()) throw ProblemParseError("/", "expected an object");
  static const char* kKnown[] = {"name", "n", "sense", "objective", "ineqs", "eqs",
                                 "complex_eqs", "conjectured_optimum",
                                 "value_transform"};
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (std::find_if(std::begin(kKnown), std::end(kKnown),
                     [&](const char* k) { return it.key() == k; }) == std::end(kKnown)) {
      throw ProblemParseError("/" + it.key(), "unknown field");
    }
  }
  if (!doc.contains("n") || !doc.at("n").is_number_integer() || doc.at("n").get<int>() < 1) {
    throw ProblemParseError("/n", "expected a positive integer");
  }
  if (!doc.contains("objective")) throw ProblemParseError("/objective", "missing");

  CPOPInstance inst;
  inst.n = doc.at("n").get<int>();
  if (doc.contains("name")) {
    if (!doc.at("name").is_string()) throw ProblemParseError("/name", "expected a string");
    inst.name = doc.at("name").get<std::string>();
  }
  if (doc.contains("sense")) {
    const json& s = doc.at("sense");
    if (s == "min") {
      inst.sense = Sense::kMinimize;
    } else if (s == "max") {
      inst.sense = Sense::kMaximize;
    } else {
      throw ProblemParseError("/sense", "expected \"min\" or \"max\"");
    }
  }
  if (doc.contains("value_transform")) {
    const json& v = doc.at("value_transform");
    if (v == "none") {
      inst.value_transform = ValueTransform::kNone;
    } else if (v == "sqrt") {
      inst.value_transform = ValueTransform::kSqrt;
    } else {
      throw ProblemParseError("/value_transform", "expected \"none\" or \"sqrt\"");
    }
  }
  if (doc.contains("conjectured_optimum") && !doc.at("conjectured_optimum").is_null()) {
    if (!doc.at("conjectured_optimum").is_number()) {
      throw ProblemParseError("/conjectured_optimum", "expected a number");
    }
    inst.conjectured_optimum = doc.at("conjectured_optimum").get<double>();
  }
  inst.objective = ParsePoly(doc.at("objective"), inst.n, "/objective", true);
  inst.ineqs = ParsePolyList(doc, "ineqs", inst.n, true);
  inst.eqs = ParsePolyList(doc, "eqs", inst.n, true);
  inst.complex_eqs = ParsePolyList(doc, "complex_eqs", inst.n, false);
  inst.Validate();
  return inst;
}

std::string SerializeProblem(const CPOPInstance& inst) {
  ordered_json doc;
  doc["name"] = inst.name;
  doc["n"] = inst.n;
  doc["sense"] = inst.sense == Sense::kMaximize ? "max" : "min";
  doc["objective"] = TermsJson(inst.objective);
  auto list = [](const std::vector<CPoly>& ps) {
    ordered_json a = ordered_json::array();
    for (const CPoly& p : ps) a.push_back(TermsJson(p));
    return a;
  };
  doc["ineqs"] = list(inst.ineqs);
  doc["eqs"] = list(inst.eqs);
  doc["complex_eqs"] = list(inst.complex_eqs);
  if (inst.conjectured_optimum) {
    doc["conjectured_optimum"] = *inst.conjectured_optimum;
  } else {
    doc["conjectured_optimum"] = nullptr;
  }
  doc["value_transform"] = inst.value_transform == ValueTransform::kSqrt ? "sqrt" : "none";
  return doc.dump(2) + "\n";
}

CPOPInstance LoadProblem(const std::string& path) { return ParseProblem(ReadTextFile(path)); }

void SaveProblem(const std::string& path, const CPOPInstance& inst) {
  WriteTextFile(path, SerializeProblem(inst));
}

void RequireRealCoefficients(const CPOPInstance& inst) {
  auto check = [](const CPoly& p, const std::string& where) {
    for (const auto& [e, c] : p.terms()) {
      if (c.imag() != 0.0) {
        throw ProblemParseError(where, "term " + Describe(e) +
                                           " has an imaginary coefficient; the real "
                                           "hierarchy needs real coefficients");
      }
    }
  };
  check(inst.objective, "/objective");
  for (size_t i = 0; i < inst.ineqs.size(); ++i) check(inst.ineqs[i], "/ineqs/" + std::to_string(i));
  for (size_t i = 0; i < inst.eqs.size(); ++i) check(inst.eqs[i], "/eqs/" + std::to_string(i));
  for (size_t i = 0; i < inst.complex_eqs.size(); ++i) {
    check(inst.complex_eqs[i], "/complex_eqs/" + std::to_string(i));
  }
}

std::string ReadTextFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteTextFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace rhsos
