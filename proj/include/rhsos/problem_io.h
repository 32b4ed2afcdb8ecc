#pragma once

#include <stdexcept>
#include <string>

#include "rhsos/poly.h"

namespace rhsos {

/// Malformed problem document. `location` names the line/column for syntax
/// errors or the JSON path of the offending entry (e.g. "/ineqs/0/3").
class ProblemParseError : public std::runtime_error {
 public:
  ProblemParseError(const std::string& location, const std::string& what)
      : std::runtime_error(location + ": " + what), location_(location) {}
  const std::string& location() const { return location_; }

 private:
  std::string location_;
};

/// Parses a problem document:
///
///   {
///     "name": "unimodular-triple", "n": 3, "sense": "min",
///     "objective": [{"beta": [1,0,0], "gamma": [0,1,0], "re": 0.5, "im": 0}],
///     "ineqs": [[...terms...]], "eqs": [[...]], "complex_eqs": [[...]],
///     "conjectured_optimum": -3.75, "value_transform": "none"
///   }
///
/// Only "n" and "objective" are required. Self-conjugacy of the objective,
/// inequalities and equalities is checked; the error names the first term
/// whose conjugate partner is missing or mismatched.
CPOPInstance ParseProblem(const std::string& text);

/// Canonical text: terms in canonical order, doubles in shortest
/// round-trip form, two-space indentation.
std::string SerializeProblem(const CPOPInstance& inst);

/// File wrappers; I/O failures raise std::runtime_error.
CPOPInstance LoadProblem(const std::string& path);
void SaveProblem(const std::string& path, const CPOPInstance& inst);

/// Throws ProblemParseError when a coefficient has a nonzero imaginary part;
/// used before building the real hierarchy.
void RequireRealCoefficients(const CPOPInstance& inst);

std::string ReadTextFile(const std::string& path);
void WriteTextFile(const std::string& path, const std::string& text);

}  // namespace rhsos
