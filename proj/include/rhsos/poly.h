#pragma once

#include <complex>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rhsos {

using Complex = std::complex<double>;
using Exponent = std::vector<int>;

/// Raised for malformed polynomial data or instances.
class MalformedInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Sum of entries.
int Degree(const Exponent& e);

/// Graded order on exponent vectors: total degree first, then the vector
/// with the larger leading entry comes first (so z_1 precedes z_2).
bool GradedLexLess(const Exponent& a, const Exponent& b);

/// Exponent pair (beta, gamma) of the monomial z^beta conj(z)^gamma.
struct ExponentPair {
  Exponent beta;
  Exponent gamma;

  int num_vars() const { return static_cast<int>(beta.size()); }
  ExponentPair Swapped() const { return {gamma, beta}; }
  bool operator==(const ExponentPair&) const = default;
};

/// Canonical term order: graded by |beta|+|gamma|, then beta, then gamma.
struct ExponentPairLess {
  bool operator()(const ExponentPair& a, const ExponentPair& b) const;
};

/// Coefficients with magnitude below this are dropped after arithmetic.
inline constexpr double kPruneTolerance = 1e-14;

/// Polynomial in z and conj(z) with complex coefficients.
///
/// Terms are kept in canonical order with coefficient parts below
/// kPruneTolerance removed, so structural comparisons are exact.
class CPoly {
 public:
  using TermMap = std::map<ExponentPair, Complex, ExponentPairLess>;

  explicit CPoly(int num_vars = 0) : n_(num_vars) {}

  static CPoly Constant(int num_vars, Complex c);
  /// z_i.
  static CPoly Var(int num_vars, int i);
  /// conj(z_i).
  static CPoly ConjVar(int num_vars, int i);
  /// |z_i|^2.
  static CPoly AbsSquared(int num_vars, int i);
  static CPoly Monomial(const ExponentPair& e, Complex c = 1.0);

  int num_vars() const { return n_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  Complex coefficient(const ExponentPair& e) const;

  /// Adds c to the coefficient of e. Throws MalformedInput on arity mismatch.
  void AddTerm(const ExponentPair& e, Complex c);

  /// The polynomial conj(p(z)) written in (z, conj z): swaps each exponent
  /// pair and conjugates coefficients.
  CPoly Conjugate() const;
  /// (p + Conjugate(p)) / 2, which is exactly self-conjugate.
  CPoly HermitianPart() const;
  /// Coefficient-wise real parts.
  CPoly RealCoefficients() const;

  bool IsSelfConjugate() const;
  bool HasRealCoefficients() const;
  bool HasImaginaryCoefficients() const;

  /// max over terms of max(|beta|, |gamma|).
  int Degree() const;
  /// max |beta| over terms.
  int HolomorphicDegree() const;
  /// max |gamma| over terms.
  int AntiholomorphicDegree() const;

  Complex Evaluate(std::span<const Complex> z) const;
  /// d p / d conj(z_i), treating z and conj(z) as independent.
  CPoly ConjDerivative(int i) const;
  double MaxAbsCoefficient() const;

  CPoly& operator+=(const CPoly& o);
  CPoly& operator-=(const CPoly& o);
  CPoly& operator*=(Complex s);
  CPoly operator-() const;
  friend CPoly operator+(CPoly a, const CPoly& b) { return a += b; }
  friend CPoly operator-(CPoly a, const CPoly& b) { return a -= b; }
  friend CPoly operator*(const CPoly& a, const CPoly& b);
  friend CPoly operator*(CPoly a, Complex s) { return a *= s; }
  friend CPoly operator*(Complex s, CPoly a) { return a *= s; }
  CPoly Pow(int k) const;

  bool operator==(const CPoly& o) const {
    return n_ == o.n_ && terms_ == o.terms_;
  }

  std::string ToString() const;

 private:
  void CheckArity(const ExponentPair& e) const;
  void CheckArity(const CPoly& o) const;

  int n_;
  TermMap terms_;
};

/// Polynomial in real variables with real coefficients.
class RPoly {
 public:
  struct Less {
    bool operator()(const Exponent& a, const Exponent& b) const {
      return GradedLexLess(a, b);
    }
  };
  using TermMap = std::map<Exponent, double, Less>;

  explicit RPoly(int num_vars = 0) : m_(num_vars) {}

  int num_vars() const { return m_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  double coefficient(const Exponent& e) const;
  void AddTerm(const Exponent& e, double c);
  int Degree() const;
  double Evaluate(std::span<const double> x) const;

 private:
  int m_;
  TermMap terms_;
};

enum class Sense { kMinimize, kMaximize };

/// Map applied to the optimal value before it is reported.
enum class ValueTransform { kNone, kSqrt };

/// Complex polynomial optimization problem.
///
/// `eqs` are self-conjugate (real-valued) equations h = 0; `complex_eqs`
/// are general equations h = 0 whose real and imaginary parts both vanish.
struct CPOPInstance {
  std::string name;
  int n = 0;
  Sense sense = Sense::kMinimize;
  CPoly objective;
  std::vector<CPoly> ineqs;
  std::vector<CPoly> eqs;
  std::vector<CPoly> complex_eqs;
  std::optional<double> conjectured_optimum;
  ValueTransform value_transform = ValueTransform::kNone;

  bool real_coefficients() const;
  bool self_conjugate() const;
  /// Throws MalformedInput on arity mismatch or a non-self-conjugate
  /// objective, inequality or real equality.
  void Validate() const;
  /// Objective in minimization form (negated for maximization).
  CPoly MinimizationObjective() const;
  /// Applies the sense flip and value transform to a minimization value.
  double ReportedValue(double min_form_value) const;
  /// True when all constraints hold at z within tol.
  bool IsFeasible(std::span<const Complex> z, double tol) const;
  /// Largest constraint violation at z.
  double MaxViolation(std::span<const Complex> z) const;
};

struct DegreeStats {
  int d_f = 0;
  std::vector<int> d_g;
  /// Real equalities first, then complex equalities.
  std::vector<int> d_h;
  int d_K = 2;
  int d_min = 0;
};

DegreeStats ComputeDegreeStats(const CPOPInstance& inst);

/// Real reformulation in x in R^{2n} with z_j = x_j + i x_{n+j}.
struct RealPop {
  int m = 0;
  Sense sense = Sense::kMinimize;
  RPoly objective;
  std::vector<RPoly> ineqs;
  std::vector<RPoly> eqs;
};

/// Expands a polynomial under z_j = x_j + i x_{n+j}; returns real and
/// imaginary coefficient parts.
std::pair<RPoly, RPoly> ExpandToReal(const CPoly& p);

/// Throws MalformedInput if a real-valued polynomial has an imaginary
/// residue above 1e-12 after expansion.
RealPop ToRealPop(const CPOPInstance& inst);

}  // namespace rhsos
