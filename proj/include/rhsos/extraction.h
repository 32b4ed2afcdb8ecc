#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rhsos/moments.h"
#include "rhsos/relaxation.h"
#include "rhsos/sdp_solver.h"

namespace rhsos {

/// Extraction could not produce validated atoms.
class ExtractionFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kDefaultRankTol = 1e-6;

struct RankResult {
  int rank = 0;
  Eigen::VectorXd singular_values;
};

/// rank = #{sigma_i > tol * max(1, sigma_1)}.
RankResult NumericalRank(const Eigen::MatrixXcd& m, double tol = kDefaultRankTol);

struct FlatnessReport {
  int t = 0;
  int rank_t = 0;
  int rank_low = 0;
  bool flat = false;
  /// Unset when hyponormality was not tested.
  std::optional<bool> hyponormal;
  Eigen::VectorXd singular_values;
};

/// Compares rank M_t(y) with rank M_{t-d_K}(y). Throws std::invalid_argument
/// if t < d_K or t exceeds the moment order.
FlatnessReport CheckFlatness(const MomentSequence& y, int t, int d_k,
                             double tol = kDefaultRankTol);

/// Per-variable PSD test of [[M, M(conj(z_i) y)], [M(z_i y), M(|z_i|^2 y)]]
/// at order t - d_K, with eigenvalue floor -1e-8 (relative to the norm).
std::vector<bool> CheckHyponormality(const MomentSequence& y, int t, int d_k);

/// Single atom z_i = y_{e_i,0} / y_{0,0}; requires rank M_t(y) = 1 for some
/// t <= order (checked at t = 1 and at the full order).
AtomicMeasure ExtractRank1(const MomentSequence& y, double tol = kDefaultRankTol);

enum class ShiftCase { kSymmetric, kRotationScaling };

struct ShiftClassification {
  ShiftCase shift_case = ShiftCase::kSymmetric;
  double fit_error = 0.0;
};

/// Decides whether every 2x2 matrix is symmetric or of the form
/// [[a, -b], [b, a]]; throws ExtractionFailure if neither fits within 1e-6.
ShiftClassification ClassifyShiftPair(const std::vector<Eigen::Matrix2d>& shifts,
                                      double r);

/// Real 2x2 multiplication operators of a real rank-2 moment sequence, in
/// the basis of the leading eigenvectors of M_t.
std::vector<Eigen::Matrix2d> RealShiftOperators(const MomentSequence& y, int t,
                                                int d_k);

/// Conjugate pair from the first-row-pinned rank-2 factorization of M_1 of
/// the symmetrized moments: returns 1/2 delta_z + 1/2 delta_conj(z).
AtomicMeasure ConjugatePairFromM1(const MomentSequence& y);

/// Rank-2 extraction: conjugate-pair factorization first, falling back to
/// joint diagonalization of the shifts at order t when `validate` rejects it.
/// Without a validator the pair must reproduce the moments up to order t.
AtomicMeasure ExtractRank2(
    const MomentSequence& y, int t, int d_k,
    const std::function<bool(const AtomicMeasure&)>& validate = nullptr);

/// General flat extraction through commuting multiplication operators.
AtomicMeasure ExtractFlat(const MomentSequence& y, int t, int d_k,
                          double tol = kDefaultRankTol);

/// y' = (y + conj y) / 2, i.e. the real part of every moment.
MomentSequence SymmetrizeMoments(const MomentSequence& y);

/// Largest |y_{b,g} - moment of mu| over |b|, |g| <= t.
double MomentReproductionError(const MomentSequence& y, const AtomicMeasure& mu,
                               int t);

/// Hausdorff distance between atom sets (points only).
double AtomDistance(const AtomicMeasure& a, const AtomicMeasure& b);

struct AtomCheck {
  std::vector<Complex> point;
  double weight = 0.0;
  double violation = 0.0;
  /// Objective in the instance's own sense.
  double objective = 0.0;
};

enum class ExtractionStatus { kExtracted, kNoCertificate, kFailed };

std::string ToString(ExtractionStatus s);

struct ExtractionResult {
  ExtractionStatus status = ExtractionStatus::kNoCertificate;
  std::string method;
  std::string message;
  AtomicMeasure measure;
  std::vector<AtomCheck> atoms;
  std::vector<FlatnessReport> flatness;
};

/// Runs rank / flatness detection on a solved relaxation and extracts atoms.
/// Atoms must satisfy the constraints within 1e-4 and match the bound within
/// 1e-3 (1 + |bound|), otherwise the result is kFailed.
ExtractionResult AnalyzeSolution(const LMIProgram& prog, const SdpSolution& sol,
                                 double rank_tol = kDefaultRankTol);

}  // namespace rhsos
