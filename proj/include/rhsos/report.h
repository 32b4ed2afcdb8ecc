#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rhsos/certificate.h"
#include "rhsos/extraction.h"
#include "rhsos/local_search.h"
#include "rhsos/poly.h"
#include "rhsos/relaxation.h"
#include "rhsos/sdp_solver.h"

namespace rhsos {

struct RunOptions {
  Hierarchy hierarchy = Hierarchy::kReal;
  int order = 1;
  SdpOptions sdp;
  BuildOptions build;
  bool extract = false;
  double rank_tol = kDefaultRankTol;
  /// Run LocalUpperBound when the constraint geometry allows it.
  bool local_search = false;
  LocalSearchOptions local;
};

/// Numeric feasibility of the recorded moment vector.
struct MomentCheck {
  double min_eigenvalue = 0.0;
  double max_equality_violation = 0.0;
  double objective = 0.0;
};

/// Everything needed to re-check a run without re-solving it.
struct RunReport {
  CPOPInstance instance;
  Hierarchy hierarchy = Hierarchy::kReal;
  int order = 0;
  bool phase_symmetry = false;
  bool facial_reduction = true;
  double tol = 0.0;

  SdpStatus status = SdpStatus::kNumericalFailure;
  std::string message;
  int iterations = 0;
  double relative_gap = 0.0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  /// Lower bound on the minimization form (sum-of-squares side).
  double min_form_bound = 0.0;
  double moment_objective = 0.0;
  /// Bound in the instance's sense before the value transform.
  double raw_bound = 0.0;
  /// Bound after the value transform; the number compared against tables.
  double bound = 0.0;

  std::vector<int> block_sizes;
  int num_vars = 0;
  int num_equalities = 0;
  Eigen::VectorXd y;
  MomentCheck moment_check;
  Certificate certificate;

  bool extraction_run = false;
  ExtractionResult extraction;
  std::optional<LocalResult> local;
  double seconds = 0.0;
};

/// Builds, solves, recovers the certificate and optionally extracts atoms
/// and samples a local upper bound. Build errors propagate as exceptions.
RunReport RunSolve(const CPOPInstance& inst, const RunOptions& options);

/// Report document with stable field names. Doubles use the shortest
/// round-trip decimal form, so parsing restores them bit for bit.
std::string SerializeReport(const RunReport& report);

/// Throws ProblemParseError on malformed documents.
RunReport ParseReport(const std::string& text);

struct VerifyResult {
  bool ok = true;
  /// Largest |recomputed - recorded| over all recorded residuals.
  double max_discrepancy = 0.0;
  std::vector<std::string> failures;
};

/// Rebuilds the relaxation (without solving) and recomputes the moment
/// feasibility, the certificate residual and Gram eigenvalues, and every
/// atom's violation and objective. Fails when a recomputed quantity differs
/// from the record by more than `tol` (relative to max(1, |recorded|)) or
/// when a recorded atom violates the constraints by more than 1e-4.
VerifyResult VerifyReport(const RunReport& report, double tol = 1e-9);

}  // namespace rhsos
