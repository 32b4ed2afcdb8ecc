#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rhsos {

/// Coefficient of variable `var` at symmetric position (row, col), row <= col.
/// `var == -1` marks the constant matrix.
struct BlockEntry {
  int row = 0;
  int col = 0;
  int var = -1;
  double value = 0.0;
};

struct SdpBlock {
  int size = 0;
  std::vector<BlockEntry> entries;
};

struct LinearEquality {
  std::vector<std::pair<int, double>> terms;
  double rhs = 0.0;
};

/// Linear matrix inequality problem in moment form:
///
///   minimize    cost' y + cost_constant
///   subject to  S_k(y) = C_k + sum_i y_i F_{k,i}  PSD  for every block k,
///               a_j' y = b_j                        for every equality j.
///
/// Its conic dual is the sum-of-squares side: maximize
/// cost_constant - sum_k <C_k, X_k> + b' lambda over PSD X_k with
/// sum_k <F_{k,i}, X_k> + (A' lambda)_i = cost_i.
struct SdpProblem {
  int num_vars = 0;
  Eigen::VectorXd cost;
  double cost_constant = 0.0;
  std::vector<SdpBlock> blocks;
  std::vector<LinearEquality> equalities;
};

enum class EqualityMode { kAuto, kEliminate, kKkt };

struct SdpOptions {
  /// Target for relative gap and both scaled infeasibilities.
  double tol = 1e-8;
  int max_iter = 200;
  EqualityMode equality_mode = EqualityMode::kAuto;
  bool verbose = false;
};

enum class SdpStatus {
  kOptimal,
  /// Stalled before `tol`, but the best iterate meets 1000 * tol on the gap
  /// and both infeasibilities. The attached iterate is that best one.
  kNearOptimal,
  kMaxIterations,
  kInfeasibleSuspected,
  kNumericalFailure,
};

std::string ToString(SdpStatus s);

struct IterateRecord {
  int iteration = 0;
  double moment_objective = 0.0;
  double sos_objective = 0.0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  double mu = 0.0;
  double step_primal = 0.0;
  double step_dual = 0.0;
};

struct SdpSolution {
  SdpStatus status = SdpStatus::kNumericalFailure;
  std::string message;
  /// Moment vector in the original variables.
  Eigen::VectorXd y;
  /// Slack matrices S_k(y).
  std::vector<Eigen::MatrixXd> slack;
  /// Dual Gram matrices X_k.
  std::vector<Eigen::MatrixXd> gram;
  /// Multipliers of the equalities (least-squares fit of the dual residual).
  Eigen::VectorXd multipliers;
  /// cost' y + cost_constant (upper bound side).
  double moment_objective = 0.0;
  /// Dual objective (lower bound side).
  double sos_objective = 0.0;
  double relative_gap = 0.0;
  /// Scaled residual of the sum-of-squares equations.
  double primal_infeasibility = 0.0;
  /// Scaled residual of the moment-side constraints.
  double dual_infeasibility = 0.0;
  int iterations = 0;
  bool used_kkt = false;
  int reduced_vars = 0;
  double seconds = 0.0;
  std::vector<IterateRecord> history;
};

/// Infeasible primal-dual path-following method with Nesterov-Todd scaling
/// and Mehrotra predictor-corrector steps. Deterministic and single-threaded.
SdpSolution SolveSdp(const SdpProblem& problem, const SdpOptions& options = {});

struct FeasibilityReport {
  std::vector<double> min_eigenvalues;
  double min_eigenvalue = 0.0;
  double max_equality_violation = 0.0;
  double objective = 0.0;
};

FeasibilityReport CertifyFeasibility(const SdpProblem& problem,
                                     const Eigen::VectorXd& y);

/// Dense symmetric S_k(y).
Eigen::MatrixXd EvaluateBlock(const SdpBlock& block, const Eigen::VectorXd& y);

/// Plain-text dump of the problem data as sparse triplets.
void WriteSdpDump(const SdpProblem& problem, std::ostream& out);

}  // namespace rhsos
