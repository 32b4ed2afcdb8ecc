#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "rhsos/moments.h"
#include "rhsos/poly.h"
#include "rhsos/sdp_solver.h"

namespace rhsos {

enum class Hierarchy {
  /// One real scalar per unordered moment key; needs real coefficients.
  kReal,
  /// Complex moments, Hermitian blocks embedded as real symmetric ones.
  kComplex,
  /// Classical real moment hierarchy on the 2n-variable reformulation.
  kRealPop,
};

std::string ToString(Hierarchy h);
Hierarchy ParseHierarchy(const std::string& s);

/// Relaxation order below the minimum degree requirement.
class OrderTooSmall : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Instance not admissible for the requested hierarchy.
class HierarchyMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct BuildOptions {
  /// Restrict to moments allowed by the phase symmetry of the data and split
  /// the matrices into coset blocks. Exact; changes only the block layout.
  bool phase_symmetry = false;
  /// Drop block rows z^{L+a} (x^{L+a} for real POPs) whose kernel relation
  /// h z^a is already enforced by the equality rows, where z^L is the leading
  /// monomial of a holomorphic (or real-POP) equality h. The kept principal
  /// submatrix is PSD iff the full block is, so the bound is unchanged.
  bool facial_reduction = true;
};

/// What an SDP block represents.
struct BlockInfo {
  /// -1 for the moment matrix, otherwise the inequality index.
  int constraint = -1;
  /// Row/column exponents of the (Hermitian) block before any embedding.
  std::vector<Exponent> basis;
  /// True when the SDP block is the 2s x 2s real embedding of a Hermitian one.
  bool embedded = false;
  /// Rows removed by facial reduction.
  int eliminated = 0;
};

/// Which real scalar an SDP variable is.
struct VariableInfo {
  /// Moment key id (complex hierarchies) or real moment index (real POP).
  int key = -1;
  bool imaginary = false;
};

/// One source of an equality row: row = part(L(h z^beta conj(z)^gamma)) / scale.
struct EqualityOrigin {
  /// Index into eqs, then complex_eqs (offset by eqs.size()); -1 for the
  /// normalization y_0 = 1. For the real-POP hierarchy, the index into
  /// RealPop::eqs.
  int constraint = -1;
  Exponent beta;
  Exponent gamma;
  bool imaginary_part = false;
  double scale = 1.0;
};

/// Assembled relaxation: SDP data plus the metadata that maps it back to
/// moments and polynomials.
struct LMIProgram {
  Hierarchy hierarchy = Hierarchy::kReal;
  int order = 0;
  CPOPInstance instance;
  bool phase_symmetry = false;
  SdpProblem sdp;
  KeyTable keys{PhaseLattice::Full(1)};
  std::vector<VariableInfo> variables;
  std::vector<BlockInfo> blocks;
  std::vector<std::vector<EqualityOrigin>> equality_origins;
  /// Real-POP hierarchy only.
  RealPop real_pop;
  std::vector<Exponent> real_moments;

  int num_vars() const { return sdp.num_vars; }
  std::vector<int> block_sizes() const;
};

LMIProgram BuildRealRelaxation(const CPOPInstance& inst, int order,
                               const BuildOptions& options = {});
LMIProgram BuildComplexRelaxation(const CPOPInstance& inst, int order,
                                  const BuildOptions& options = {});
/// Converts through ToRealPop and builds the real moment hierarchy.
LMIProgram BuildRealPopRelaxation(const CPOPInstance& inst, int order,
                                  const BuildOptions& options = {});
/// Real moment hierarchy for a POP given directly in real variables.
/// Phase symmetry does not apply here.
LMIProgram BuildRealPopRelaxation(const RealPop& pop, int order,
                                  const BuildOptions& options = {});

LMIProgram BuildRelaxation(const CPOPInstance& inst, Hierarchy h, int order,
                           const BuildOptions& options = {});

/// Complex moment sequence of order `order` from an SDP vector.
MomentSequence MomentsFromSolution(const LMIProgram& prog,
                                   const Eigen::VectorXd& y);

/// Moment matrix M_t as a complex matrix, for t up to the relaxation order.
Eigen::MatrixXcd SolutionMomentMatrix(const LMIProgram& prog,
                                      const Eigen::VectorXd& y, int t);

struct HierarchySize {
  long long block_side = 0;
  long long num_vars = 0;
};

/// Moment-matrix side and number of scalar variables for the dense
/// relaxations of order r in n complex variables.
struct ComplexityStats {
  HierarchySize real;
  HierarchySize complex;
  HierarchySize real_pop;
};

ComplexityStats ComputeComplexityStats(int n, int r);

/// Number of distinct unordered keys among moment-matrix entries.
long long EnumeratedKeyCount(int n, int r);

}  // namespace rhsos
