#pragma once

#include <vector>

#include <Eigen/Dense>

#include "rhsos/poly.h"
#include "rhsos/relaxation.h"
#include "rhsos/sdp_solver.h"

namespace rhsos {

/// Hermitian Gram matrix of one sum-of-squares multiplier:
/// sigma = sum_{p,q} gram(p, q) z^{basis[q]} conj(z)^{basis[p]}.
/// For the real-POP hierarchy the matrix is real and
/// sigma = sum_{p,q} gram(p, q) x^{basis[p] + basis[q]}.
struct GramBlock {
  /// -1 for the moment block, otherwise the inequality index.
  int constraint = -1;
  std::vector<Exponent> basis;
  Eigen::MatrixXcd gram;
};

/// Dual certificate f - gamma = sum_k sigma_k g_k + sum_j (tau_j h_j + conj(tau_j h_j)),
/// with g_{-1} = 1. The real-POP variant uses tau_j h_j in x.
struct Certificate {
  Hierarchy hierarchy = Hierarchy::kComplex;
  double gamma = 0.0;
  std::vector<GramBlock> blocks;
  /// One per equality, real ones first then complex ones.
  std::vector<CPoly> equality_multipliers;
  /// Real-POP hierarchy only.
  std::vector<RPoly> real_equality_multipliers;
  /// Largest remainder coefficient.
  double residual = 0.0;
  /// max |coefficient| of the minimization objective.
  double scale = 1.0;
  double min_gram_eigenvalue = 0.0;
  /// residual <= 1e-6 max(1, scale) and Gram eigenvalues >= -1e-8 max(1, scale).
  bool valid = false;
};

/// Sum-of-squares multiplier of one Gram block as a polynomial in (z, conj z).
CPoly GramPolynomial(const GramBlock& block);

/// Builds the certificate from the dual Gram matrices and equality
/// multipliers of a solved relaxation, then measures the remainder.
Certificate RecoverCertificate(const LMIProgram& prog, const SdpSolution& sol);

/// Real parts of all Gram entries and multiplier coefficients. Valid for
/// real-coefficient data, where it maps a complex-hierarchy certificate to
/// one for the real hierarchy. The residual is recomputed against `prog`.
Certificate SymmetrizeCertificate(const LMIProgram& prog, const Certificate& cert);

/// f - gamma - sum sigma_k g_k - sum (tau_j h_j + conj(tau_j h_j)). For the
/// real hierarchy the result is averaged with its conjugate-swap, since that
/// hierarchy identifies y_{b,g} with y_{g,b}. Not defined for real-POP.
CPoly CertificateRemainder(const LMIProgram& prog, const Certificate& cert);

/// Recomputes scale, residual, minimum Gram eigenvalue and validity from
/// the Gram blocks and multipliers already stored in `cert`.
void EvaluateCertificate(const LMIProgram& prog, Certificate& cert);

/// Largest remainder coefficient for any hierarchy.
double CertificateResidual(const LMIProgram& prog, const Certificate& cert);

}  // namespace rhsos
