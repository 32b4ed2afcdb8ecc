#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rhsos/poly.h"

namespace rhsos {

/// Feasible point found by sampling, with its value in minimization form
/// (the objective negated for maximization) and in reported form.
struct LocalResult {
  std::vector<Complex> point;
  double min_form_value = 0.0;
  double reported_value = 0.0;
  double violation = 0.0;
};

struct LocalSearchOptions {
  int samples = 10000;
  std::uint64_t seed = 1;
  /// Best samples that get refined.
  int refine_starts = 20;
  int refine_sweeps = 30;
};

/// Multistart sampling followed by local refinement on two supported
/// geometries:
///
///  * a single equality z^* A z = c with A Hermitian positive definite and
///    c > 0 (spheres and ellipsoids), no other constraints; refined by
///    projected gradient steps with rescaling;
///  * unit-modulus equalities |z_i|^2 = 1, refined by coordinate-wise phase
///    search. Variables outside the torus are allowed only as epigraph
///    variables u with objective |u|^2 (minimized) and every inequality of
///    the form |u|^2 - q(z) >= 0, where u is set to max(0, max q).
///
/// Returns std::nullopt for any other constraint set. The value is an upper
/// bound on the minimum (lower bound on the maximum).
std::optional<LocalResult> LocalUpperBound(const CPOPInstance& inst,
                                           const LocalSearchOptions& options = {});

}  // namespace rhsos
