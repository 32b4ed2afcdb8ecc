#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rhsos/poly.h"

namespace rhsos {

/// min [z]_1^* Q [z]_1 on the unit sphere, Q real symmetric with entries
/// uniform on [-1, 1] drawn from std::mt19937_64(seed), upper triangle
/// row by row.
CPOPInstance RandomQuadratic(int n, std::uint64_t seed);

/// Same construction with the degree-2 monomial vector [z]_2.
CPOPInstance RandomQuartic(int n, std::uint64_t seed);

/// Smale mean value instance in (z_1..z_n, u): maximize |u|^2 subject to
/// |H(z_i)|^2 >= |u|^2, z_1 ... z_n = (-1)^n / (n+1) and the sphere
/// sum |z_i|^2 = n (1/(n+1))^{2/n}. Reported value is sqrt.
CPOPInstance Smale(int n);

/// H(y) = (1/y) int_0^y (n+1) prod (t - z_j) dt as a polynomial in
/// (z_1..z_n, u) evaluated at y = z_i (u unused).
CPoly SmaleH(int n, int i);

/// Discriminant maximization with z_n eliminated through sum z_i = 0,
/// over n-1 variables on the sphere sum |z_i|^2 + |sum z_i|^2 = n.
/// Requires 3 <= n <= 5.
CPOPInstance Mordell(int n);

/// A(j) = sum_{i} z_i conj(z_{i+j}) in `num_vars` variables.
CPoly Autocorrelation(int n, int j, int num_vars);

/// Total sidelobe energy sum_{j=1}^{n-2} |A(j)|^2 over unimodular codes.
CPOPInstance PolyphaseEnergy(int n);

/// Peak sidelobe with an auxiliary u: min |u|^2 subject to
/// |u|^2 - |A(j)|^2 >= 0, |z_i|^2 = 1. Reported value is sqrt.
CPOPInstance PolyphasePeak(int n);

/// Three unimodular variables with optimum -3.75 at a conjugate pair.
CPOPInstance UnimodularTriple();

/// Four-variable real POP with optimum 1 - sqrt(2).
RealPop GapRealPop();

/// The same problem in z_1 = x_1 + i x_3, z_2 = x_2 + i x_4.
CPOPInstance GapComplex();

/// Names accepted by MakeFamily.
std::vector<std::string> FamilyNames();

/// Dispatches by family name; `seed` is used by the random families only.
/// Throws std::invalid_argument for unknown names or bad sizes.
CPOPInstance MakeFamily(const std::string& family, int n, std::uint64_t seed);

}  // namespace rhsos
