#pragma once

#include <utility>

#include "fham/grid.hpp"
#include "fham/operator.hpp"

namespace fham {

class HamiltonianSpec;

/// Element (u, v) of the product space E^alpha x E^{2s - alpha}.
struct PairField {
  Field u;
  Field v;

  PairField operator+(const PairField& o) const { return {u + o.u, v + o.v}; }
  PairField operator-(const PairField& o) const { return {u - o.u, v - o.v}; }
  PairField operator*(double c) const { return {c * u, c * v}; }
};

/// Candidate interval for the interpolation index alpha, already intersected
/// with (0, 2s). The window is only meaningful when the exponent conditions
/// hold, so `admissible` requires both a nonempty interval and a passing
/// exponent classification.
struct AlphaWindow {
  double lo = 0.0;
  double hi = 0.0;
  bool nonempty = false;
  bool admissible = false;

  double midpoint() const noexcept { return 0.5 * (lo + hi); }
};

/// A^alpha u = sum_j lambda_j^(alpha / 2s) <u, phi_j> phi_j.
Field apply_power(const SpectralData& spec, double alpha, const Field& u);

/// Splits z into z+ in E+ (v = A^(2 alpha - 2s) u) and z- in E- with z = z+ + z-.
/// Throws DomainError unless alpha lies in (0, 2s).
std::pair<PairField, PairField> split_pair(const SpectralData& spec, double alpha,
                                           const PairField& z);

/// L(u, v) = (A^(2s - 2 alpha) v, A^(2 alpha - 2s) u).
PairField apply_L(const SpectralData& spec, double alpha, const PairField& z);

/// Inner product of E_alpha: <A^a u1, A^a u2> + <A^(2s-a) v1, A^(2s-a) v2>.
double pair_inner(const SpectralData& spec, double alpha, const PairField& z, const PairField& w);

/// Quadratic part h sum (A^alpha u)(A^(2s - alpha) v).
double quadratic_form(const SpectralData& spec, double alpha, const PairField& z);

struct EnergyEval {
  double value = 0.0;
  /// Riesz representative in the quadrature pairing:
  /// (A^{2s} v - H_u(u, v), A^{2s} u - H_v(u, v)).
  PairField gradient;
};

EnergyEval energy_E(const SpectralData& spec, double alpha, const PairField& z,
                    const HamiltonianSpec& H);

/// Quadrature norm of a pair, sqrt(|u|_2^2 + |v|_2^2).
double pair_norm(const Grid1D& grid, const PairField& z);

/// N(1/2 - 1/(max(p,q)+1)) < alpha < N(1/(min(p,q)+1) - (N - 4s)/(2N)),
/// intersected with (0, 2s).
AlphaWindow admissible_alpha_range(double p, double q, double N, double s);

}  // namespace fham
