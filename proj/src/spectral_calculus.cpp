#include "fham/spectral_calculus.hpp"

#include <algorithm>
#include <cmath>

#include "fham/error.hpp"
#include "fham/hamiltonian.hpp"
#include "fham/kernels.hpp"

namespace fham {

namespace {

void check_alpha(const SpectralData& spec, double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0 * spec.s)) {
    throw DomainError("alpha must lie in (0, 2s)");
  }
}

}  // namespace

Field apply_power(const SpectralData& spec, double alpha, const Field& u) {
  if (!std::isfinite(alpha)) throw DomainError("alpha must be finite");
  check_size(spec.grid, u, "apply_power");
  const std::size_t n = spec.grid.n;

  // Euclidean coefficients c = Q^T u, scaled, then Q c.
  Field coeff(u.size());
  kernels::omp::transposed_matvec(spec.basis, {u.data(), n}, {coeff.data(), n});
  const double exponent = alpha / (2.0 * spec.s);
  for (Eigen::Index j = 0; j < coeff.size(); ++j) coeff[j] *= std::pow(spec.lambdas[j], exponent);
  Field out(u.size());
  kernels::omp::transposed_matvec(spec.basis_t, {coeff.data(), n}, {out.data(), n});
  return out;
}

std::pair<PairField, PairField> split_pair(const SpectralData& spec, double alpha,
                                           const PairField& z) {
  check_alpha(spec, alpha);
  const double s2 = 2.0 * spec.s;
  const Field av = apply_power(spec, s2 - 2.0 * alpha, z.v);
  const Field au = apply_power(spec, 2.0 * alpha - s2, z.u);
  PairField plus{0.5 * (z.u + av), 0.5 * (z.v + au)};
  PairField minus{0.5 * (z.u - av), 0.5 * (z.v - au)};
  return {std::move(plus), std::move(minus)};
}

PairField apply_L(const SpectralData& spec, double alpha, const PairField& z) {
  check_alpha(spec, alpha);
  const double s2 = 2.0 * spec.s;
  return {apply_power(spec, s2 - 2.0 * alpha, z.v), apply_power(spec, 2.0 * alpha - s2, z.u)};
}

double pair_inner(const SpectralData& spec, double alpha, const PairField& z, const PairField& w) {
  const double s2 = 2.0 * spec.s;
  const double uu = inner(spec.grid, apply_power(spec, alpha, z.u), apply_power(spec, alpha, w.u));
  const double vv = inner(spec.grid, apply_power(spec, s2 - alpha, z.v),
                          apply_power(spec, s2 - alpha, w.v));
  return uu + vv;
}

double quadratic_form(const SpectralData& spec, double alpha, const PairField& z) {
  return inner(spec.grid, apply_power(spec, alpha, z.u),
               apply_power(spec, 2.0 * spec.s - alpha, z.v));
}

EnergyEval energy_E(const SpectralData& spec, double alpha, const PairField& z,
                    const HamiltonianSpec& H) {
  check_alpha(spec, alpha);
  check_size(spec.grid, z.u, "energy_E");
  check_size(spec.grid, z.v, "energy_E");
  const double s2 = 2.0 * spec.s;

  EnergyEval out;
  double potential = 0.0;
  Field hu(z.u.size());
  Field hv(z.u.size());
  for (Eigen::Index i = 0; i < z.u.size(); ++i) {
    const HEval e = H.eval(z.u[i], z.v[i]);
    potential += e.H;
    hu[i] = e.Hu;
    hv[i] = e.Hv;
  }
  out.value = quadratic_form(spec, alpha, z) - spec.grid.h * potential;
  out.gradient.u = apply_power(spec, s2, z.v) - hu;
  out.gradient.v = apply_power(spec, s2, z.u) - hv;
  return out;
}

double pair_norm(const Grid1D& grid, const PairField& z) {
  return std::sqrt(grid.h * (z.u.squaredNorm() + z.v.squaredNorm()));
}

AlphaWindow admissible_alpha_range(double p, double q, double N, double s) {
  AlphaWindow w;
  const double lo = N * (0.5 - 1.0 / (std::max(p, q) + 1.0));
  const double hi = N * (1.0 / (std::min(p, q) + 1.0) - (N - 4.0 * s) / (2.0 * N));
  w.lo = std::max(lo, 0.0);
  w.hi = std::min(hi, 2.0 * s);
  w.nonempty = w.lo < w.hi;
  const ExponentVerdict verdict = classify_exponents(p, q, N, s);
  w.admissible = w.nonempty && verdict.subcritical && verdict.pq_constraint;
  return w;
}

}  // namespace fham
