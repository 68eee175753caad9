#pragma once

#include <cstddef>

#include <Eigen/Dense>

namespace fham {

/// Nodal values at the interior grid points; the zero extension outside
/// (a, b) is implicit.
using Field = Eigen::VectorXd;

/// Uniform interior grid of the interval (a, b).
///
/// Nodes are x_i = a + i h for i = 1..n with h = (b - a) / (n + 1). Every
/// interior node carries the quadrature weight h, which is consistent with
/// zero boundary values.
struct Grid1D {
  double a = 0.0;
  double b = 1.0;
  std::size_t n = 0;
  double h = 0.0;
  Eigen::VectorXd nodes;
  /// Distance to the boundary, min(x_i - a, b - x_i).
  Eigen::VectorXd delta;

  double quad_weight() const noexcept { return h; }
  double length() const noexcept { return b - a; }
  double midpoint() const noexcept { return 0.5 * (a + b); }
};

/// Throws ConfigError on non-finite endpoints, b <= a, or n == 0.
Grid1D build_grid(double a, double b, std::size_t n);

/// Quadrature inner product h * sum(u_i w_i).
double inner(const Grid1D& grid, const Field& u, const Field& w);

/// Discrete L^r norm (h sum |u_i|^r)^(1/r); r = infinity gives max |u_i|.
/// Throws DomainError for r < 1 or NaN.
double weighted_norm(const Grid1D& grid, const Field& u, double r);

/// min_i u_i / delta_i^s. Negative values flag a Hopf violation.
double hopf_ratio(const Grid1D& grid, const Field& u, double s);

/// Nodewise signed power sign(w)|w|^r, continuous at 0 for r > 0.
Field signed_pow(const Field& w, double r);
double signed_pow(double w, double r);

/// Index reversal, used for evenness checks on symmetric grids.
Field reversed(const Field& u);

void check_size(const Grid1D& grid, const Field& u, const char* what);

}  // namespace fham
