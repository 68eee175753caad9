#pragma once

#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "fham/grid.hpp"

namespace fham {

/// restricted: fractional centered differences with zero exterior data (the
/// integral fractional Laplacian). spectral: s-th power of the Dirichlet
/// second-difference matrix, a different operator kept for cross-checks.
enum class Backend { restricted, spectral };

Backend parse_backend(std::string_view name);
std::string_view to_string(Backend backend);

/// Symmetric positive definite matrix realization of (-Delta)^s on a grid.
/// Owns the Cholesky factor used for the inverse (Dirichlet solve).
class DiscreteOperator {
 public:
  DiscreteOperator(Grid1D grid, double s, Backend backend, Eigen::MatrixXd matrix,
                   std::vector<double> stencil);

  const Grid1D& grid() const noexcept { return grid_; }
  double s() const noexcept { return s_; }
  Backend backend() const noexcept { return backend_; }
  const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }
  /// First matrix column for the Toeplitz (restricted) backend, empty otherwise.
  const std::vector<double>& stencil() const noexcept { return stencil_; }
  std::size_t size() const noexcept { return grid_.n; }

  /// matrix * u
  Field apply(const Field& u) const;
  /// Solves matrix * u = f.
  Field solve(const Field& f) const;
  /// Dense inverse matrix, i.e. the solution operator applied to the identity.
  Eigen::MatrixXd inverse() const;

 private:
  Grid1D grid_;
  double s_;
  Backend backend_;
  Eigen::MatrixXd matrix_;
  std::vector<double> stencil_;
  Eigen::LLT<Eigen::MatrixXd> factor_;
};

/// Fractional centered-difference weights g_0..g_{count-1}:
/// g_0 = Gamma(2s+1)/Gamma(s+1)^2, g_{k+1} = g_k (k - s)/(k + 1 + s).
std::vector<double> fractional_weights(double s, std::size_t count);

/// Throws DomainError unless s lies in (0, 1].
DiscreteOperator assemble_operator(const Grid1D& grid, double s,
                                   Backend backend = Backend::restricted);

Field apply_operator(const DiscreteOperator& op, const Field& u);
Field solve_dirichlet(const DiscreteOperator& op, const Field& f);

/// Eigenpairs of a discrete operator. Modes are orthonormal under the
/// quadrature inner product h * sum(u_i w_i); each mode's first nonzero
/// component is positive.
struct SpectralData {
  Grid1D grid;
  double s = 0.0;
  Eigen::VectorXd lambdas;  ///< ascending, > 0
  Eigen::MatrixXd modes;    ///< column j is phi_j
  /// Euclidean-orthonormal eigenvectors and their transpose; both are kept
  /// so the power kernels read contiguous columns.
  Eigen::MatrixXd basis;
  Eigen::MatrixXd basis_t;

  Field mode(std::size_t j) const { return modes.col(static_cast<Eigen::Index>(j)); }
};

SpectralData eigendecompose(const DiscreteOperator& op);

/// Closed-form solution of (-Delta)^s xi = 1 on an interval with zero
/// exterior data, evaluated at the grid nodes:
/// xi(x) = Gamma(1/2) / (4^s Gamma(s + 1/2) Gamma(s + 1)) * (R^2 - (x - c)^2)^s.
Field exact_torsion(const Grid1D& grid, double s);

}  // namespace fham
