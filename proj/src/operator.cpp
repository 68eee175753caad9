#include "fham/operator.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "fham/error.hpp"
#include "fham/kernels.hpp"

namespace fham {

Backend parse_backend(std::string_view name) {
  if (name == "restricted") return Backend::restricted;
  if (name == "spectral") return Backend::spectral;
  throw ConfigError("unknown operator backend '" + std::string(name) +
                    "' (expected restricted or spectral)");
}

std::string_view to_string(Backend backend) {
  return backend == Backend::restricted ? "restricted" : "spectral";
}

DiscreteOperator::DiscreteOperator(Grid1D grid, double s, Backend backend,
                                   Eigen::MatrixXd matrix, std::vector<double> stencil)
    : grid_(std::move(grid)),
      s_(s),
      backend_(backend),
      matrix_(std::move(matrix)),
      stencil_(std::move(stencil)),
      factor_(matrix_) {
  if (factor_.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "Cholesky factorization failed (n = " << grid_.n << ", s = " << s_
        << ", backend = " << to_string(backend_) << ")";
    throw InternalError(msg.str());
  }
}

Field DiscreteOperator::apply(const Field& u) const {
  check_size(grid_, u, "apply_operator");
  Field out(u.size());
  if (backend_ == Backend::restricted) {
    kernels::omp::toeplitz_apply(stencil_, {u.data(), grid_.n}, {out.data(), grid_.n});
  } else {
    kernels::omp::transposed_matvec(matrix_, {u.data(), grid_.n}, {out.data(), grid_.n});
  }
  return out;
}

Field DiscreteOperator::solve(const Field& f) const {
  check_size(grid_, f, "solve_dirichlet");
  return factor_.solve(f);
}

Eigen::MatrixXd DiscreteOperator::inverse() const {
  const auto n = static_cast<Eigen::Index>(grid_.n);
  return factor_.solve(Eigen::MatrixXd::Identity(n, n));
}

std::vector<double> fractional_weights(double s, std::size_t count) {
  std::vector<double> g(count);
  if (count == 0) return g;
  g[0] = std::tgamma(2.0 * s + 1.0) / std::pow(std::tgamma(s + 1.0), 2);
  for (std::size_t k = 0; k + 1 < count; ++k) {
    const auto kk = static_cast<double>(k);
    g[k + 1] = g[k] * (kk - s) / (kk + 1.0 + s);
  }
  return g;
}

namespace {

DiscreteOperator assemble_restricted(const Grid1D& grid, double s) {
  const std::size_t n = grid.n;
  auto stencil = fractional_weights(s, n);
  const double scale = std::pow(grid.h, -2.0 * s);
  for (double& w : stencil) w *= scale;

  Eigen::MatrixXd m(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = stencil[i > j ? i - j : j - i];
    }
  }
  return {grid, s, Backend::restricted, std::move(m), std::move(stencil)};
}

// Dirichlet second difference has sine eigenvectors
// sqrt(2/(n+1)) sin(i j pi/(n+1)) and eigenvalues (2/h^2)(1 - cos(j pi/(n+1))).
DiscreteOperator assemble_spectral(const Grid1D& grid, double s) {
  const auto n = static_cast<Eigen::Index>(grid.n);
  const double theta = std::numbers::pi / static_cast<double>(grid.n + 1);
  const double norm = std::sqrt(2.0 / static_cast<double>(grid.n + 1));
  Eigen::MatrixXd q(n, n);
  Eigen::VectorXd lam(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    lam[j] = std::pow(2.0 / (grid.h * grid.h) * (1.0 - std::cos(static_cast<double>(j + 1) * theta)), s);
    for (Eigen::Index i = 0; i < n; ++i) {
      q(i, j) = norm * std::sin(static_cast<double>((i + 1) * (j + 1)) * theta);
    }
  }
  Eigen::MatrixXd m = q * lam.asDiagonal() * q.transpose();
  m = 0.5 * (m + m.transpose()).eval();
  return {grid, s, Backend::spectral, std::move(m), {}};
}

}  // namespace

DiscreteOperator assemble_operator(const Grid1D& grid, double s, Backend backend) {
  if (!(s > 0.0 && s <= 1.0)) throw DomainError("s must lie in (0,1]");
  if (grid.n == 0) throw ConfigError("operator requires a nonempty grid");
  return backend == Backend::restricted ? assemble_restricted(grid, s)
                                        : assemble_spectral(grid, s);
}

Field apply_operator(const DiscreteOperator& op, const Field& u) { return op.apply(u); }

Field solve_dirichlet(const DiscreteOperator& op, const Field& f) { return op.solve(f); }

SpectralData eigendecompose(const DiscreteOperator& op) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(op.matrix());
  if (solver.info() != Eigen::Success) throw InternalError("symmetric eigensolver failed");

  SpectralData out;
  out.grid = op.grid();
  out.s = op.s();
  out.lambdas = solver.eigenvalues();
  out.basis = solver.eigenvectors();
  for (Eigen::Index j = 0; j < out.basis.cols(); ++j) {
    for (Eigen::Index i = 0; i < out.basis.rows(); ++i) {
      const double x = out.basis(i, j);
      if (x != 0.0) {
        if (x < 0.0) out.basis.col(j) *= -1.0;
        break;
      }
    }
  }
  out.basis_t = out.basis.transpose();
  out.modes = out.basis / std::sqrt(op.grid().h);
  return out;
}

Field exact_torsion(const Grid1D& grid, double s) {
  const double c = std::sqrt(std::numbers::pi) /
                   (std::pow(4.0, s) * std::tgamma(s + 0.5) * std::tgamma(s + 1.0));
  const double radius = 0.5 * grid.length();
  const double centre = grid.midpoint();
  Field xi(grid.nodes.size());
  for (Eigen::Index i = 0; i < xi.size(); ++i) {
    const double d = grid.nodes[i] - centre;
    xi[i] = c * std::pow(std::max(radius * radius - d * d, 0.0), s);
  }
  return xi;
}

}  // namespace fham
