#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fham/error.hpp"
#include "fham/operator.hpp"

using namespace fham;
using doctest::Approx;

namespace {

Field random_field(std::size_t n, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  Field f(static_cast<Eigen::Index>(n));
  for (auto& x : f) x = dist(rng);
  return f;
}

/// Fractional centered-difference weight from the closed Gamma-quotient form.
double weight_by_gamma(double s, int k) {
  return std::pow(-1.0, k) * std::tgamma(2.0 * s + 1.0) /
         (std::tgamma(s - k + 1.0) * std::tgamma(s + k + 1.0));
}

double rel_l2(const Grid1D& g, const Field& a, const Field& b) {
  return weighted_norm(g, a - b, 2.0) / weighted_norm(g, b, 2.0);
}

}  // namespace

TEST_SUITE("operator") {

TEST_CASE("classical stencil at s = 1") {
  const auto g = fractional_weights(1.0, 6);
  CHECK(g[0] == Approx(2.0).epsilon(1e-15));
  CHECK(g[1] == Approx(-1.0).epsilon(1e-15));
  for (std::size_t k = 2; k < g.size(); ++k) CHECK(g[k] == 0.0);

  const Grid1D grid = build_grid(0.0, 1.0, 31);
  const DiscreteOperator op = assemble_operator(grid, 1.0);
  const Field u = grid.nodes.array() * (1.0 - grid.nodes.array());
  const Field Au = op.apply(u);
  for (double x : Au) CHECK(x == Approx(2.0).epsilon(1e-9));
}

TEST_CASE("central weight at s = 1/2") {
  CHECK(fractional_weights(0.5, 1)[0] == Approx(4.0 / std::numbers::pi).epsilon(1e-14));
}

TEST_CASE("ratio recurrence matches the Gamma quotient") {
  for (double s : {0.1, 0.3, 0.5, 0.75, 0.9}) {
    const auto g = fractional_weights(s, 12);
    for (int k = 0; k < 12; ++k) CHECK(g[k] == Approx(weight_by_gamma(s, k)).epsilon(1e-12));
  }
}

TEST_CASE("restricted operator is a symmetric M-matrix") {
  for (double s : {0.05, 0.25, 0.5, 0.75, 0.95}) {
    const DiscreteOperator op = assemble_operator(build_grid(-1.0, 1.0, 80), s);
    const Eigen::MatrixXd& A = op.matrix();
    CHECK((A - A.transpose()).cwiseAbs().maxCoeff() == 0.0);
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
      CHECK(A(i, i) > 0.0);
      for (Eigen::Index j = 0; j < A.cols(); ++j)
        if (i != j) CHECK(A(i, j) < 0.0);
    }
    CHECK(A.rowwise().sum().minCoeff() > 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("entries scale as h^-2s") {
  const double s = 0.4;
  const Grid1D grid = build_grid(0.0, 3.0, 20);
  const DiscreteOperator op = assemble_operator(grid, s);
  const auto g = fractional_weights(s, 20);
  CHECK(op.matrix()(3, 7) == Approx(std::pow(grid.h, -2.0 * s) * g[4]).epsilon(1e-14));
}

TEST_CASE("invalid orders") {
  const Grid1D grid = build_grid(0.0, 1.0, 8);
  CHECK_THROWS_AS(assemble_operator(grid, 0.0), DomainError);
  CHECK_THROWS_AS(assemble_operator(grid, 1.5), DomainError);
  CHECK_THROWS_AS(assemble_operator(grid, -0.2), DomainError);
  CHECK_THROWS_AS(parse_backend("fourier"), ConfigError);
  CHECK(parse_backend("spectral") == Backend::spectral);
}

TEST_CASE("apply and solve") {
  const Grid1D grid = build_grid(-1.0, 1.0, 50);
  const DiscreteOperator op = assemble_operator(grid, 0.3);
  CHECK(op.apply(Field::Zero(50)).isZero());
  CHECK(op.solve(Field::Zero(50)).isZero());
  CHECK_THROWS_AS(apply_operator(op, Field::Zero(49)), UsageError);
  CHECK_THROWS_AS(solve_dirichlet(op, Field::Zero(51)), UsageError);

  const Field f = random_field(50, 1);
  const Field u = solve_dirichlet(op, f);
  CHECK(((op.matrix() * u) - f).norm() <= 1e-12 * f.norm());
  CHECK(op.apply(u).isApprox(op.matrix() * u, 1e-14));
  CHECK((op.inverse() * f - u).norm() <= 1e-12 * u.norm());
}

TEST_CASE("comparison principle") {
  const Grid1D grid = build_grid(-1.0, 1.0, 64);
  for (double s : {0.25, 0.5, 0.75}) {
    const DiscreteOperator op = assemble_operator(grid, s);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const Field f1 = random_field(64, seed, 0.0, 1.0);
      const Field f2 = f1 + random_field(64, seed + 100, 0.0, 1.0);
      const Field u1 = op.solve(f1);
      const Field u2 = op.solve(f2);
      CHECK(u1.minCoeff() > 0.0);
      CHECK((u2 - u1).minCoeff() >= -1e-12 * u2.cwiseAbs().maxCoeff());
    }
  }
}

TEST_CASE("self-adjoint inverse") {
  const Grid1D grid = build_grid(0.0, 2.0, 90);
  const DiscreteOperator op = assemble_operator(grid, 0.6);
  const Field f = random_field(90, 7);
  const Field g = random_field(90, 8);
  const double a = inner(grid, g, op.solve(f));
  const double b = inner(grid, f, op.solve(g));
  CHECK(std::abs(a - b) <= 1e-10 * std::abs(a));
}

TEST_CASE("torsion approaches the closed form") {
  double prev_err = 1.0;
  double prev_mid = 0.0;
  for (std::size_t n : {63u, 127u, 255u, 511u}) {
    const Grid1D grid = build_grid(-1.0, 1.0, n);
    const DiscreteOperator op = assemble_operator(grid, 0.5);
    const Field u = op.solve(Field::Ones(static_cast<Eigen::Index>(n)));
    const Field xi = (1.0 - grid.nodes.array().square()).sqrt();
    CHECK(exact_torsion(grid, 0.5).isApprox(xi, 1e-13));
    const double err = rel_l2(grid, u, xi);
    CHECK(err < prev_err);
    const double mid = u[static_cast<Eigen::Index>(n / 2)];
    CHECK(std::abs(mid - 1.0) < std::abs(prev_mid - 1.0));
    prev_err = err;
    prev_mid = mid;
  }
}

TEST_CASE("discrete Hopf bound is uniform in n") {
  for (std::size_t n : {64u, 128u, 256u, 512u}) {
    const Grid1D grid = build_grid(-1.0, 1.0, n);
    const DiscreteOperator op = assemble_operator(grid, 0.5);
    const Field u = op.solve(Field::Ones(static_cast<Eigen::Index>(n)));
    CHECK(hopf_ratio(grid, u, 0.5) >= 0.5);
  }
}

TEST_CASE("spectrum of the classical stencil") {
  const std::size_t n = 40;
  const Grid1D grid = build_grid(0.0, 1.0, n);
  const SpectralData spec = eigendecompose(assemble_operator(grid, 1.0));
  for (std::size_t j = 1; j <= n; ++j) {
    const double exact = 2.0 / (grid.h * grid.h) * (1.0 - std::cos(j * std::numbers::pi * grid.h));
    CHECK(spec.lambdas[j - 1] == Approx(exact).epsilon(1e-10));
  }
}

TEST_CASE("eigenpairs") {
  for (Backend backend : {Backend::restricted, Backend::spectral}) {
    for (double s : {0.2, 0.5, 0.8}) {
      const Grid1D grid = build_grid(-1.0, 1.0, 60);
      const DiscreteOperator op = assemble_operator(grid, s, backend);
      const SpectralData spec = eigendecompose(op);
      const Eigen::MatrixXd gram = grid.h * spec.modes.transpose() * spec.modes;
      CHECK((gram - Eigen::MatrixXd::Identity(60, 60)).cwiseAbs().maxCoeff() <= 1e-10);
      for (Eigen::Index j = 0; j < 60; ++j) {
        const Field phi = spec.modes.col(j);
        CHECK((op.apply(phi) - spec.lambdas[j] * phi).norm() <= 1e-8 * spec.lambdas[j] * phi.norm());
        Eigen::Index first = 0;
        while (std::abs(phi[first]) < 1e-12) ++first;
        CHECK(phi[first] > 0.0);
        if (j > 0) CHECK(spec.lambdas[j] >= spec.lambdas[j - 1]);
      }
      CHECK(spec.lambdas[0] > 0.0);
      CHECK(spec.mode(0).minCoeff() > 0.0);
      CHECK(std::abs(inner(grid, spec.mode(0), spec.mode(1))) <= 1e-10);
      CHECK(weighted_norm(grid, spec.mode(0), 2.0) == Approx(1.0).epsilon(1e-10));
      CHECK(op.apply(spec.mode(0)).isApprox(spec.lambdas[0] * spec.mode(0), 1e-8));
    }
  }
}

TEST_CASE("spectral backend is the power of the second difference") {
  const double s = 0.35;
  const std::size_t n = 30;
  const Grid1D grid = build_grid(0.0, 1.0, n);
  const DiscreteOperator op = assemble_operator(grid, s, Backend::spectral);
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    T(i, i) = 2.0 / (grid.h * grid.h);
    if (i + 1 < n) T(i, i + 1) = T(i + 1, i) = -1.0 / (grid.h * grid.h);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
  const Eigen::MatrixXd power =
      es.eigenvectors() * es.eigenvalues().array().pow(s).matrix().asDiagonal() * es.eigenvectors().transpose();
  CHECK((op.matrix() - power).cwiseAbs().maxCoeff() <= 1e-10 * power.cwiseAbs().maxCoeff());
}

}
