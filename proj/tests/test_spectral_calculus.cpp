#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "fham/error.hpp"
#include "fham/hamiltonian.hpp"
#include "fham/spectral_calculus.hpp"

using namespace fham;
using doctest::Approx;

namespace {

struct Fixture {
  double s = 0.3;
  Grid1D grid = build_grid(-1.0, 1.0, 48);
  DiscreteOperator op = assemble_operator(grid, s);
  SpectralData spec = eigendecompose(op);
  std::mt19937_64 rng{11};

  Field random() {
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    Field f(static_cast<Eigen::Index>(grid.n));
    for (auto& x : f) x = d(rng);
    return f;
  }
  PairField random_pair() { return {random(), random()}; }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
};

double rel(const Field& a, const Field& b) { return (a - b).norm() / b.norm(); }

}  // namespace

TEST_SUITE("spectral_calculus") {

TEST_CASE_FIXTURE(Fixture, "powers") {
  const Field u = random();
  CHECK(rel(apply_power(spec, 0.0, u), u) <= 1e-10);
  CHECK(rel(apply_power(spec, 2.0 * s, u), op.apply(u)) <= 1e-8);
  CHECK(rel(apply_power(spec, -2.0 * s, u), op.solve(u)) <= 1e-8);
  const double a = 0.37;
  CHECK(rel(apply_power(spec, a, spec.mode(0)), std::pow(spec.lambdas[0], a / (2.0 * s)) * spec.mode(0)) <= 1e-10);
  CHECK_THROWS_AS(apply_power(spec, std::numeric_limits<double>::quiet_NaN(), u), DomainError);
  CHECK_THROWS_AS(apply_power(spec, std::numeric_limits<double>::infinity(), u), DomainError);
}

TEST_CASE_FIXTURE(Fixture, "semigroup") {
  for (int k = 0; k < 20; ++k) {
    const double a = uniform(-2.0 * s, 2.0 * s);
    const double b = uniform(-2.0 * s, 2.0 * s);
    const Field u = random();
    const Field lhs = apply_power(spec, a, apply_power(spec, b, u));
    CHECK((lhs - apply_power(spec, a + b, u)).norm() <= 1e-10 * u.norm() * std::max(1.0, lhs.norm() / u.norm()));
  }
}

TEST_CASE_FIXTURE(Fixture, "splitting") {
  const double alpha = 0.25;
  const double l1 = spec.lambdas[0];
  const PairField e1{std::pow(l1, -alpha / (2.0 * s)) * spec.mode(0),
                     std::pow(l1, (-2.0 * s + alpha) / (2.0 * s)) * spec.mode(0)};
  auto [p1, m1] = split_pair(spec, alpha, e1);
  CHECK(rel(p1.u, e1.u) <= 1e-10);
  CHECK(rel(p1.v, e1.v) <= 1e-10);
  CHECK(m1.u.norm() + m1.v.norm() <= 1e-10 * e1.u.norm());

  const Field u = random();
  const PairField minus{u, -apply_power(spec, -2.0 * s + 2.0 * alpha, u)};
  auto [p2, m2] = split_pair(spec, alpha, minus);
  CHECK(p2.u.norm() + p2.v.norm() <= 1e-10 * u.norm());

  for (int k = 0; k < 10; ++k) {
    const PairField z = random_pair();
    auto [zp, zm] = split_pair(spec, alpha, z);
    const PairField back = zp + zm;
    CHECK(rel(back.u, z.u) <= 1e-10);
    CHECK(rel(back.v, z.v) <= 1e-10);
    CHECK(rel(zp.v, apply_power(spec, -2.0 * s + 2.0 * alpha, zp.u)) <= 1e-10);
  }
  CHECK_THROWS_AS(split_pair(spec, 0.0, e1), DomainError);
  CHECK_THROWS_AS(split_pair(spec, 2.0 * s, e1), DomainError);
  CHECK_THROWS_AS(apply_L(spec, -0.1, e1), DomainError);
}

TEST_CASE_FIXTURE(Fixture, "L is the identity on E+ and minus the identity on E-") {
  const double alpha = 0.41;
  for (int k = 0; k < 5; ++k) {
    auto [zp, zm] = split_pair(spec, alpha, random_pair());
    const PairField lp = apply_L(spec, alpha, zp);
    const PairField lm = apply_L(spec, alpha, zm);
    CHECK(rel(lp.u, zp.u) <= 1e-10);
    CHECK(rel(lp.v, zp.v) <= 1e-10);
    CHECK(rel(lm.u, -zm.u) <= 1e-10);
    CHECK(rel(lm.v, -zm.v) <= 1e-10);

    const PairField z = random_pair();
    const PairField w = random_pair();
    const double a = pair_inner(spec, alpha, apply_L(spec, alpha, z), w);
    const double b = pair_inner(spec, alpha, z, apply_L(spec, alpha, w));
    CHECK(std::abs(a - b) <= 1e-10 * (std::abs(a) + 1.0));
  }
}

TEST_CASE_FIXTURE(Fixture, "quadratic form is definite on the two halves") {
  const double alpha = 0.2;
  for (int k = 0; k < 100; ++k) {
    const PairField z = random_pair();
    auto [zp, zm] = split_pair(spec, alpha, z);
    const double qp = quadratic_form(spec, alpha, zp);
    const double qm = quadratic_form(spec, alpha, zm);
    CHECK(qp > 0.0);
    CHECK(qm < 0.0);
    CHECK(qp == Approx(inner(grid, apply_power(spec, alpha, zp.u), apply_power(spec, alpha, zp.u))).epsilon(1e-10));
    CHECK(qp + qm == Approx(quadratic_form(spec, alpha, z)).epsilon(1e-9));
  }
}

TEST_CASE_FIXTURE(Fixture, "energy") {
  const HamiltonianSpec H = HamiltonianSpec::lane_emden(2.0, 3.0);
  const Field zero = Field::Zero(static_cast<Eigen::Index>(grid.n));
  CHECK(energy_E(spec, 0.3, {zero, zero}, H).value == 0.0);

  const HamiltonianSpec none = HamiltonianSpec::custom(2.0, 2.0, [](double, double) { return HEval{}; });
  for (double alpha : {0.1, 0.3, 0.55})
    CHECK(energy_E(spec, alpha, {spec.mode(0), spec.mode(0)}, none).value ==
          Approx(spec.lambdas[0]).epsilon(1e-10));

  for (double alpha : {0.15, 0.3, 0.5}) {
    const PairField z{op.solve(random().cwiseAbs()), op.solve(random().cwiseAbs())};
    const PairField d = random_pair();
    const EnergyEval e = energy_E(spec, alpha, z, H);
    const double analytic = inner(grid, e.gradient.u, d.u) + inner(grid, e.gradient.v, d.v);
    const double eps = 1e-5;
    const double fd = (energy_E(spec, alpha, z + d * eps, H).value - energy_E(spec, alpha, z - d * eps, H).value) /
                      (2.0 * eps);
    CHECK(std::abs(fd - analytic) <= 1e-5 * std::abs(analytic));
  }
}

TEST_CASE("alpha window examples") {
  const AlphaWindow w = admissible_alpha_range(2.0, 2.0, 1.0, 0.25);
  CHECK(w.lo == Approx(1.0 / 6.0));
  CHECK(w.hi == Approx(1.0 / 3.0));
  CHECK(w.admissible);
  CHECK(w.midpoint() == Approx(0.25));

  const AlphaWindow flat = admissible_alpha_range(1.0, 1.0, 1.0, 0.25);
  CHECK_FALSE(flat.admissible);
}

TEST_CASE("alpha window agrees with the exponent conditions on the diagonal") {
  for (auto [N, s] : {std::pair{1.0, 0.25}, std::pair{1.0, 0.45}, std::pair{2.0, 0.5}, std::pair{3.0, 0.75}}) {
    for (int i = 1; i <= 200; ++i) {
      const double p = 0.05 * i;
      const ExponentVerdict v = classify_exponents(p, p, N, s);
      const AlphaWindow w = admissible_alpha_range(p, p, N, s);
      CHECK(w.admissible == (v.subcritical && v.pq_constraint));
      const bool boundary = std::any_of(v.notes.begin(), v.notes.end(), [](const std::string& n) {
        return n.find("boundary") != std::string::npos;
      });
      if (!boundary && p > 1.0) CHECK(w.nonempty == (v.subcritical && v.pq_constraint));
      if (w.admissible) {
        CHECK(w.lo >= 0.0);
        CHECK(w.hi <= 2.0 * s);
        CHECK(w.lo < w.hi);
      }
    }
  }
}

}
