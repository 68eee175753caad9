#include "fham/lane_emden.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>
#include <sstream>

#include "fham/error.hpp"
#include "fham/hamiltonian.hpp"
#include "fham/kernels.hpp"

namespace fham {

namespace {

double abs_pow_sum(const Field& w, double r) {
  double acc = 0.0;
  for (double x : w) acc += std::pow(std::abs(x), r);
  return acc;
}

void check_pq(double p, double q) {
  if (!(p > 0.0) || !(q > 0.0)) throw DomainError("exponents p and q must be positive");
  if (p * q == 1.0) throw DomainError("pq = 1 is excluded (pq != 1 required)");
}

struct Pair {
  Field s;
  Field y;
  double sy;
};

// Two-loop recursion in the quadrature inner product.
Field lbfgs_direction(const Grid1D& grid, const std::deque<Pair>& mem, const Field& g) {
  Field d = -g;
  std::vector<double> alpha(mem.size());
  for (std::size_t k = mem.size(); k-- > 0;) {
    alpha[k] = inner(grid, mem[k].s, d) / mem[k].sy;
    d -= alpha[k] * mem[k].y;
  }
  if (!mem.empty()) {
    const Pair& last = mem.back();
    d *= last.sy / inner(grid, last.y, last.y);
  }
  for (std::size_t k = 0; k < mem.size(); ++k) {
    const double beta = inner(grid, mem[k].y, d) / mem[k].sy;
    d += (alpha[k] - beta) * mem[k].s;
  }
  return d;
}

}  // namespace

IEval eval_I(const DiscreteOperator& op, double p, double q, const Field& u) {
  const Grid1D& grid = op.grid();
  check_size(grid, u, "eval_I");
  const Field ku = op.apply(u);
  const double a = grid.h * abs_pow_sum(ku, 1.0 + 1.0 / q);
  const double b = grid.h * abs_pow_sum(u, p + 1.0);
  IEval out;
  out.value = q / (q + 1.0) * a - b / (p + 1.0);
  out.grad = op.apply(signed_pow(ku, 1.0 / q)) - signed_pow(u, p);
  out.R = a - b;
  return out;
}

RayProjection nehari_project(const DiscreteOperator& op, double p, double q, const Field& u) {
  check_pq(p, q);
  check_size(op.grid(), u, "nehari_project");
  const Field ku = op.apply(u);
  const double a = abs_pow_sum(ku, 1.0 + 1.0 / q);
  const double b = abs_pow_sum(u, p + 1.0);
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("nehari_project requires u != 0");
  const double t = std::pow(a / b, q / (p * q - 1.0));
  return {t, t * u};
}

Field random_positive_field(const Grid1D& grid, double s, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Field u(static_cast<Eigen::Index>(grid.n));
  // Low-frequency random profile times delta^s keeps the field positive
  // and boundary-compatible.
  const double c1 = unit(rng), c2 = unit(rng), c3 = unit(rng);
  const double shift = 2.0 * unit(rng) - 1.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double x = (grid.nodes[i] - grid.a) / grid.length();
    const double smooth = 1.0 + 0.8 * c1 * std::sin(3.0 * x + shift) + 0.5 * c2 * x * x +
                          0.5 * c3 * (1.0 - x);
    u[i] = std::pow(grid.delta[i], s) * (0.25 + smooth + 0.5 * unit(rng));
  }
  return u;
}

GroundState minimize_ground_state(const DiscreteOperator& op, double p, double q,
                                  const std::optional<Field>& init,
                                  const GroundStateOptions& opts) {
  check_pq(p, q);
  const ExponentVerdict verdict = classify_exponents(p, q, opts.N_dim, op.s());
  if (!verdict.below_hyperbola) {
    throw DomainError("exponents lie on or above the critical hyperbola; no positive solution expected");
  }
  const Grid1D& grid = op.grid();
  Field start = init ? *init : op.solve(Field::Ones(static_cast<Eigen::Index>(grid.n)));
  check_size(grid, start, "minimize_ground_state");

  GroundStateTelemetry tel;
  Field u = nehari_project(op, p, q, start).tu;
  IEval cur = eval_I(op, p, q, u);
  ++tel.functional_evals;
  std::deque<Pair> mem;
  bool converged = false;
  std::size_t since_replacement = 0;

  auto reset_memory = [&] {
    if (!mem.empty()) ++tel.memory_resets;
    mem.clear();
  };

  auto try_replacement = [&]() -> bool {
    const Field ku = op.apply(u);
    if (ku.minCoeff() >= 0.0) return false;  // A|Ku| = u
    Field w = op.solve(ku.cwiseAbs());
    w = nehari_project(op, p, q, w).tu;
    IEval ew = eval_I(op, p, q, w);
    ++tel.functional_evals;
    ++tel.positivity_replacements;
    if (ew.value <= cur.value + 1e-14 * std::abs(cur.value)) {
      u = std::move(w);
      cur = std::move(ew);
      reset_memory();
      return true;
    }
    return false;
  };

  for (; tel.iterations < opts.max_iter; ++tel.iterations) {
    const double scale = 1.0 + weighted_norm(grid, u, 2.0);
    const double gnorm = weighted_norm(grid, cur.grad, 2.0);
    if (gnorm <= opts.tol * scale) {
      if (u.minCoeff() > 0.0) {
        converged = true;
        break;
      }
      if (try_replacement()) continue;
    }
    if (++since_replacement >= opts.positivity_every) {
      since_replacement = 0;
      if (try_replacement()) continue;
    }

    Field d = lbfgs_direction(grid, mem, cur.grad);
    double slope = inner(grid, cur.grad, d);
    if (!(slope < 0.0)) {
      reset_memory();
      d = -cur.grad;
      slope = -gnorm * gnorm;
    }
    double tau = 1.0;
    if (mem.empty()) tau = std::min(1.0, 0.1 * weighted_norm(grid, u, 2.0) / gnorm);

    // Near the minimizer the Armijo decrease drops below the roundoff of I;
    // there a step is accepted when I stays within roundoff and the gradient
    // norm decreases.
    const double roundoff = 1e-13 * (1.0 + std::abs(cur.value));
    bool accepted = false;
    for (int k = 0; k < 60; ++k, tau *= 0.5) {
      const Field trial = u + tau * d;
      RayProjection proj;
      try {
        proj = nehari_project(op, p, q, trial);
      } catch (const DomainError&) {
        continue;
      }
      IEval et = eval_I(op, p, q, proj.tu);
      ++tel.functional_evals;
      const bool armijo = et.value <= cur.value + 1e-4 * tau * slope;
      const bool value_resolved = -slope * tau > 1e3 * roundoff;
      const bool gradient_merit = !value_resolved && et.value <= cur.value + roundoff &&
                                  weighted_norm(grid, et.grad, 2.0) < (1.0 - 1e-4 * tau) * gnorm;
      if (std::isfinite(et.value) && (armijo || gradient_merit)) {
        Pair pr{proj.tu - u, et.grad - cur.grad, 0.0};
        pr.sy = inner(grid, pr.s, pr.y);
        if (pr.sy > 1e-12 * std::sqrt(inner(grid, pr.s, pr.s) * inner(grid, pr.y, pr.y))) {
          mem.push_back(std::move(pr));
          if (mem.size() > opts.memory) mem.pop_front();
        }
        u = std::move(proj.tu);
        cur = std::move(et);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (!mem.empty()) {
        reset_memory();
        continue;
      }
      break;  // stagnation at roundoff level
    }
  }

  GroundState gs;
  gs.converged = converged;
  gs.u = u;
  const Field ku = op.apply(u);
  gs.v = signed_pow(ku, 1.0 / q);
  gs.c_I = cur.value;
  gs.R_value = cur.R;
  gs.free_grad_norm = weighted_norm(grid, cur.grad, 2.0);
  gs.scale = 1.0 + std::max(weighted_norm(grid, gs.u, 2.0), weighted_norm(grid, gs.v, 2.0));

  const HamiltonianSpec H = HamiltonianSpec::lane_emden(p, q);
  const Field kv = op.apply(gs.v);
  double potential = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) potential += H.eval(gs.u[i], gs.v[i]).H;
  gs.energy_K = grid.h * gs.u.dot(kv) - grid.h * potential;
  gs.r_u = weighted_norm(grid, ku - signed_pow(gs.v, q), 2.0);
  gs.r_v = weighted_norm(grid, kv - signed_pow(gs.u, p), 2.0);
  const double unorm = weighted_norm(grid, gs.u, 2.0);
  gs.symmetric = weighted_norm(grid, gs.u - reversed(gs.u), 2.0) <= 1e-6 * unorm;
  gs.telemetry = tel;
  return gs;
}

UniquenessReport uniqueness_probe(const DiscreteOperator& op, double p, double q,
                                  std::size_t trials, std::uint64_t seed,
                                  const GroundStateOptions& opts) {
  if (!(p * q < 1.0)) throw DomainError("uniqueness_probe requires pq < 1");
  if (trials == 0) throw UsageError("uniqueness_probe requires at least one trial");
  UniquenessReport rep;
  rep.trials = trials;
  rep.seed = seed;
  rep.solutions.resize(trials);
  std::vector<std::string> errors(trials);

  kernels::parallel_for(trials, [&](std::size_t k) {
    try {
      const Field init = random_positive_field(op.grid(), op.s(), seed + k);
      rep.solutions[k] = minimize_ground_state(op, p, q, init, opts);
    } catch (const std::exception& e) {
      errors[k] = e.what();
    }
  });
  for (std::size_t k = 0; k < trials; ++k) {
    if (!errors[k].empty()) throw Error("uniqueness_probe trial " + std::to_string(k) + ": " + errors[k]);
    rep.all_converged = rep.all_converged && rep.solutions[k].converged;
  }

  rep.degenerate = trials == 1;
  for (std::size_t i = 0; i < trials; ++i) {
    for (std::size_t j = i + 1; j < trials; ++j) {
      const Field& a = rep.solutions[i].u;
      const Field& b = rep.solutions[j].u;
      const double denom = std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff());
      rep.max_pairwise_distance = std::max(rep.max_pairwise_distance, (a - b).cwiseAbs().maxCoeff() / denom);
      const double beta0 = (b.array() / a.array()).minCoeff();
      const double beta1 = (a.array() / b.array()).minCoeff();
      rep.min_beta = std::min({rep.min_beta, beta0, beta1});
    }
  }
  return rep;
}

}  // namespace fham
