#include "fham/dual_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include <Eigen/LU>

#include "fham/error.hpp"
#include <limits>

namespace fham {

namespace {

double pair_norm(const Grid1D& grid, const Field& f, const Field& g) {
  return std::sqrt(grid.h * (f.squaredNorm() + g.squaredNorm()));
}

struct Node {
  Field f;
  Field g;
  double J = 0.0;
};

// Re-spaces interior nodes uniformly in arc length; endpoints stay fixed.
void respace(const Grid1D& grid, std::vector<Node>& path) {
  const std::size_t m = path.size();
  std::vector<double> arc(m, 0.0);
  for (std::size_t i = 1; i < m; ++i) {
    arc[i] = arc[i - 1] + pair_norm(grid, path[i].f - path[i - 1].f, path[i].g - path[i - 1].g);
  }
  const double total = arc.back();
  if (!(total > 0.0)) return;
  std::vector<Node> out(m);
  out.front() = path.front();
  out.back() = path.back();
  std::size_t seg = 0;
  for (std::size_t j = 1; j + 1 < m; ++j) {
    const double target = total * static_cast<double>(j) / static_cast<double>(m - 1);
    while (seg + 2 < m && arc[seg + 1] < target) ++seg;
    const double len = arc[seg + 1] - arc[seg];
    const double w = len > 0.0 ? std::clamp((target - arc[seg]) / len, 0.0, 1.0) : 0.0;
    out[j].f = (1.0 - w) * path[seg].f + w * path[seg + 1].f;
    out[j].g = (1.0 - w) * path[seg].g + w * path[seg + 1].g;
  }
  path = std::move(out);
}

}  // namespace

MpaConfig resolve_path_exponents(MpaConfig cfg, double p, double q) {
  const double up = p / (p + 1.0);
  const double lo = 1.0 / (q + 1.0);
  if (cfg.k_exp == 0.0 && cfg.l_exp == 0.0) {
    if (!(lo < up)) {
      throw ConfigError("no path exponents satisfy p/(p+1) > k/(k+l) and q/(q+1) > l/(k+l); "
                        "requires 1/(p+1) + 1/(q+1) < 1");
    }
    if (lo < 0.5 && 0.5 < up) {
      cfg.k_exp = 2.0;
      cfg.l_exp = 2.0;
    } else {
      const double r = 0.5 * (up + lo);
      const double m = std::min(r, 1.0 - r);
      cfg.k_exp = 2.0 * r / m;
      cfg.l_exp = 2.0 * (1.0 - r) / m;
    }
  }
  const double k = cfg.k_exp, l = cfg.l_exp;
  if (!(k > 1.0) || !(l > 1.0)) throw ConfigError("path exponents k and l must exceed 1");
  if (!(up > k / (k + l)) || !(q / (q + 1.0) > l / (k + l))) {
    throw ConfigError("path exponents violate p/(p+1) > k/(k+l) or q/(q+1) > l/(k+l)");
  }
  if (cfg.path_nodes < 3) throw ConfigError("path_nodes must be at least 3");
  return cfg;
}

double cross_term(const DiscreteOperator& op, const Field& f, const Field& g) {
  return op.grid().h * g.dot(op.solve(f));
}

JEval eval_J(const DiscreteOperator& op, const HamiltonianSpec& spec, const Field& f, const Field& g) {
  const Grid1D& grid = op.grid();
  check_size(grid, f, "eval_J");
  check_size(grid, g, "eval_J");
  const ConjugateField c = conjugate_field(spec, grid, f, g);
  const Field af = op.solve(f);
  const Field ag = op.solve(g);
  JEval out;
  out.value = c.total - grid.h * g.dot(af);
  out.grad_f = c.u - ag;
  out.grad_g = c.v - af;
  return out;
}

MpaEndpoint build_mpa_endpoint(const DiscreteOperator& op, const HamiltonianSpec& spec,
                               const MpaConfig& cfg_in) {
  const MpaConfig cfg = resolve_path_exponents(cfg_in, spec.p(), spec.q());
  const SpectralData sd = eigendecompose(op);
  MpaEndpoint ep;
  ep.f0 = sd.mode(0);
  ep.g0 = ep.f0;
  double rho = 1.0;
  for (int k = 0; k <= 60; ++k, rho *= 2.0) {
    const Field f = std::pow(rho, cfg.k_exp) * ep.f0;
    const Field g = std::pow(rho, cfg.l_exp) * ep.g0;
    const double J = eval_J(op, spec, f, g).value;
    if (J < 0.0) {
      ep.scale = rho;
      ep.f_end = f;
      ep.g_end = g;
      ep.level_end = J;
      return ep;
    }
  }
  throw ConfigError("mountain-pass endpoint: J stayed nonnegative after 60 doublings; "
                    "the nonlinearity does not look superlinear");
}

PrimalRecovery recover_primal(const DiscreteOperator& op, const HamiltonianSpec& spec,
                              const Field& f, const Field& g) {
  const Grid1D& grid = op.grid();
  const ConjugateField c = conjugate_field(spec, grid, f, g);
  PrimalRecovery out;
  out.u = c.u;
  out.v = c.v;
  out.r_u = weighted_norm(grid, op.apply(out.u) - g, 2.0);
  out.r_v = weighted_norm(grid, op.apply(out.v) - f, 2.0);
  return out;
}

namespace {

// Newton on grad J = 0 started at (f, g). Returns true on convergence to tol.
bool newton_polish(const DiscreteOperator& op, const HamiltonianSpec& spec, const Eigen::MatrixXd& inv,
                   Field& f, Field& g, double tol, std::size_t max_iter, MpaTelemetry& tel) {
  const Grid1D& grid = op.grid();
  const auto n = static_cast<Eigen::Index>(grid.n);
  JEval cur = eval_J(op, spec, f, g);
  ++tel.j_evaluations;
  double gn = pair_norm(grid, cur.grad_f, cur.grad_g);
  for (std::size_t it = 0; it < max_iter; ++it) {
    if (gn <= tol) return true;
    ++tel.newton_iterations;
    const ConjugateField c = conjugate_field(spec, grid, f, g);
    Eigen::MatrixXd jac(2 * n, 2 * n);
    jac.topLeftCorner(n, n).setZero();
    jac.bottomRightCorner(n, n).setZero();
    jac.topRightCorner(n, n) = -inv;
    jac.bottomLeftCorner(n, n) = -inv;
    for (Eigen::Index i = 0; i < n; ++i) {
      const HHessian d = conjugate_hessian(spec, c.u[i], c.v[i]);
      jac(i, i) += d.uu;
      jac(i, n + i) += d.uv;
      jac(n + i, i) += d.uv;
      jac(n + i, n + i) += d.vv;
    }
    Eigen::VectorXd rhs(2 * n);
    rhs << cur.grad_f, cur.grad_g;
    const Eigen::VectorXd step = -jac.partialPivLu().solve(rhs);
    if (!step.allFinite()) return false;

    double tau = 1.0;
    bool accepted = false;
    for (int k = 0; k < 30; ++k, tau *= 0.5) {
      Field fn = f + tau * step.head(n);
      Field gn_field = g + tau * step.tail(n);
      JEval trial;
      try {
        trial = eval_J(op, spec, fn, gn_field);
      } catch (const NonConvergence&) {
        continue;
      }
      ++tel.j_evaluations;
      const double tn = pair_norm(grid, trial.grad_f, trial.grad_g);
      if (tn < (1.0 - 1e-4 * tau) * gn) {
        f = std::move(fn);
        g = std::move(gn_field);
        cur = std::move(trial);
        gn = tn;
        accepted = true;
        break;
      }
    }
    if (!accepted) return gn <= tol;
  }
  return gn <= tol;
}

}  // namespace

CriticalPair run_mountain_pass(const DiscreteOperator& op, const HamiltonianSpec& spec,
                               const MpaConfig& cfg_in) {
  if (!(spec.p() * spec.q() > 1.0)) {
    throw DomainError("mountain pass requires pq > 1; use the Nehari solver for pq < 1");
  }
  const MpaConfig cfg = resolve_path_exponents(cfg_in, spec.p(), spec.q());
  const Grid1D& grid = op.grid();
  const MpaEndpoint ep = build_mpa_endpoint(op, spec, cfg);

  MpaTelemetry tel;
  const std::size_t m = cfg.path_nodes;
  std::vector<Node> path(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double t = ep.scale * static_cast<double>(i) / static_cast<double>(m - 1);
    path[i].f = std::pow(t, cfg.k_exp) * ep.f0;
    path[i].g = std::pow(t, cfg.l_exp) * ep.g0;
  }
  auto evaluate_path = [&] {
    for (std::size_t i = 0; i < m; ++i) {
      path[i].J = eval_J(op, spec, path[i].f, path[i].g).value;
      ++tel.j_evaluations;
    }
  };
  evaluate_path();

  auto argmax = [&] {
    std::size_t best = 1;
    for (std::size_t i = 2; i + 1 < m; ++i) {
      if (path[i].J > path[best].J) best = i;
    }
    return best;
  };
  tel.max_level_start = path[argmax()].J;

  Eigen::MatrixXd inv;
  if (cfg.newton_polish) {
    inv = op.inverse();
  }

  CriticalPair out;
  double step = cfg.step0;
  double polish_level = cfg.polish_switch;
  Field best_f, best_g;
  double best_gn = std::numeric_limits<double>::infinity();
  bool converged = false;
  constexpr std::size_t stall_window = 200;
  double stall_ref = std::numeric_limits<double>::infinity();
  std::size_t stall_since = 0;

  for (; tel.outer_iterations < cfg.max_outer; ++tel.outer_iterations) {
    const std::size_t i = argmax();
    Node& node = path[i];
    const JEval e = eval_J(op, spec, node.f, node.g);
    ++tel.j_evaluations;
    const double gn = pair_norm(grid, e.grad_f, e.grad_g);
    if (gn < best_gn) {
      best_gn = gn;
      best_f = node.f;
      best_g = node.g;
    }
    if (gn <= cfg.tol) {
      converged = true;
      break;
    }

    if (gn < 0.9 * stall_ref) {
      stall_ref = gn;
      stall_since = tel.outer_iterations;
    }
    const bool stalled = tel.outer_iterations - stall_since >= stall_window;
    if (stalled) stall_since = tel.outer_iterations;

    const double size = 1.0 + pair_norm(grid, node.f, node.g);
    if (cfg.newton_polish && (gn <= polish_level * size || stalled)) {
      ++tel.polish_attempts;
      Field f = node.f, g = node.g;
      const bool ok = newton_polish(op, spec, inv, f, g, cfg.tol, cfg.max_newton, tel);
      if (ok) {
        const JEval fe = eval_J(op, spec, f, g);
        ++tel.j_evaluations;
        // Reject collapse onto the trivial critical point.
        if (fe.value > 0.0 && pair_norm(grid, f, g) > 1e-3 * size) {
          best_f = std::move(f);
          best_g = std::move(g);
          best_gn = pair_norm(grid, fe.grad_f, fe.grad_g);
          converged = true;
          break;
        }
      }
      if (!stalled) polish_level *= 0.1;
    }

    bool accepted = false;
    double tau = std::min(2.0 * step, cfg.step0);
    for (int k = 0; k < 60; ++k, tau *= 0.5) {
      Field fn = node.f - tau * e.grad_f;
      Field gn_field = node.g - tau * e.grad_g;
      double J;
      try {
        J = eval_J(op, spec, fn, gn_field).value;
      } catch (const NonConvergence&) {
        continue;
      }
      ++tel.j_evaluations;
      if (J <= node.J - 1e-4 * tau * gn * gn) {
        node.f = std::move(fn);
        node.g = std::move(gn_field);
        node.J = J;
        step = tau;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      out.note = "line search stagnated at the path maximizer";
      break;
    }
    respace(grid, path);
    ++tel.respacings;
    evaluate_path();
  }
  tel.final_step = step;

  out.converged = converged;
  out.f = best_f;
  out.g = best_g;
  const JEval fin = eval_J(op, spec, out.f, out.g);
  out.level = fin.value;
  out.grad_norm = pair_norm(grid, fin.grad_f, fin.grad_g);
  const PrimalRecovery rec = recover_primal(op, spec, out.f, out.g);
  out.primal_u = rec.u;
  out.primal_v = rec.v;
  out.r_u = rec.r_u;
  out.r_v = rec.r_v;
  out.scale = 1.0 + std::max({weighted_norm(grid, out.f, 2.0), weighted_norm(grid, out.g, 2.0),
                              weighted_norm(grid, out.primal_u, 2.0), weighted_norm(grid, out.primal_v, 2.0)});
  if (!converged && out.note.empty()) out.note = "outer iteration budget exhausted";
  out.telemetry = tel;
  return out;
}

}  // namespace fham
