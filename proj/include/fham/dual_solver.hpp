#pragma once

#include <cstdint>
#include <string>

#include "fham/hamiltonian.hpp"
#include "fham/operator.hpp"

namespace fham {

/// Mountain-pass search settings. k_exp / l_exp shape the initial path
/// t -> (t^k f0, t^l g0) and must satisfy p/(p+1) > k/(k+l) and
/// q/(q+1) > l/(k+l); zero means "choose the default".
struct MpaConfig {
  std::size_t path_nodes = 41;
  std::size_t max_outer = 5000;
  double step0 = 1.0;
  double tol = 1e-8;
  double k_exp = 0.0;
  double l_exp = 0.0;
  std::uint64_t seed = 0;
  /// Finish with Newton on grad J = 0 once the path maximizer is close.
  bool newton_polish = true;
  /// Relative gradient level at which the polish is attempted. A polish is
  /// also tried whenever the maximizer gradient stalls for 200 iterations.
  double polish_switch = 1e-3;
  std::size_t max_newton = 50;
};

/// Fills default path exponents and validates the strict inequalities.
/// Throws ConfigError when no admissible pair exists.
MpaConfig resolve_path_exponents(MpaConfig cfg, double p, double q);

struct JEval {
  double value = 0.0;
  Field grad_f;
  Field grad_g;
};

/// J(f, g) = h sum H*(f, g) - h sum g (A f), A the inverse operator.
/// Gradient in the quadrature pairing: (H*_f - A g, H*_g - A f).
JEval eval_J(const DiscreteOperator& op, const HamiltonianSpec& spec, const Field& f, const Field& g);

/// h sum g (A f).
double cross_term(const DiscreteOperator& op, const Field& f, const Field& g);

struct MpaEndpoint {
  Field f0;
  Field g0;
  /// rho_1 such that J(rho^k f0, rho^l g0) < 0.
  double scale = 1.0;
  Field f_end;
  Field g_end;
  double level_end = 0.0;
};

/// f0 = g0 = phi_1, then rho doubles until the endpoint has negative J.
MpaEndpoint build_mpa_endpoint(const DiscreteOperator& op, const HamiltonianSpec& spec,
                               const MpaConfig& cfg);

struct PrimalRecovery {
  Field u;
  Field v;
  double r_u = 0.0;  ///< |K u - g|_2
  double r_v = 0.0;  ///< |K v - f|_2
};

/// (u, v) = grad H*(f, g) with the residuals of both system equations.
PrimalRecovery recover_primal(const DiscreteOperator& op, const HamiltonianSpec& spec,
                              const Field& f, const Field& g);

struct MpaTelemetry {
  std::size_t outer_iterations = 0;
  std::size_t newton_iterations = 0;
  std::size_t polish_attempts = 0;
  std::size_t j_evaluations = 0;
  std::size_t respacings = 0;
  double final_step = 0.0;
  double max_level_start = 0.0;
};

struct CriticalPair {
  Field f;
  Field g;
  double level = 0.0;
  double grad_norm = 0.0;
  Field primal_u;
  Field primal_v;
  double r_u = 0.0;
  double r_v = 0.0;
  /// 1 + max(|f|_2, |g|_2, |u|_2, |v|_2)
  double scale = 1.0;
  bool converged = false;
  std::string note;
  MpaTelemetry telemetry;
};

/// Path-deformation mountain pass on J: the highest interior node of a path
/// from 0 to the endpoint is moved downhill with Armijo backtracking and the
/// path is re-spaced by arc length. Requires pq > 1. An exhausted budget
/// returns the best maximizer with converged = false.
CriticalPair run_mountain_pass(const DiscreteOperator& op, const HamiltonianSpec& spec,
                               const MpaConfig& cfg = {});

}  // namespace fham
