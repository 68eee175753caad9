#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fham/operator.hpp"

namespace fham {

/// Reduced Lane-Emden functional
///   I(u) = q/(q+1) |K u|_{1+1/q}^{1+1/q} - 1/(p+1) |u|_{p+1}^{p+1}
/// with K the discrete operator. `grad` is the Riesz representative in the
/// quadrature pairing, K Phi_{1/q}(K u) - Phi_p(u), and R = <grad, u>.
struct IEval {
  double value = 0.0;
  Field grad;
  double R = 0.0;
};

IEval eval_I(const DiscreteOperator& op, double p, double q, const Field& u);

struct RayProjection {
  double t = 0.0;
  Field tu;
};

/// Scales u onto the Nehari manifold R(t u) = 0. Throws DomainError for pq = 1
/// or u = 0.
RayProjection nehari_project(const DiscreteOperator& op, double p, double q, const Field& u);

struct GroundStateOptions {
  double tol = 1e-8;
  std::size_t max_iter = 20000;
  /// Positivity replacement w = A|K u| every this many iterations.
  std::size_t positivity_every = 25;
  std::size_t memory = 8;
  /// Dimension used by the exponent classifier.
  double N_dim = 1.0;
};

struct GroundStateTelemetry {
  std::size_t iterations = 0;
  std::size_t positivity_replacements = 0;
  std::size_t functional_evals = 0;
  std::size_t memory_resets = 0;
};

struct GroundState {
  Field u;
  Field v;
  double c_I = 0.0;
  double energy_K = 0.0;
  double r_u = 0.0;
  double r_v = 0.0;
  double R_value = 0.0;
  double free_grad_norm = 0.0;
  /// 1 + max(|u|_2, |v|_2); tolerances of the form tol * scale use this.
  double scale = 1.0;
  bool symmetric = false;
  bool converged = false;
  GroundStateTelemetry telemetry;
};

/// Projected descent on the Nehari manifold. Starts from the torsion
/// function unless `init` is given. An exhausted iteration budget returns the
/// best state with converged = false.
GroundState minimize_ground_state(const DiscreteOperator& op, double p, double q,
                                  const std::optional<Field>& init = std::nullopt,
                                  const GroundStateOptions& opts = {});

/// Positive random initial field for seeded restarts.
Field random_positive_field(const Grid1D& grid, double s, std::uint64_t seed);

struct UniquenessReport {
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  bool degenerate = false;
  std::vector<GroundState> solutions;
  /// max over pairs of |u_i - u_j|_inf / max(|u_i|_inf, |u_j|_inf)
  double max_pairwise_distance = 0.0;
  /// min over pairs of min(beta_0, beta_1), beta_0 = min_k u_j/u_i
  double min_beta = 1.0;
  bool all_converged = true;
};

/// pq < 1 only. Trials run in parallel and are merged in seed order.
UniquenessReport uniqueness_probe(const DiscreteOperator& op, double p, double q,
                                  std::size_t trials, std::uint64_t seed,
                                  const GroundStateOptions& opts = {});

}  // namespace fham
