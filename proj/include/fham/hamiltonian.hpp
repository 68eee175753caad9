#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "fham/grid.hpp"

namespace fham {

enum class HamiltonianKind { lane_emden, coupled_eps, custom };

HamiltonianKind parse_hamiltonian_kind(std::string_view name);
std::string_view to_string(HamiltonianKind kind);

struct HEval {
  double H = 0.0;
  double Hu = 0.0;
  double Hv = 0.0;
};

struct HHessian {
  double uu = 0.0;
  double uv = 0.0;
  double vv = 0.0;
};

using CustomH = std::function<HEval(double, double)>;
using CustomHessian = std::function<HHessian(double, double)>;

/// Nonlinearity H(u, v) of the Hamiltonian system together with the exponent
/// data (p, q) that its growth hypotheses refer to.
///
///   lane_emden:  |u|^{p+1}/(p+1) + |v|^{q+1}/(q+1)
///   coupled_eps: |u|^{p+1} + |v|^{q+1} + eps |u|^{a_c} |v|^{b_c},
///                with a_c/(p+1) + b_c/(q+1) = 1 and a_c, b_c > 1
///   custom:      user hooks; hypotheses can only be sampled, never certified
class HamiltonianSpec {
 public:
  static HamiltonianSpec lane_emden(double p, double q);
  static HamiltonianSpec coupled_eps(double p, double q, double eps, double a_c, double b_c);
  static HamiltonianSpec custom(double p, double q, CustomH h, CustomHessian hessian = {});

  HamiltonianKind kind() const noexcept { return kind_; }
  double p() const noexcept { return p_; }
  double q() const noexcept { return q_; }
  double eps() const noexcept { return eps_; }
  double a_c() const noexcept { return a_c_; }
  double b_c() const noexcept { return b_c_; }
  /// Weight used by (H7); defaults to (q+1)/(p+q+2).
  double theta() const noexcept { return theta_; }
  void set_theta(double theta);

  HEval eval(double u, double v) const;
  /// Second derivatives. Singular power terms are evaluated with |u|, |v|
  /// floored at a tiny positive value so the result stays finite.
  HHessian hessian(double u, double v) const;

 private:
  HamiltonianSpec(HamiltonianKind kind, double p, double q);

  HamiltonianKind kind_;
  double p_;
  double q_;
  double eps_ = 0.0;
  double a_c_ = 0.0;
  double b_c_ = 0.0;
  double theta_ = 0.0;
  CustomH custom_;
  CustomHessian custom_hessian_;
};

HEval eval_H(const HamiltonianSpec& spec, double u, double v);

/// Flags of the exponent conditions
///   1 > 1/(p+1) + 1/(q+1) > (N - 2s)/N       (subcritical, superlinear side)
///   (N - 4s) max(p, q) < N + 4s              (pq_constraint)
/// evaluated strictly; equality within 1e-12 counts as failure and is noted.
struct ExponentVerdict {
  bool subcritical = false;
  /// Only the hyperbola inequality 1/(p+1) + 1/(q+1) > (N - 2s)/N; this is
  /// the Lane-Emden condition, which admits the sublinear range pq < 1.
  bool below_hyperbola = false;
  bool pq_constraint = false;
  bool superlinear = false;  ///< pq > 1
  bool sublinear = false;    ///< pq < 1
  bool lower_vacuous = false;  ///< N <= 2s makes the right-hand inequality vacuous
  double hyperbola_sum = 0.0;
  std::vector<std::string> notes;
};

ExponentVerdict classify_exponents(double p, double q, double N, double s);

// Legendre-Fenchel engine -------------------------------------------------

struct ConjugateOptions {
  /// Solve lane_emden through the generic Newton path instead of the closed form.
  bool force_newton = false;
  /// Start Newton from (sign f, sign g) instead of the power-law guess.
  bool cold_start = false;
  std::size_t max_iter = 200;
  std::size_t max_halvings = 60;
};

/// H*(f, g) together with the maximizer (u, v) = grad H*(f, g), which solves
/// grad H(u, v) = (f, g).
struct ConjugatePoint {
  double hstar = 0.0;
  double u = 0.0;
  double v = 0.0;
  std::size_t iterations = 0;
};

/// Throws NonConvergence when damped Newton stagnates; this usually means H
/// violates (H5) or (H6).
ConjugatePoint conjugate_point(const HamiltonianSpec& spec, double f, double g,
                               const ConjugateOptions& opts = {});

struct ConjugateField {
  double total = 0.0;  ///< h sum H*(f_i, g_i)
  Field u;
  Field v;
};

/// Nodewise conjugate_point; on failure reports the lowest failing node.
ConjugateField conjugate_field(const HamiltonianSpec& spec, const Grid1D& grid, const Field& f,
                               const Field& g, const ConjugateOptions& opts = {});

/// Hessian of H* at (f, g) = grad H(u, v), computed as the inverse of the
/// Hessian of H at the primal point. Entries are capped at 1e12 in magnitude.
HHessian conjugate_hessian(const HamiltonianSpec& spec, double u, double v);

}  // namespace fham
