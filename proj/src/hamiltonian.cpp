#include "fham/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "fham/error.hpp"
#include "fham/kernels.hpp"

namespace fham {

namespace {

constexpr double kTinyMagnitude = 1e-150;
constexpr double kHessianCap = 1e12;

// |x|^r with x floored away from zero; used where r < 0 would blow up.
double floored_pow(double x, double r) {
  return std::pow(std::max(std::abs(x), kTinyMagnitude), r);
}

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

double cap(double x) { return std::clamp(x, -kHessianCap, kHessianCap); }

}  // namespace

HamiltonianKind parse_hamiltonian_kind(std::string_view name) {
  if (name == "lane_emden") return HamiltonianKind::lane_emden;
  if (name == "coupled_eps") return HamiltonianKind::coupled_eps;
  if (name == "custom") return HamiltonianKind::custom;
  throw ConfigError("unknown hamiltonian kind '" + std::string(name) +
                    "' (expected lane_emden, coupled_eps or custom)");
}

std::string_view to_string(HamiltonianKind kind) {
  switch (kind) {
    case HamiltonianKind::lane_emden: return "lane_emden";
    case HamiltonianKind::coupled_eps: return "coupled_eps";
    case HamiltonianKind::custom: return "custom";
  }
  return "unknown";
}

HamiltonianSpec::HamiltonianSpec(HamiltonianKind kind, double p, double q)
    : kind_(kind), p_(p), q_(q) {
  if (!(p > 0.0) || !(q > 0.0) || !std::isfinite(p) || !std::isfinite(q)) {
    throw DomainError("exponents p and q must be positive and finite");
  }
  theta_ = (q + 1.0) / (p + q + 2.0);
}

HamiltonianSpec HamiltonianSpec::lane_emden(double p, double q) {
  HamiltonianSpec spec(HamiltonianKind::lane_emden, p, q);
  spec.a_c_ = 0.5 * (p + 1.0);
  spec.b_c_ = 0.5 * (q + 1.0);
  return spec;
}

HamiltonianSpec HamiltonianSpec::coupled_eps(double p, double q, double eps, double a_c,
                                             double b_c) {
  HamiltonianSpec spec(HamiltonianKind::coupled_eps, p, q);
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw DomainError("eps must be >= 0");
  if (!(a_c > 1.0) || !(b_c > 1.0)) throw DomainError("coupling exponents must exceed 1");
  const double identity = a_c / (p + 1.0) + b_c / (q + 1.0);
  if (std::abs(identity - 1.0) > 1e-12) {
    std::ostringstream msg;
    msg << "coupling exponents violate a_c/(p+1) + b_c/(q+1) = 1 (got " << identity << ")";
    throw DomainError(msg.str());
  }
  spec.eps_ = eps;
  spec.a_c_ = a_c;
  spec.b_c_ = b_c;
  return spec;
}

HamiltonianSpec HamiltonianSpec::custom(double p, double q, CustomH h, CustomHessian hessian) {
  if (!h) throw ConfigError("custom hamiltonian requires an H hook");
  HamiltonianSpec spec(HamiltonianKind::custom, p, q);
  spec.custom_ = std::move(h);
  spec.custom_hessian_ = std::move(hessian);
  return spec;
}

void HamiltonianSpec::set_theta(double theta) {
  if (!(theta > 0.0 && theta < 1.0)) throw DomainError("theta must lie in (0,1)");
  theta_ = theta;
}

HEval HamiltonianSpec::eval(double u, double v) const {
  const double au = std::abs(u);
  const double av = std::abs(v);
  switch (kind_) {
    case HamiltonianKind::lane_emden: {
      const double up = std::pow(au, p_);
      const double vq = std::pow(av, q_);
      return {up * au / (p_ + 1.0) + vq * av / (q_ + 1.0), sign(u) * up, sign(v) * vq};
    }
    case HamiltonianKind::coupled_eps: {
      const double up = std::pow(au, p_);
      const double vq = std::pow(av, q_);
      const double ua = std::pow(au, a_c_);
      const double vb = std::pow(av, b_c_);
      const double ua1 = std::pow(au, a_c_ - 1.0);
      const double vb1 = std::pow(av, b_c_ - 1.0);
      return {up * au + vq * av + eps_ * ua * vb,
              (p_ + 1.0) * sign(u) * up + eps_ * a_c_ * sign(u) * ua1 * vb,
              (q_ + 1.0) * sign(v) * vq + eps_ * b_c_ * ua * sign(v) * vb1};
    }
    case HamiltonianKind::custom: {
      HEval e;
      try {
        e = custom_(u, v);
      } catch (const std::exception& ex) {
        throw Error(std::string("custom hamiltonian hook failed: ") + ex.what());
      }
      if (!std::isfinite(e.H) || !std::isfinite(e.Hu) || !std::isfinite(e.Hv)) {
        throw Error("custom hamiltonian hook returned a non-finite value");
      }
      return e;
    }
  }
  return {};
}

HHessian HamiltonianSpec::hessian(double u, double v) const {
  switch (kind_) {
    case HamiltonianKind::lane_emden:
      return {cap(p_ * floored_pow(u, p_ - 1.0)), 0.0, cap(q_ * floored_pow(v, q_ - 1.0))};
    case HamiltonianKind::coupled_eps: {
      const double vb = std::pow(std::abs(v), b_c_);
      const double ua = std::pow(std::abs(u), a_c_);
      const double uu = (p_ + 1.0) * p_ * floored_pow(u, p_ - 1.0) +
                        eps_ * a_c_ * (a_c_ - 1.0) * floored_pow(u, a_c_ - 2.0) * vb;
      const double vv = (q_ + 1.0) * q_ * floored_pow(v, q_ - 1.0) +
                        eps_ * b_c_ * (b_c_ - 1.0) * ua * floored_pow(v, b_c_ - 2.0);
      const double uv = eps_ * a_c_ * b_c_ * sign(u) * std::pow(std::abs(u), a_c_ - 1.0) *
                        sign(v) * std::pow(std::abs(v), b_c_ - 1.0);
      return {cap(uu), cap(uv), cap(vv)};
    }
    case HamiltonianKind::custom: {
      if (custom_hessian_) return custom_hessian_(u, v);
      const double du = 1e-6 * (1.0 + std::abs(u));
      const double dv = 1e-6 * (1.0 + std::abs(v));
      const HEval up = eval(u + du, v), um = eval(u - du, v);
      const HEval vp = eval(u, v + dv), vm = eval(u, v - dv);
      const double uv = 0.5 * ((up.Hv - um.Hv) / (2.0 * du) + (vp.Hu - vm.Hu) / (2.0 * dv));
      return {(up.Hu - um.Hu) / (2.0 * du), uv, (vp.Hv - vm.Hv) / (2.0 * dv)};
    }
  }
  return {};
}

HEval eval_H(const HamiltonianSpec& spec, double u, double v) { return spec.eval(u, v); }

ExponentVerdict classify_exponents(double p, double q, double N, double s) {
  constexpr double tol = 1e-12;
  ExponentVerdict out;
  const double sum = 1.0 / (p + 1.0) + 1.0 / (q + 1.0);
  const double rhs = (N - 2.0 * s) / N;
  out.hyperbola_sum = sum;

  const bool upper = 1.0 - sum > tol;
  if (std::abs(1.0 - sum) <= tol) out.notes.emplace_back("critical boundary: 1/(p+1) + 1/(q+1) = 1");
  bool lower = sum - rhs > tol;
  if (N <= 2.0 * s) {
    out.lower_vacuous = true;
    lower = true;
    out.notes.emplace_back("N <= 2s: lower inequality is vacuous; the theory assumes N > 2s");
  } else if (std::abs(sum - rhs) <= tol) {
    out.notes.emplace_back("critical hyperbola boundary: 1/(p+1) + 1/(q+1) = (N-2s)/N");
  }
  out.subcritical = upper && lower;
  out.below_hyperbola = lower;

  const double lhs13 = (N - 4.0 * s) * std::max(p, q);
  const double rhs13 = N + 4.0 * s;
  out.pq_constraint = rhs13 - lhs13 > tol * std::max(1.0, std::abs(rhs13));
  if (std::abs(rhs13 - lhs13) <= tol * std::max(1.0, std::abs(rhs13))) {
    out.notes.emplace_back("critical boundary: (N-4s) max(p,q) = N+4s");
  }

  const double pq = p * q;
  out.superlinear = pq > 1.0;
  out.sublinear = pq < 1.0;
  if (pq == 1.0) out.notes.emplace_back("pq = 1: resonant case excluded by the theory");
  else if (out.sublinear) out.notes.emplace_back("sublinear regime pq < 1");
  return out;
}

ConjugatePoint conjugate_point(const HamiltonianSpec& spec, double f, double g,
                               const ConjugateOptions& opts) {
  if (!std::isfinite(f) || !std::isfinite(g)) throw DomainError("conjugate_point: non-finite input");
  const double p = spec.p();
  const double q = spec.q();

  if (spec.kind() == HamiltonianKind::lane_emden && !opts.force_newton) {
    ConjugatePoint out;
    out.u = signed_pow(f, 1.0 / p);
    out.v = signed_pow(g, 1.0 / q);
    out.hstar = p / (p + 1.0) * std::pow(std::abs(f), 1.0 + 1.0 / p) +
                q / (q + 1.0) * std::pow(std::abs(g), 1.0 + 1.0 / q);
    return out;
  }

  // Power-law warm start from the pure-power part of the gradient.
  double u;
  double v;
  if (opts.cold_start) {
    u = sign(f);
    v = sign(g);
  } else {
    const double cu = std::max(spec.eval(1.0, 0.0).Hu, 1e-300);
    const double cv = std::max(spec.eval(0.0, 1.0).Hv, 1e-300);
    u = signed_pow(f / cu, 1.0 / p);
    v = signed_pow(g / cv, 1.0 / q);
  }

  const double target = 1e-12 * (1.0 + std::hypot(f, g));
  double best = std::numeric_limits<double>::infinity();
  std::size_t it = 0;
  for (;; ++it) {
    const HEval e = spec.eval(u, v);
    const double ru = e.Hu - f;
    const double rv = e.Hv - g;
    const double merit = ru * ru + rv * rv;
    best = std::min(best, std::sqrt(merit));
    if (std::sqrt(merit) <= target) {
      return {f * u + g * v - e.H, u, v, it};
    }
    if (it >= opts.max_iter) break;

    const HHessian hs = spec.hessian(u, v);
    const double det = hs.uu * hs.vv - hs.uv * hs.uv;
    double du = -(hs.vv * ru - hs.uv * rv) / det;
    double dv = -(-hs.uv * ru + hs.uu * rv) / det;
    if (!(det > 0.0) || !std::isfinite(du) || !std::isfinite(dv)) {
      // Levenberg-Marquardt step on the merit.
      const double mu = 1e-8 * (hs.uu * hs.uu + hs.vv * hs.vv) + 1e-300;
      const double a11 = hs.uu * hs.uu + hs.uv * hs.uv + mu;
      const double a12 = hs.uu * hs.uv + hs.uv * hs.vv;
      const double a22 = hs.uv * hs.uv + hs.vv * hs.vv + mu;
      const double b1 = -(hs.uu * ru + hs.uv * rv);
      const double b2 = -(hs.uv * ru + hs.vv * rv);
      const double d = a11 * a22 - a12 * a12;
      du = (a22 * b1 - a12 * b2) / d;
      dv = (a11 * b2 - a12 * b1) / d;
    }

    double tau = 1.0;
    bool accepted = false;
    for (std::size_t k = 0; k <= opts.max_halvings; ++k, tau *= 0.5) {
      const double un = u + tau * du;
      const double vn = v + tau * dv;
      const HEval en = spec.eval(un, vn);
      const double mn = (en.Hu - f) * (en.Hu - f) + (en.Hv - g) * (en.Hv - g);
      if (std::isfinite(mn) && mn <= (1.0 - 2e-4 * tau) * merit) {
        u = un;
        v = vn;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  std::ostringstream msg;
  msg << "conjugate_point: Newton stagnated at (f, g) = (" << f << ", " << g
      << "), residual " << best << "; H likely violates (H5)/(H6)";
  throw NonConvergence(msg.str(), best, it);
}

ConjugateField conjugate_field(const HamiltonianSpec& spec, const Grid1D& grid, const Field& f,
                               const Field& g, const ConjugateOptions& opts) {
  check_size(grid, f, "conjugate_field");
  check_size(grid, g, "conjugate_field");
  const std::size_t n = grid.n;
  ConjugateField out;
  out.u.resize(f.size());
  out.v.resize(f.size());
  std::vector<double> hstar(n);
  std::vector<char> failed(n, 0);
  std::vector<double> residual(n, 0.0);

  kernels::parallel_for(n, [&](std::size_t i) {
    const auto k = static_cast<Eigen::Index>(i);
    try {
      const ConjugatePoint c = conjugate_point(spec, f[k], g[k], opts);
      hstar[i] = c.hstar;
      out.u[k] = c.u;
      out.v[k] = c.v;
    } catch (const NonConvergence& e) {
      failed[i] = 1;
      residual[i] = e.best_residual();
    } catch (const std::exception&) {
      failed[i] = 2;
    }
  });

  for (std::size_t i = 0; i < n; ++i) {
    if (failed[i]) {
      std::ostringstream msg;
      msg << "conjugate_field: conjugation failed at node " << i;
      throw NonConvergence(msg.str(), residual[i], i);
    }
  }
  double acc = 0.0;
  for (double x : hstar) acc += x;
  out.total = grid.h * acc;
  return out;
}

HHessian conjugate_hessian(const HamiltonianSpec& spec, double u, double v) {
  const HHessian h = spec.hessian(u, v);
  const double det = h.uu * h.vv - h.uv * h.uv;
  if (!(det > 0.0) || !std::isfinite(det)) {
    return {cap(1.0 / std::max(h.uu, 1.0 / kHessianCap)), 0.0,
            cap(1.0 / std::max(h.vv, 1.0 / kHessianCap))};
  }
  return {cap(h.vv / det), cap(-h.uv / det), cap(h.uu / det)};
}

}  // namespace fham
