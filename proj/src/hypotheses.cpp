#include "fham/hypotheses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "fham/error.hpp"

namespace fham {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Allowed growth of an empirical sup ratio across probe shells before the
// constant is declared unbounded.
constexpr double kGrowthFactor = 10.0;

struct Sampler {
  std::mt19937_64 rng;
  std::uniform_real_distribution<double> unit{0.0, 1.0};

  explicit Sampler(std::uint64_t seed) : rng(seed) {}

  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(rng); }

  // Point with l1-radius |u| + |v| log-uniform in [r_lo, r_hi].
  std::array<double, 2> shell(double r_lo, double r_hi) {
    const double r = std::exp(uniform(std::log(r_lo), std::log(r_hi)));
    const double t = uniform(0.0, 2.0 * std::numbers::pi);
    const double c = std::cos(t), s = std::sin(t);
    const double l1 = std::abs(c) + std::abs(s);
    return {r * c / l1, r * s / l1};
  }

  std::array<double, 2> box(double radius) { return {uniform(-radius, radius), uniform(-radius, radius)}; }
};

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(6);
  s << x;
  return s.str();
}

// Sup of ratio(u, v) over decade shells [r_k, 10 r_k]; `ratio` returns NaN
// for samples that should be skipped.
template <class Ratio>
HypothesisResult growth_check(Hypothesis which, Sampler& rng, std::size_t count,
                              std::span<const double> shell_starts, Ratio&& ratio,
                              const std::string& label) {
  HypothesisResult res;
  res.which = which;
  std::vector<double> sups;
  std::array<double, 4> worst{};
  double overall = 0.0;
  for (double r : shell_starts) {
    double sup = 0.0;
    for (std::size_t k = 0; k < count; ++k) {
      const auto z = rng.shell(r, 10.0 * r);
      const double x = ratio(z[0], z[1]);
      if (std::isnan(x)) continue;
      if (!std::isfinite(x) || x > sup) {
        sup = std::isfinite(x) ? x : kInf;
        if (sup >= overall) {
          overall = sup;
          worst = {z[0], z[1], 0.0, 0.0};
        }
      }
    }
    sups.push_back(sup);
  }
  const double reference = std::max(sups.front(), 1e-300);
  const bool bounded = std::all_of(sups.begin(), sups.end(), [&](double s) {
    return std::isfinite(s) && s <= kGrowthFactor * reference;
  });
  res.passed = bounded;
  res.statistic = overall;
  std::ostringstream d;
  d << label << " sup per shell:";
  for (std::size_t i = 0; i < sups.size(); ++i) d << " [" << fmt(shell_starts[i]) << "]=" << fmt(sups[i]);
  res.detail = d.str();
  if (!bounded) res.witness = worst;
  return res;
}

HypothesisResult check_h1(const HamiltonianSpec& H, Sampler& rng, std::size_t count) {
  HypothesisResult res{Hypothesis::H1, true, {}, {}, {}, kInf};
  for (double R : {1.0, 10.0, 100.0}) {
    for (std::size_t k = 0; k < count; ++k) {
      const auto z = rng.box(R);
      const double h = H.eval(z[0], z[1]).H;
      res.statistic = std::min(res.statistic, h);
      if (h < 0.0 && res.passed) {
        res.passed = false;
        res.witness = std::array<double, 4>{z[0], z[1], 0.0, 0.0};
      }
    }
  }
  res.detail = "min sampled H = " + fmt(res.statistic);
  return res;
}

HypothesisResult check_h2(const HamiltonianSpec& H, Sampler& rng, std::size_t count) {
  HypothesisResult res{Hypothesis::H2, false, {}, {}, {}, 0.0};
  const double p = H.p(), q = H.q();
  std::ostringstream d;
  for (double R : {1.0, 10.0, 100.0}) {
    bool ok = true;
    std::array<double, 4> witness{};
    for (std::size_t k = 0; k < count; ++k) {
      const auto z = rng.shell(R, 10.0 * R);
      const HEval e = H.eval(z[0], z[1]);
      const double lhs = e.Hu * z[0] / (p + 1.0) + e.Hv * z[1] / (q + 1.0);
      const double slack = 1e-12 * std::max(std::abs(e.H), std::abs(lhs));
      if (!(e.H > 0.0) || lhs < e.H - slack) {
        ok = false;
        witness = {z[0], z[1], 0.0, 0.0};
        break;
      }
    }
    d << "R=" << R << (ok ? " pass; " : " fail; ");
    if (ok) {
      res.passed = true;
      res.passing_radius = R;
      break;
    }
    res.witness = witness;
  }
  if (res.passed) res.witness.reset();
  res.detail = d.str() + "smallest passing R is not claimed minimal";
  return res;
}

HypothesisResult check_h3(const HamiltonianSpec& H, Sampler& rng, std::size_t count) {
  const double p = H.p(), q = H.q();
  // Shells approach the origin; reference shell is the outermost.
  const std::array<double, 6> shells{0.1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  return growth_check(Hypothesis::H3, rng, count, shells,
                      [&](double u, double v) {
                        const double den = std::pow(std::abs(u), p + 1.0) + std::pow(std::abs(v), q + 1.0);
                        if (den == 0.0) return std::numeric_limits<double>::quiet_NaN();
                        return std::abs(H.eval(u, v).H) / den;
                      },
                      "|H|/(|u|^{p+1}+|v|^{q+1})");
}

HypothesisResult check_h4(const HamiltonianSpec& H, Sampler& rng, std::size_t count) {
  const double p = H.p(), q = H.q();
  const std::array<double, 4> shells{0.1, 1.0, 10.0, 100.0};
  return growth_check(Hypothesis::H4, rng, count, shells,
                      [&](double u, double v) {
                        const double au = std::abs(u), av = std::abs(v);
                        const HEval e = H.eval(u, v);
                        const double ru = std::abs(e.Hu) /
                                          (std::pow(au, p) + std::pow(av, p * (q + 1.0) / (p + 1.0)) + 1.0);
                        const double rv = std::abs(e.Hv) /
                                          (std::pow(av, q) + std::pow(au, q * (p + 1.0) / (q + 1.0)) + 1.0);
                        return std::max(ru, rv);
                      },
                      "gradient growth ratio");
}

HypothesisResult check_h5(const HamiltonianSpec& H, Sampler& rng, std::size_t count) {
  const double p = H.p(), q = H.q(), a = H.a_c(), b = H.b_c();
  const std::array<double, 6> shells{1e-4, 1e-2, 1.0, 10.0, 100.0, 1e3};
  // Lower constant C1: inf of H_u u / |u|^{p+1} and H_v v / |v|^{q+1}.
  double lower = kInf;
  std::array<double, 4> lower_witness{};
  for (double r : shells) {
    for (std::size_t k = 0; k < count; ++k) {
      const auto z = rng.shell(r, 10.0 * r);
      const HEval e = H.eval(z[0], z[1]);
      const double au = std::abs(z[0]), av = std::abs(z[1]);
      double x = kInf;
      if (au > 0.0) x = std::min(x, e.Hu * z[0] / std::pow(au, p + 1.0));
      if (av > 0.0) x = std::min(x, e.Hv * z[1] / std::pow(av, q + 1.0));
      if (x < lower) {
        lower = x;
        lower_witness = {z[0], z[1], 0.0, 0.0};
      }
    }
  }
  HypothesisResult upper = growth_check(
      Hypothesis::H5, rng, count, shells,
      [&](double u, double v) {
        const double au = std::abs(u), av = std::abs(v);
        const HEval e = H.eval(u, v);
        const double cross = std::pow(au, a) * std::pow(av, b);
        const double du = std::pow(au, p + 1.0) + cross;
        const double dv = std::pow(av, q + 1.0) + cross;
        double x = 0.0;
        if (du > 0.0) x = std::max(x, e.Hu * u / du);
        if (dv > 0.0) x = std::max(x, e.Hv * v / dv);
        return x;
      },
      "upper ratio");
  HypothesisResult res = upper;
  res.passed = upper.passed && lower > 1e-12;
  res.statistic = lower;
  res.detail = "inf lower ratio (C1) = " + fmt(lower) + "; " + upper.detail;
  if (!(lower > 1e-12)) res.witness = lower_witness;
  return res;
}

HypothesisResult check_h6(const HamiltonianSpec& H, Sampler& rng, std::size_t count) {
  HypothesisResult res{Hypothesis::H6, true, {}, {}, {}, kInf};
  for (double R : {1.0, 10.0, 100.0}) {
    for (std::size_t k = 0; k < 2 * count; ++k) {
      const auto z1 = rng.box(R);
      std::array<double, 2> z2;
      if (k % 2 == 0) {
        z2 = rng.box(R);
      } else {
        // Nearby partner probes local convexity.
        const double size = R * std::pow(10.0, -rng.uniform(1.0, 4.0));
        const auto d = rng.box(size);
        z2 = {z1[0] + d[0], z1[1] + d[1]};
      }
      const double du = z1[0] - z2[0], dv = z1[1] - z2[1];
      if (du == 0.0 && dv == 0.0) continue;
      const HEval e1 = H.eval(z1[0], z1[1]);
      const HEval e2 = H.eval(z2[0], z2[1]);
      const double prod = (e1.Hu - e2.Hu) * du + (e1.Hv - e2.Hv) * dv;
      const double normalized = prod / (du * du + dv * dv);
      if (normalized < res.statistic) res.statistic = normalized;
      if (!(prod > 0.0) && res.passed) {
        res.passed = false;
        res.witness = std::array<double, 4>{z1[0], z1[1], z2[0], z2[1]};
      }
    }
  }
  res.detail = "min monotonicity quotient = " + fmt(res.statistic);
  return res;
}

HypothesisResult check_h7(const HamiltonianSpec& H, Sampler& rng, std::size_t count) {
  HypothesisResult res{Hypothesis::H7, false, {}, {}, {}, kInf};
  const double p = H.p(), q = H.q(), th = H.theta();
  std::array<double, 4> worst{};
  for (double r : {10.0, 100.0, 1000.0}) {
    for (std::size_t k = 0; k < count; ++k) {
      const auto z = rng.shell(r, 10.0 * r);
      const HEval e = H.eval(z[0], z[1]);
      const double lhs = th * e.Hu * z[0] + (1.0 - th) * e.Hv * z[1] - e.H;
      const double den = std::pow(std::abs(z[0]), p + 1.0) + std::pow(std::abs(z[1]), q + 1.0);
      const double x = lhs / den;
      if (x < res.statistic) {
        res.statistic = x;
        worst = {z[0], z[1], 0.0, 0.0};
      }
    }
  }
  res.passed = res.statistic > 1e-12;
  if (!res.passed) res.witness = worst;
  res.detail = "theta = " + fmt(th) + ", inf far-field ratio (C3) = " + fmt(res.statistic);
  return res;
}

}  // namespace

std::string_view to_string(Hypothesis h) {
  static constexpr std::array<std::string_view, 7> names{"H1", "H2", "H3", "H4", "H5", "H6", "H7"};
  return names[static_cast<std::size_t>(h)];
}

Hypothesis parse_hypothesis(std::string_view name) {
  for (Hypothesis h : kAllHypotheses) {
    if (to_string(h) == name) return h;
  }
  throw ConfigError("unknown hypothesis '" + std::string(name) + "'");
}

const HypothesisResult* HypothesisReport::find(Hypothesis h) const {
  for (const auto& r : results) {
    if (r.which == h) return &r;
  }
  return nullptr;
}

HypothesisReport verify_hypotheses(const HamiltonianSpec& spec, std::span<const Hypothesis> which,
                                   std::uint64_t seed, std::size_t count) {
  if (count == 0) throw UsageError("verify_hypotheses: count must be >= 1");
  HypothesisReport report;
  report.seed = seed;
  report.count = count;
  for (Hypothesis h : which) {
    // Each hypothesis owns a derived stream so results do not depend on the
    // order or subset requested.
    Sampler rng(seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(h) + 1);
    switch (h) {
      case Hypothesis::H1: report.results.push_back(check_h1(spec, rng, count)); break;
      case Hypothesis::H2: report.results.push_back(check_h2(spec, rng, count)); break;
      case Hypothesis::H3: report.results.push_back(check_h3(spec, rng, count)); break;
      case Hypothesis::H4: report.results.push_back(check_h4(spec, rng, count)); break;
      case Hypothesis::H5: report.results.push_back(check_h5(spec, rng, count)); break;
      case Hypothesis::H6: report.results.push_back(check_h6(spec, rng, count)); break;
      case Hypothesis::H7: report.results.push_back(check_h7(spec, rng, count)); break;
    }
  }
  return report;
}

}  // namespace fham
