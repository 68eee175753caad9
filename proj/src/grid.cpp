#include "fham/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fham/error.hpp"

namespace fham {

Grid1D build_grid(double a, double b, std::size_t n) {
  if (!std::isfinite(a) || !std::isfinite(b)) throw ConfigError("grid endpoints must be finite");
  if (!(b > a)) throw ConfigError("grid requires b > a");
  if (n == 0) throw ConfigError("grid requires at least one interior node");

  Grid1D g;
  g.a = a;
  g.b = b;
  g.n = n;
  g.h = (b - a) / static_cast<double>(n + 1);
  g.nodes.resize(static_cast<Eigen::Index>(n));
  g.delta.resize(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    // Distance measured in node counts keeps delta exactly palindromic.
    const auto left = static_cast<double>(i + 1);
    const auto right = static_cast<double>(n - i);
    const auto k = static_cast<Eigen::Index>(i);
    g.nodes[k] = a + left * g.h;
    g.delta[k] = std::min(left, right) * g.h;
  }
  return g;
}

void check_size(const Grid1D& grid, const Field& u, const char* what) {
  if (static_cast<std::size_t>(u.size()) != grid.n) {
    throw UsageError(std::string(what) + ": field has " + std::to_string(u.size()) +
                     " entries, grid has " + std::to_string(grid.n));
  }
}

double inner(const Grid1D& grid, const Field& u, const Field& w) {
  check_size(grid, u, "inner");
  check_size(grid, w, "inner");
  return grid.h * u.dot(w);
}

double weighted_norm(const Grid1D& grid, const Field& u, double r) {
  check_size(grid, u, "weighted_norm");
  if (std::isnan(r) || r < 1.0) throw DomainError("norm exponent r must satisfy r >= 1");
  if (std::isinf(r)) return u.size() == 0 ? 0.0 : u.cwiseAbs().maxCoeff();
  if (r == 2.0) return std::sqrt(grid.h * u.squaredNorm());
  if (r == 1.0) return grid.h * u.cwiseAbs().sum();
  double acc = 0.0;
  for (double x : u) acc += std::pow(std::abs(x), r);
  return std::pow(grid.h * acc, 1.0 / r);
}

double hopf_ratio(const Grid1D& grid, const Field& u, double s) {
  check_size(grid, u, "hopf_ratio");
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    best = std::min(best, u[i] / std::pow(grid.delta[i], s));
  }
  return best;
}

double signed_pow(double w, double r) {
  if (w == 0.0) return 0.0;
  return std::copysign(std::pow(std::abs(w), r), w);
}

Field signed_pow(const Field& w, double r) {
  Field out(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) out[i] = signed_pow(w[i], r);
  return out;
}

Field reversed(const Field& u) { return u.reverse(); }

}  // namespace fham
