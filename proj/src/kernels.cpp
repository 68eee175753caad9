#include "fham/kernels.hpp"

#include <cstdlib>
#include <string>

#include <omp.h>

namespace fham::kernels {

namespace {

inline double toeplitz_row(std::span<const double> stencil, std::span<const double> u,
                           std::size_t i) {
  const std::size_t n = u.size();
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t k = i > j ? i - j : j - i;
    acc += stencil[k] * u[j];
  }
  return acc;
}

inline double column_dot(const Eigen::MatrixXd& m, std::span<const double> u, std::size_t i) {
  const double* col = m.data() + static_cast<std::ptrdiff_t>(i) * m.rows();
  double acc = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) acc += col[j] * u[j];
  return acc;
}

}  // namespace

namespace serial {

void toeplitz_apply(std::span<const double> stencil, std::span<const double> u,
                    std::span<double> out) {
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = toeplitz_row(stencil, u, i);
}

void transposed_matvec(const Eigen::MatrixXd& m, std::span<const double> u,
                       std::span<double> out) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = column_dot(m, u, i);
}

}  // namespace serial

namespace omp {

void toeplitz_apply(std::span<const double> stencil, std::span<const double> u,
                    std::span<double> out) {
  parallel_for(u.size(), [&](std::size_t i) { out[i] = toeplitz_row(stencil, u, i); });
}

void transposed_matvec(const Eigen::MatrixXd& m, std::span<const double> u,
                       std::span<double> out) {
  parallel_for(out.size(), [&](std::size_t i) { out[i] = column_dot(m, u, i); });
}

}  // namespace omp

int thread_count() {
  static const int count = [] {
    if (const char* env = std::getenv("FHAM_THREADS")) {
      try {
        const int v = std::stoi(env);
        if (v > 0) return v;
      } catch (const std::exception&) {
      }
    }
    return omp_get_max_threads();
  }();
  return count;
}

}  // namespace fham::kernels
