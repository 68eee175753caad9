#pragma once

// Data-parallel inner loops. Each kernel exists in a serial reference form
// and an OpenMP form. Both forms accumulate every output entry in the same
// order, so their results are bit-identical for any thread count.

#include <cstddef>
#include <span>

#include <Eigen/Dense>

namespace fham::kernels {

namespace serial {

/// out_i = sum_j stencil[|i - j|] * u_j  (symmetric Toeplitz product).
void toeplitz_apply(std::span<const double> stencil, std::span<const double> u,
                    std::span<double> out);

/// out = m^T u, one contiguous column dot product per output entry.
void transposed_matvec(const Eigen::MatrixXd& m, std::span<const double> u,
                       std::span<double> out);

}  // namespace serial

namespace omp {

void toeplitz_apply(std::span<const double> stencil, std::span<const double> u,
                    std::span<double> out);

void transposed_matvec(const Eigen::MatrixXd& m, std::span<const double> u,
                       std::span<double> out);

}  // namespace omp

/// Threads used by the parallel kernels: FHAM_THREADS when set and positive,
/// otherwise the OpenMP default.
int thread_count();

/// Calls body(i) for i in [0, n) on the OpenMP team. body must only write
/// to slots owned by i.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static) num_threads(thread_count())
  for (std::ptrdiff_t i = 0; i < count; ++i) body(static_cast<std::size_t>(i));
}

}  // namespace fham::kernels
