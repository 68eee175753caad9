// Serial vs OpenMP timings of the operator kernels.
//
//   fham_bench [reps]
//
// Thread count follows FHAM_THREADS.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <vector>

#include "fham/kernels.hpp"
#include "fham/operator.hpp"

namespace {

template <class F>
double best_of(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  const int reps = argc > 1 ? std::max(1, std::atoi(argv[1])) : 20;
  namespace k = fham::kernels;
  std::printf("threads %d, best of %d\n", k::thread_count(), reps);
  std::printf("%-18s %6s %12s %12s %8s %s\n", "kernel", "n", "serial [s]", "omp [s]", "speedup", "equal");

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (std::size_t n : {256u, 512u, 1024u, 2048u, 4096u}) {
    const std::vector<double> stencil = fham::fractional_weights(0.3, n);
    std::vector<double> u(n);
    for (auto& x : u) x = dist(rng);
    std::vector<double> a(n), b(n);

    const double ts = best_of(reps, [&] { k::serial::toeplitz_apply(stencil, u, a); });
    const double tp = best_of(reps, [&] { k::omp::toeplitz_apply(stencil, u, b); });
    std::printf("%-18s %6zu %12.3e %12.3e %8.2f %s\n", "toeplitz_apply", n, ts, tp, ts / tp,
                a == b ? "yes" : "NO");

    const Eigen::MatrixXd m = Eigen::MatrixXd::Random(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    const double ms = best_of(reps, [&] { k::serial::transposed_matvec(m, u, a); });
    const double mp = best_of(reps, [&] { k::omp::transposed_matvec(m, u, b); });
    std::printf("%-18s %6zu %12.3e %12.3e %8.2f %s\n", "transposed_matvec", n, ms, mp, ms / mp,
                a == b ? "yes" : "NO");
  }
}
