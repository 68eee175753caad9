#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fham/hamiltonian.hpp"

namespace fham {

enum class Hypothesis { H1, H2, H3, H4, H5, H6, H7 };

std::string_view to_string(Hypothesis h);
Hypothesis parse_hypothesis(std::string_view name);
inline constexpr std::array<Hypothesis, 7> kAllHypotheses{
    Hypothesis::H1, Hypothesis::H2, Hypothesis::H3, Hypothesis::H4,
    Hypothesis::H5, Hypothesis::H6, Hypothesis::H7};

/// Outcome of sampling one hypothesis. A pass means that no witness was
/// found among the samples; it is never a proof.
struct HypothesisResult {
  Hypothesis which = Hypothesis::H1;
  bool passed = false;
  std::string detail;
  /// (u1, v1, u2, v2); single-point witnesses leave the second pair zero.
  std::optional<std::array<double, 4>> witness;
  /// Smallest radius from {1, 10, 100} for which (H2) held on all samples.
  std::optional<double> passing_radius;
  /// Empirical constant (sup or inf of the tested ratio).
  double statistic = 0.0;
};

struct HypothesisReport {
  std::uint64_t seed = 0;
  std::size_t count = 0;
  std::vector<HypothesisResult> results;
  std::string caveat = "falsification only: pass means no violating sample was found";

  const HypothesisResult* find(Hypothesis h) const;
};

/// Samples each requested hypothesis `count` times per probe shell using a
/// generator seeded with `seed`; the report is a pure function of the inputs.
HypothesisReport verify_hypotheses(const HamiltonianSpec& spec, std::span<const Hypothesis> which,
                                   std::uint64_t seed, std::size_t count);

}  // namespace fham
