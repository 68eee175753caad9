#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fham/hamiltonian.hpp"
#include "fham/operator.hpp"

namespace fham {

enum class Method { nehari, dual, both };

Method parse_method(std::string_view name);
std::string_view to_string(Method method);

/// Validated run configuration. Loaded from TOML:
///
///   method = "nehari"            # nehari | dual | both
///   [domain]      a, b, n
///   [operator]    s, backend
///   [exponents]   p, q, N_dim
///   [hamiltonian] kind, eps, a_c, b_c, theta
///   [solver]      tol, max_iter, seed, path_nodes
///   [output]      dir, formats
struct RunConfig {
  struct Domain {
    double a = -1.0;
    double b = 1.0;
    std::size_t n = 0;
  } domain;
  struct Operator {
    double s = 0.0;
    Backend backend = Backend::restricted;
  } op;
  struct Exponents {
    double p = 0.0;
    double q = 0.0;
    double N_dim = 1.0;
  } exponents;
  struct Hamiltonian {
    HamiltonianKind kind = HamiltonianKind::lane_emden;
    double eps = 0.0;
    double a_c = 0.0;
    double b_c = 0.0;
    double theta = 0.0;
  } hamiltonian;
  Method method = Method::nehari;
  struct Solver {
    double tol = 1e-8;
    std::size_t max_iter = 20000;
    std::uint64_t seed = 0;
    std::size_t path_nodes = 41;
  } solver;
  struct Output {
    std::string dir = "out";
    std::vector<std::string> formats{"csv", "json"};
  } output;

  /// Non-fatal remarks collected during validation.
  std::vector<std::string> warnings;

  bool wants(std::string_view format) const;
};

/// Parses and validates a TOML document. Errors are ConfigError with the
/// line/column of parse failures, the dotted path of constraint violations,
/// or the name of an unknown key.
RunConfig parse_config(std::string_view text, std::string_view source = "<config>");
RunConfig load_config(const std::filesystem::path& path);

/// Nonlinearity described by the [hamiltonian] and [exponents] tables.
HamiltonianSpec make_hamiltonian(const RunConfig& cfg);

}  // namespace fham
