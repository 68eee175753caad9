#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fham/config.hpp"
#include "fham/hamiltonian.hpp"

namespace fham {

enum class Status { converged, nonconverged, rejected_regime };

std::string_view to_string(Status status);

/// Outcome of one solution method inside a solve.
struct MethodResult {
  std::string method;  ///< "nehari" or "dual"
  bool converged = false;
  double level = 0.0;  ///< c_I for nehari, mountain-pass level for dual
  double grad_norm = 0.0;
  double r_u = 0.0;
  double r_v = 0.0;
  double scale = 1.0;
  std::size_t iterations = 0;
  double wall_time_s = 0.0;
  Field u;
  Field v;
  nlohmann::json telemetry;
  std::string note;
};

struct SolveReport {
  RunConfig config;
  Grid1D grid;
  ExponentVerdict verdict;
  std::vector<MethodResult> methods;
  /// Named cross-method certificates (criticality, distances, identities).
  nlohmann::json checks = nlohmann::json::object();
  std::vector<std::string> notes;
  Status status = Status::nonconverged;
  /// Pointwise residuals of the primary method, (K u - H_v, K v - H_u).
  Field res_u;
  Field res_v;

  /// Method whose fields go to solution.csv (nehari first), or nullptr.
  const MethodResult* primary() const;
};

struct DiagnosticEntry {
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  bool passed = false;
  /// Informational entries never fail the run.
  bool gating = true;
  std::string note;
};

struct DiagnoseReport {
  RunConfig config;
  std::vector<DiagnosticEntry> entries;
  bool passed() const;
  const DiagnosticEntry* find(std::string_view name) const;
};

struct SweepLattice {
  double p_min = 0.0;
  double p_max = 0.0;
  double q_min = 0.0;
  double q_max = 0.0;
  std::size_t steps = 0;
};

/// Parses "pmin,pmax,qmin,qmax,steps".
SweepLattice parse_lattice(std::string_view text);

struct SweepPoint {
  double p = 0.0;
  double q = 0.0;
  bool subcritical = false;
  bool pq_constraint = false;
  bool below_hyperbola = false;
  std::optional<double> c_I;
  std::string status;  ///< converged | nonconverged | skipped | error
  std::string reason;
};

struct SweepReport {
  RunConfig config;
  SweepLattice lattice;
  std::vector<SweepPoint> points;  ///< p-major lattice order
};

SolveReport run_solve(const RunConfig& cfg);
DiagnoseReport run_diagnose(const RunConfig& cfg);
/// With classify_only the c_I solves are skipped. Points are solved in
/// parallel (FHAM_THREADS) and merged in lattice order.
SweepReport run_sweep(const RunConfig& cfg, const SweepLattice& lattice, bool classify_only = false);

nlohmann::json to_json(const RunConfig& cfg);
nlohmann::json to_json(const ExponentVerdict& verdict);
nlohmann::json to_json(const SolveReport& report);
nlohmann::json to_json(const DiagnoseReport& report);
nlohmann::json to_json(const SweepReport& report);

/// solution.csv (converged/nonconverged solves only) and report.json.
std::vector<std::filesystem::path> write_outputs(const SolveReport& report, const RunConfig& cfg);
std::vector<std::filesystem::path> write_outputs(const DiagnoseReport& report, const RunConfig& cfg);
/// sweep.csv and report.json.
std::vector<std::filesystem::path> write_outputs(const SweepReport& report, const RunConfig& cfg);

/// Process exit code: 0 converged / all passed, 1 nonconverged or failed
/// diagnostics, 2 rejected regime.
int exit_code(const SolveReport& report);
int exit_code(const DiagnoseReport& report);
int exit_code(const SweepReport& report);

}  // namespace fham
