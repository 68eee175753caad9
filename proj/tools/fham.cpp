// fham: solve, diagnose and sweep fractional Hamiltonian systems.

#include <iostream>

#include <CLI11.hpp>

#include "fham/commands.hpp"
#include "fham/error.hpp"

namespace {

void print_warnings(const fham::RunConfig& cfg) {
  for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << '\n';
}

void print_written(const std::vector<std::filesystem::path>& files) {
  for (const auto& f : files) std::cout << "wrote " << f.string() << '\n';
}

int do_solve(const std::string& path) {
  const fham::RunConfig cfg = fham::load_config(path);
  print_warnings(cfg);
  const fham::SolveReport report = fham::run_solve(cfg);
  for (const auto& m : report.methods) {
    std::cout << m.method << ": " << (m.converged ? "converged" : "not converged")
              << "  level " << m.level << "  grad " << m.grad_norm << "  iterations " << m.iterations
              << '\n';
  }
  for (const auto& n : report.notes) std::cout << "note: " << n << '\n';
  print_written(fham::write_outputs(report, cfg));
  std::cout << "status: " << fham::to_string(report.status) << '\n';
  return fham::exit_code(report);
}

int do_diagnose(const std::string& path) {
  const fham::RunConfig cfg = fham::load_config(path);
  print_warnings(cfg);
  const fham::DiagnoseReport report = fham::run_diagnose(cfg);
  for (const auto& e : report.entries) {
    const char* tag = e.passed ? "PASS" : (e.gating ? "FAIL" : "info");
    std::cout << tag << "  " << e.name << "  measured " << e.measured << "  threshold " << e.threshold;
    if (!e.note.empty()) std::cout << "  (" << e.note << ')';
    std::cout << '\n';
  }
  print_written(fham::write_outputs(report, cfg));
  return fham::exit_code(report);
}

int do_sweep(const std::string& path, const std::string& grid, bool classify_only) {
  const fham::RunConfig cfg = fham::load_config(path);
  print_warnings(cfg);
  const fham::SweepLattice lattice = fham::parse_lattice(grid);
  const fham::SweepReport report = fham::run_sweep(cfg, lattice, classify_only);
  std::size_t solved = 0;
  std::size_t subcritical = 0;
  for (const auto& pt : report.points) {
    solved += pt.c_I.has_value();
    subcritical += pt.subcritical;
  }
  std::cout << report.points.size() << " points, " << subcritical << " subcritical, " << solved
            << " solved\n";
  print_written(fham::write_outputs(report, cfg));
  return fham::exit_code(report);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fractional Hamiltonian system solver"};
  app.require_subcommand(1);

  std::string config;
  std::string grid;
  bool classify_only = false;

  auto* solve = app.add_subcommand("solve", "Compute a solution with the configured method(s)");
  solve->add_option("--config", config, "TOML configuration")->required();

  auto* diagnose = app.add_subcommand("diagnose", "Run the invariant checks and report measured tolerances");
  diagnose->add_option("--config", config, "TOML configuration")->required();

  auto* sweep = app.add_subcommand("sweep", "Classify and solve over a (p, q) lattice");
  sweep->add_option("--config", config, "TOML configuration")->required();
  sweep->add_option("--grid", grid, "pmin,pmax,qmin,qmax,steps")->required();
  sweep->add_flag("--classify-only", classify_only, "Skip the ground-state solves");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 3;
  }

  try {
    if (*solve) return do_solve(config);
    if (*diagnose) return do_diagnose(config);
    return do_sweep(config, grid, classify_only);
  } catch (const fham::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 3;
  } catch (const fham::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
}
