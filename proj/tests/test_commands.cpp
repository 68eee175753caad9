#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fham/commands.hpp"
#include "fham/error.hpp"

using namespace fham;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("fham_test_" + name);
  fs::remove_all(dir);
  return dir;
}

RunConfig make_config(double s, std::size_t n, double p, double q, const fs::path& dir,
                      std::string_view method = "nehari") {
  std::ostringstream text;
  text << "method = \"" << method << "\"\n[domain]\nn = " << n << "\n[operator]\ns = " << s
       << "\n[exponents]\np = " << p << "\nq = " << q << "\n[output]\ndir = \"" << dir.string() << "\"\n";
  return parse_config(text.str());
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

std::string strip_wall_time(const fs::path& path) {
  std::string out;
  for (const auto& line : read_lines(path))
    if (line.find("wall_time_s") == std::string::npos) out += line + '\n';
  return out;
}

}  // namespace

TEST_SUITE("commands") {

TEST_CASE("Nehari solve writes a solution and a report") {
  const fs::path dir = scratch("solve");
  const RunConfig cfg = make_config(0.3, 257, 2.0, 2.0, dir);
  const SolveReport r = run_solve(cfg);
  CHECK(r.status == Status::converged);
  CHECK(exit_code(r) == 0);
  REQUIRE(r.methods.size() == 1);
  const MethodResult& m = r.methods[0];
  CHECK(m.u.minCoeff() > 0.0);
  CHECK(m.telemetry["symmetric"].get<bool>());
  CHECK(r.checks.contains("energy_criticality"));
  CHECK(r.checks.contains("hopf_ratios"));

  const auto files = write_outputs(r, cfg);
  CHECK(files.size() == 2);
  const auto lines = read_lines(dir / "solution.csv");
  REQUIRE(lines.size() == 258);
  CHECK(lines[0] == "x,u,v,delta,res_u,res_v");
  CHECK(std::count(lines[1].begin(), lines[1].end(), ',') == 5);

  const nlohmann::json j = nlohmann::json::parse(std::ifstream(dir / "report.json"));
  CHECK(j["status"] == "converged");
  CHECK(j["config"]["domain"]["n"] == 257);
  CHECK(j["verdict"]["subcritical"] == true);
  CHECK(!j.contains("non_finite_entries"));

  const std::string first = strip_wall_time(dir / "report.json");
  write_outputs(run_solve(cfg), cfg);
  CHECK(strip_wall_time(dir / "report.json") == first);
  fs::remove_all(dir);
}

TEST_CASE("config echo reproduces the run") {
  const fs::path dir = scratch("echo");
  const RunConfig cfg = make_config(0.4, 33, 3.0, 1.5, dir, "both");
  const nlohmann::json echo = to_json(cfg);
  CHECK(echo["method"] == "both");
  CHECK(echo["exponents"]["p"] == 3.0);
  CHECK(echo["solver"]["seed"] == 0);
  CHECK(echo["operator"]["backend"] == "restricted");
}

TEST_CASE("rejected regime writes only the report") {
  const fs::path dir = scratch("rejected");
  const RunConfig cfg = make_config(0.3, 33, 5.0, 5.0, dir);
  const SolveReport r = run_solve(cfg);
  CHECK(r.status == Status::rejected_regime);
  CHECK(exit_code(r) == 2);
  CHECK(r.methods.empty());
  write_outputs(r, cfg);
  CHECK_FALSE(fs::exists(dir / "solution.csv"));
  const nlohmann::json j = nlohmann::json::parse(std::ifstream(dir / "report.json"));
  CHECK(j["status"] == "rejected-regime");
  CHECK(j["verdict"]["below_hyperbola"] == false);
  fs::remove_all(dir);
}

TEST_CASE("both methods and the dual route for pq < 1") {
  const fs::path dir = scratch("both");
  const SolveReport r = run_solve(make_config(0.3, 65, 2.0, 2.0, dir, "both"));
  CHECK(r.status == Status::converged);
  REQUIRE(r.methods.size() == 2);
  CHECK(r.checks["dual_vs_nehari"]["within_tolerance"].get<bool>());

  const SolveReport sub = run_solve(make_config(0.3, 65, 0.5, 0.5, dir, "dual"));
  REQUIRE(sub.methods.size() == 1);
  CHECK(sub.methods[0].method == "nehari");
  CHECK(sub.status == Status::converged);
  CHECK(sub.methods[0].level < 0.0);
}

TEST_CASE("budget exhaustion is reported as nonconverged") {
  const fs::path dir = scratch("budget");
  RunConfig cfg = make_config(0.3, 33, 2.0, 2.0, dir);
  cfg.solver.max_iter = 2;
  const SolveReport r = run_solve(cfg);
  CHECK(r.status == Status::nonconverged);
  CHECK(exit_code(r) == 1);
  write_outputs(r, cfg);
  CHECK(fs::exists(dir / "solution.csv"));
  fs::remove_all(dir);
}

TEST_CASE("diagnose") {
  const fs::path dir = scratch("diagnose");
  const RunConfig cfg = make_config(0.5, 512, 2.0, 2.0, dir);
  const DiagnoseReport r = run_diagnose(cfg);
  const DiagnosticEntry* torsion = r.find("operator.torsion_l2");
  REQUIRE(torsion != nullptr);
  CHECK(torsion->passed);
  CHECK(torsion->measured < torsion->threshold);
  CHECK(r.passed());
  CHECK(exit_code(r) == 0);
  for (const char* name : {"operator.comparison", "operator.hopf", "spectral.semigroup", "spectral.form_signs",
                           "fenchel.roundtrip", "gradient.I", "gradient.J", "gradient.E"}) {
    INFO(name);
    REQUIRE(r.find(name) != nullptr);
    CHECK(r.find(name)->passed);
  }
  write_outputs(r, cfg);
  CHECK(fs::exists(dir / "report.json"));
  fs::remove_all(dir);
}

TEST_CASE("lattice parsing") {
  const SweepLattice l = parse_lattice("0.2,4,0.5,3,11");
  CHECK(l.p_min == 0.2);
  CHECK(l.p_max == 4.0);
  CHECK(l.q_min == 0.5);
  CHECK(l.q_max == 3.0);
  CHECK(l.steps == 11);
  CHECK_THROWS_AS(parse_lattice("0.2,4,0.5,3"), UsageError);
  CHECK_THROWS_AS(parse_lattice("0.2,4,0.5,3,x"), UsageError);
  CHECK_THROWS_AS(parse_lattice("0.2,4,0.5,3,2.5"), UsageError);
  CHECK_THROWS_AS(parse_lattice("4,0.2,0.5,3,3"), UsageError);
  CHECK_THROWS_AS(parse_lattice("0,1,0.5,3,3"), UsageError);
}

TEST_CASE("sweep boundary follows the hyperbola") {
  const fs::path dir = scratch("sweep");
  const RunConfig cfg = make_config(0.3, 33, 2.0, 2.0, dir);
  const SweepReport r = run_sweep(cfg, parse_lattice("0.2,4,0.2,4,41"), true);
  REQUIRE(r.points.size() == 41 * 41);
  for (std::size_t k = 0; k < r.points.size(); ++k) {
    const SweepPoint& pt = r.points[k];
    CHECK(pt.p == doctest::Approx(0.2 + 0.095 * static_cast<double>(k / 41)));
    const double sum = 1.0 / (pt.p + 1.0) + 1.0 / (pt.q + 1.0);
    if (std::abs(sum - 0.4) > 1e-9 && std::abs(sum - 1.0) > 1e-9)
      CHECK(pt.subcritical == (sum < 1.0 && sum > 1.0 - 2.0 * 0.3));
    CHECK(pt.status == "skipped");
    CHECK_FALSE(pt.c_I.has_value());
  }
  write_outputs(r, cfg);
  const auto lines = read_lines(dir / "sweep.csv");
  CHECK(lines.size() == 41 * 41 + 1);
  CHECK(lines[0] == "p,q,subcritical,pq_constraint,c_I,status");
  fs::remove_all(dir);
}

TEST_CASE("sweep solves below the hyperbola") {
  const fs::path dir = scratch("sweep_solve");
  const RunConfig cfg = make_config(0.3, 33, 2.0, 2.0, dir);
  const SweepReport r = run_sweep(cfg, parse_lattice("0.5,5,0.5,5,4"));
  CHECK(exit_code(r) == 0);
  for (const auto& pt : r.points) {
    INFO(pt.p, " ", pt.q, " ", pt.reason);
    if (std::abs(pt.p * pt.q - 1.0) < 1e-12) {
      CHECK(pt.status == "skipped");
    } else if (!pt.below_hyperbola) {
      CHECK(pt.status == "skipped");
      CHECK_FALSE(pt.reason.empty());
    } else {
      CHECK(pt.status == "converged");
      REQUIRE(pt.c_I.has_value());
      CHECK((*pt.c_I > 0.0) == (pt.p * pt.q > 1.0));
    }
  }
  const SweepReport again = run_sweep(cfg, parse_lattice("0.5,5,0.5,5,4"));
  for (std::size_t k = 0; k < r.points.size(); ++k) CHECK(r.points[k].c_I == again.points[k].c_I);
}

}
