#include <cmath>
#include <cstdio>
#include <fstream>

#include "fham/commands.hpp"
#include "fham/error.hpp"

namespace fham {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

json field_json(const Field& f) { return std::vector<double>(f.data(), f.data() + f.size()); }

/// Replaces non-finite numbers by null and counts them.
std::size_t scrub(json& j) {
  std::size_t count = 0;
  if (j.is_number_float()) {
    if (!std::isfinite(j.get<double>())) {
      j = nullptr;
      ++count;
    }
  } else if (j.is_structured()) {
    for (auto& child : j) count += scrub(child);
  }
  return count;
}

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

fs::path prepare_dir(const RunConfig& cfg) {
  const fs::path dir(cfg.output.dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw Error("write to '" + path.string() + "' failed");
}

void write_json(const fs::path& path, json j) {
  const std::size_t bad = scrub(j);
  if (bad > 0) j["non_finite_entries"] = bad;
  auto out = open_out(path);
  out << j.dump(2) << '\n';
  finish(out, path);
}

}  // namespace

json to_json(const RunConfig& cfg) {
  return {{"domain", {{"a", cfg.domain.a}, {"b", cfg.domain.b}, {"n", cfg.domain.n}}},
          {"operator", {{"s", cfg.op.s}, {"backend", to_string(cfg.op.backend)}}},
          {"exponents", {{"p", cfg.exponents.p}, {"q", cfg.exponents.q}, {"N_dim", cfg.exponents.N_dim}}},
          {"hamiltonian",
           {{"kind", to_string(cfg.hamiltonian.kind)},
            {"eps", cfg.hamiltonian.eps},
            {"a_c", cfg.hamiltonian.a_c},
            {"b_c", cfg.hamiltonian.b_c},
            {"theta", cfg.hamiltonian.theta}}},
          {"method", to_string(cfg.method)},
          {"solver",
           {{"tol", cfg.solver.tol},
            {"max_iter", cfg.solver.max_iter},
            {"seed", cfg.solver.seed},
            {"path_nodes", cfg.solver.path_nodes}}},
          {"output", {{"dir", cfg.output.dir}, {"formats", cfg.output.formats}}}};
}

json to_json(const ExponentVerdict& v) {
  return {{"subcritical", v.subcritical},     {"below_hyperbola", v.below_hyperbola},
          {"pq_constraint", v.pq_constraint}, {"superlinear", v.superlinear},
          {"sublinear", v.sublinear},         {"lower_vacuous", v.lower_vacuous},
          {"hyperbola_sum", v.hyperbola_sum}, {"notes", v.notes}};
}

json to_json(const SolveReport& r) {
  json methods = json::array();
  for (const auto& m : r.methods) {
    methods.push_back({{"method", m.method},
                       {"converged", m.converged},
                       {"level", m.level},
                       {"grad_norm", m.grad_norm},
                       {"r_u", m.r_u},
                       {"r_v", m.r_v},
                       {"scale", m.scale},
                       {"iterations", m.iterations},
                       {"wall_time_s", m.wall_time_s},
                       {"telemetry", m.telemetry},
                       {"note", m.note},
                       {"u", field_json(m.u)},
                       {"v", field_json(m.v)}});
  }
  return {{"command", "solve"},
          {"config", to_json(r.config)},
          {"warnings", r.config.warnings},
          {"grid", {{"a", r.grid.a}, {"b", r.grid.b}, {"n", r.grid.n}, {"h", r.grid.h}}},
          {"verdict", to_json(r.verdict)},
          {"methods", methods},
          {"checks", r.checks},
          {"notes", r.notes},
          {"status", to_string(r.status)}};
}

json to_json(const DiagnoseReport& r) {
  json entries = json::array();
  for (const auto& e : r.entries) {
    entries.push_back({{"name", e.name},
                       {"measured", e.measured},
                       {"threshold", e.threshold},
                       {"passed", e.passed},
                       {"gating", e.gating},
                       {"note", e.note}});
  }
  return {{"command", "diagnose"},
          {"config", to_json(r.config)},
          {"warnings", r.config.warnings},
          {"entries", entries},
          {"passed", r.passed()}};
}

json to_json(const SweepReport& r) {
  json points = json::array();
  for (const auto& pt : r.points) {
    json j{{"p", pt.p},
           {"q", pt.q},
           {"subcritical", pt.subcritical},
           {"pq_constraint", pt.pq_constraint},
           {"below_hyperbola", pt.below_hyperbola},
           {"status", pt.status},
           {"reason", pt.reason}};
    j["c_I"] = pt.c_I ? json(*pt.c_I) : json(nullptr);
    points.push_back(std::move(j));
  }
  return {{"command", "sweep"},
          {"config", to_json(r.config)},
          {"warnings", r.config.warnings},
          {"lattice",
           {{"p_min", r.lattice.p_min},
            {"p_max", r.lattice.p_max},
            {"q_min", r.lattice.q_min},
            {"q_max", r.lattice.q_max},
            {"steps", r.lattice.steps}}},
          {"points", points}};
}

std::vector<fs::path> write_outputs(const SolveReport& report, const RunConfig& cfg) {
  const fs::path dir = prepare_dir(cfg);
  std::vector<fs::path> written;
  const fs::path csv = dir / "solution.csv";
  const MethodResult* m = report.primary();
  if (report.status == Status::rejected_regime || !m) {
    std::error_code ec;
    fs::remove(csv, ec);
  } else if (cfg.wants("csv")) {
    auto out = open_out(csv);
    out << "x,u,v,delta,res_u,res_v\n";
    const Grid1D& g = report.grid;
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(g.n); ++i) {
      out << fmt17(g.nodes[i]) << ',' << fmt17(m->u[i]) << ',' << fmt17(m->v[i]) << ','
          << fmt17(g.delta[i]) << ',' << fmt17(report.res_u[i]) << ',' << fmt17(report.res_v[i]) << '\n';
    }
    finish(out, csv);
    written.push_back(csv);
  }
  if (cfg.wants("json")) {
    const fs::path path = dir / "report.json";
    write_json(path, to_json(report));
    written.push_back(path);
  }
  return written;
}

std::vector<fs::path> write_outputs(const DiagnoseReport& report, const RunConfig& cfg) {
  const fs::path dir = prepare_dir(cfg);
  std::vector<fs::path> written;
  if (cfg.wants("json")) {
    const fs::path path = dir / "report.json";
    write_json(path, to_json(report));
    written.push_back(path);
  }
  return written;
}

std::vector<fs::path> write_outputs(const SweepReport& report, const RunConfig& cfg) {
  const fs::path dir = prepare_dir(cfg);
  std::vector<fs::path> written;
  if (cfg.wants("csv")) {
    const fs::path csv = dir / "sweep.csv";
    auto out = open_out(csv);
    out << "p,q,subcritical,pq_constraint,c_I,status\n";
    for (const auto& pt : report.points) {
      out << fmt17(pt.p) << ',' << fmt17(pt.q) << ',' << (pt.subcritical ? "true" : "false") << ','
          << (pt.pq_constraint ? "true" : "false") << ',' << (pt.c_I ? fmt17(*pt.c_I) : "") << ','
          << pt.status << '\n';
    }
    finish(out, csv);
    written.push_back(csv);
  }
  if (cfg.wants("json")) {
    const fs::path path = dir / "report.json";
    write_json(path, to_json(report));
    written.push_back(path);
  }
  return written;
}

}  // namespace fham
