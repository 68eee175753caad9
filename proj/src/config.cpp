#include "fham/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "fham/error.hpp"

namespace fham {

namespace {

const std::set<std::string, std::less<>> kTopLevel{"domain", "operator", "exponents", "hamiltonian",
                                                   "method", "solver", "output"};
const std::set<std::string, std::less<>> kDomain{"a", "b", "n"};
const std::set<std::string, std::less<>> kOperator{"s", "backend"};
const std::set<std::string, std::less<>> kExponents{"p", "q", "N_dim"};
const std::set<std::string, std::less<>> kHamiltonian{"kind", "eps", "a_c", "b_c", "theta"};
const std::set<std::string, std::less<>> kSolver{"tol", "max_iter", "seed", "path_nodes"};
const std::set<std::string, std::less<>> kOutput{"dir", "formats"};

void reject_unknown(const toml::table& table, const std::set<std::string, std::less<>>& allowed,
                    std::string_view prefix) {
  for (const auto& [key, value] : table) {
    if (!allowed.contains(key.str())) {
      std::string path = prefix.empty() ? std::string(key.str())
                                        : std::string(prefix) + "." + std::string(key.str());
      throw ConfigError("unknown key '" + path + "'");
    }
  }
}

const toml::table* subtable(const toml::table& root, std::string_view name) {
  const toml::node* node = root.get(name);
  if (!node) return nullptr;
  const toml::table* t = node->as_table();
  if (!t) throw ConfigError(std::string(name) + " must be a table");
  return t;
}

std::optional<double> get_real(const toml::table* t, std::string_view section, std::string_view key) {
  if (!t) return std::nullopt;
  const toml::node* node = t->get(key);
  if (!node) return std::nullopt;
  if (auto v = node->value<double>()) {
    if (!std::isfinite(*v)) throw ConfigError(std::string(section) + "." + std::string(key) + " must be finite");
    return *v;
  }
  throw ConfigError(std::string(section) + "." + std::string(key) + " must be a number");
}

std::optional<std::int64_t> get_int(const toml::table* t, std::string_view section, std::string_view key) {
  if (!t) return std::nullopt;
  const toml::node* node = t->get(key);
  if (!node) return std::nullopt;
  if (const auto* v = node->as_integer()) return v->get();
  throw ConfigError(std::string(section) + "." + std::string(key) + " must be an integer");
}

std::optional<std::string> get_string(const toml::table* t, std::string_view section, std::string_view key) {
  if (!t) return std::nullopt;
  const toml::node* node = t->get(key);
  if (!node) return std::nullopt;
  if (const auto* v = node->as_string()) return v->get();
  throw ConfigError(std::string(section) + "." + std::string(key) + " must be a string");
}

std::size_t positive_count(std::int64_t v, std::string_view path) {
  if (v < 1) throw ConfigError(std::string(path) + " must be >= 1");
  return static_cast<std::size_t>(v);
}

template <class T>
T required(std::optional<T> v, std::string_view path) {
  if (!v) throw ConfigError("missing required key '" + std::string(path) + "'");
  return *v;
}

}  // namespace

Method parse_method(std::string_view name) {
  if (name == "nehari") return Method::nehari;
  if (name == "dual") return Method::dual;
  if (name == "both") return Method::both;
  throw ConfigError("method must be one of nehari, dual, both (got '" + std::string(name) + "')");
}

std::string_view to_string(Method method) {
  switch (method) {
    case Method::nehari: return "nehari";
    case Method::dual: return "dual";
    case Method::both: return "both";
  }
  return "unknown";
}

bool RunConfig::wants(std::string_view format) const {
  return std::find(output.formats.begin(), output.formats.end(), format) != output.formats.end();
}

RunConfig parse_config(std::string_view text, std::string_view source) {
  toml::table root;
  try {
    root = toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << source << ":" << e.source().begin.line << ":" << e.source().begin.column
        << ": parse error: " << e.description();
    throw ConfigError(msg.str());
  }
  reject_unknown(root, kTopLevel, "");

  const toml::table* domain = subtable(root, "domain");
  const toml::table* op = subtable(root, "operator");
  const toml::table* expo = subtable(root, "exponents");
  const toml::table* ham = subtable(root, "hamiltonian");
  const toml::table* solver = subtable(root, "solver");
  const toml::table* output = subtable(root, "output");
  if (domain) reject_unknown(*domain, kDomain, "domain");
  if (op) reject_unknown(*op, kOperator, "operator");
  if (expo) reject_unknown(*expo, kExponents, "exponents");
  if (ham) reject_unknown(*ham, kHamiltonian, "hamiltonian");
  if (solver) reject_unknown(*solver, kSolver, "solver");
  if (output) reject_unknown(*output, kOutput, "output");

  RunConfig cfg;
  cfg.domain.a = get_real(domain, "domain", "a").value_or(cfg.domain.a);
  cfg.domain.b = get_real(domain, "domain", "b").value_or(cfg.domain.b);
  cfg.domain.n = positive_count(required(get_int(domain, "domain", "n"), "domain.n"), "domain.n");
  if (!(cfg.domain.b > cfg.domain.a)) throw ConfigError("domain: b must exceed a");

  cfg.op.s = required(get_real(op, "operator", "s"), "operator.s");
  if (!(cfg.op.s > 0.0 && cfg.op.s <= 1.0)) throw ConfigError("operator.s: s must lie in (0,1]");
  if (auto b = get_string(op, "operator", "backend")) cfg.op.backend = parse_backend(*b);

  cfg.exponents.p = required(get_real(expo, "exponents", "p"), "exponents.p");
  cfg.exponents.q = required(get_real(expo, "exponents", "q"), "exponents.q");
  cfg.exponents.N_dim = get_real(expo, "exponents", "N_dim").value_or(1.0);
  if (!(cfg.exponents.p > 0.0)) throw ConfigError("exponents.p must be > 0");
  if (!(cfg.exponents.q > 0.0)) throw ConfigError("exponents.q must be > 0");
  if (!(cfg.exponents.N_dim > 0.0)) throw ConfigError("exponents.N_dim must be > 0");
  if (cfg.exponents.N_dim <= 2.0 * cfg.op.s) {
    cfg.warnings.emplace_back("exponents.N_dim <= 2s: the theory assumes N > 2s; classifier results are indicative only");
  }
  if (cfg.op.s == 1.0) cfg.warnings.emplace_back("operator.s = 1 is a validation limit (classical Laplacian)");

  const double p = cfg.exponents.p, q = cfg.exponents.q;
  if (auto k = get_string(ham, "hamiltonian", "kind")) cfg.hamiltonian.kind = parse_hamiltonian_kind(*k);
  if (cfg.hamiltonian.kind == HamiltonianKind::custom) {
    throw ConfigError("hamiltonian.kind: custom hamiltonians need code hooks and cannot be configured from a file");
  }
  cfg.hamiltonian.eps = get_real(ham, "hamiltonian", "eps").value_or(0.0);
  cfg.hamiltonian.a_c = get_real(ham, "hamiltonian", "a_c").value_or(0.5 * (p + 1.0));
  cfg.hamiltonian.b_c = get_real(ham, "hamiltonian", "b_c").value_or(0.5 * (q + 1.0));
  cfg.hamiltonian.theta = get_real(ham, "hamiltonian", "theta").value_or((q + 1.0) / (p + q + 2.0));
  if (!(cfg.hamiltonian.eps >= 0.0)) throw ConfigError("hamiltonian.eps must be >= 0");
  if (!(cfg.hamiltonian.theta > 0.0 && cfg.hamiltonian.theta < 1.0)) {
    throw ConfigError("hamiltonian.theta must lie in (0,1)");
  }
  if (cfg.hamiltonian.kind == HamiltonianKind::coupled_eps) {
    if (!(cfg.hamiltonian.a_c > 1.0) || !(cfg.hamiltonian.b_c > 1.0)) {
      throw ConfigError("hamiltonian.a_c and hamiltonian.b_c must exceed 1");
    }
    const double identity = cfg.hamiltonian.a_c / (p + 1.0) + cfg.hamiltonian.b_c / (q + 1.0);
    if (std::abs(identity - 1.0) > 1e-12) {
      throw ConfigError("hamiltonian: a_c/(p+1) + b_c/(q+1) must equal 1");
    }
  }

  if (auto m = root.get("method")) {
    const auto* str = m->as_string();
    if (!str) throw ConfigError("method must be a string");
    cfg.method = parse_method(str->get());
  }
  const bool nehari = cfg.method != Method::dual;
  if (p * q == 1.0) {
    throw ConfigError(std::string("exponents: pq = 1 is excluded, pq != 1 required (method = ") +
                      std::string(to_string(cfg.method)) + ")");
  }
  if (nehari && cfg.hamiltonian.kind != HamiltonianKind::lane_emden) {
    throw ConfigError("method nehari requires hamiltonian.kind = lane_emden");
  }

  cfg.solver.tol = get_real(solver, "solver", "tol").value_or(cfg.solver.tol);
  if (!(cfg.solver.tol > 0.0)) throw ConfigError("solver.tol must be > 0");
  if (auto v = get_int(solver, "solver", "max_iter")) cfg.solver.max_iter = positive_count(*v, "solver.max_iter");
  if (auto v = get_int(solver, "solver", "seed")) {
    if (*v < 0) throw ConfigError("solver.seed must be >= 0");
    cfg.solver.seed = static_cast<std::uint64_t>(*v);
  }
  if (auto v = get_int(solver, "solver", "path_nodes")) {
    cfg.solver.path_nodes = positive_count(*v, "solver.path_nodes");
    if (cfg.solver.path_nodes < 3) throw ConfigError("solver.path_nodes must be >= 3");
  }

  if (auto d = get_string(output, "output", "dir")) cfg.output.dir = *d;
  if (output) {
    if (const toml::node* node = output->get("formats")) {
      const toml::array* arr = node->as_array();
      if (!arr) throw ConfigError("output.formats must be an array of strings");
      cfg.output.formats.clear();
      for (const auto& el : *arr) {
        const auto* str = el.as_string();
        if (!str || (str->get() != "csv" && str->get() != "json")) {
          throw ConfigError("output.formats entries must be \"csv\" or \"json\"");
        }
        cfg.output.formats.push_back(str->get());
      }
    }
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string());
}

HamiltonianSpec make_hamiltonian(const RunConfig& cfg) {
  const double p = cfg.exponents.p, q = cfg.exponents.q;
  HamiltonianSpec spec = cfg.hamiltonian.kind == HamiltonianKind::coupled_eps
                             ? HamiltonianSpec::coupled_eps(p, q, cfg.hamiltonian.eps, cfg.hamiltonian.a_c,
                                                            cfg.hamiltonian.b_c)
                             : HamiltonianSpec::lane_emden(p, q);
  spec.set_theta(cfg.hamiltonian.theta);
  return spec;
}

}  // namespace fham
