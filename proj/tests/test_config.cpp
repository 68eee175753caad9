#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "fham/config.hpp"
#include "fham/error.hpp"

using namespace fham;

namespace {

std::string error_of(std::string_view text) {
  try {
    parse_config(text, "cfg.toml");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

constexpr const char* kMinimal = R"(
[domain]
n = 257
[operator]
s = 0.3
[exponents]
p = 2
q = 2
)";

}  // namespace

TEST_SUITE("config") {

TEST_CASE("defaults are filled") {
  const RunConfig c = parse_config(kMinimal);
  CHECK(c.domain.a == -1.0);
  CHECK(c.domain.b == 1.0);
  CHECK(c.domain.n == 257);
  CHECK(c.op.s == 0.3);
  CHECK(c.op.backend == Backend::restricted);
  CHECK(c.exponents.N_dim == 1.0);
  CHECK(c.method == Method::nehari);
  CHECK(c.solver.tol == 1e-8);
  CHECK(c.solver.path_nodes == 41);
  CHECK(c.hamiltonian.kind == HamiltonianKind::lane_emden);
  CHECK(c.wants("csv"));
  CHECK(c.wants("json"));
  CHECK(c.warnings.empty());
}

TEST_CASE("full document") {
  const RunConfig c = parse_config(R"(
method = "both"
[domain]
a = 0.0
b = 2.0
n = 65
[operator]
s = 0.4
backend = "spectral"
[exponents]
p = 3.0
q = 1.5
N_dim = 2
[hamiltonian]
kind = "lane_emden"
theta = 0.4
[solver]
tol = 1e-9
max_iter = 500
seed = 12
path_nodes = 21
[output]
dir = "results"
formats = ["json"]
)");
  CHECK(c.method == Method::both);
  CHECK(c.domain.b == 2.0);
  CHECK(c.op.backend == Backend::spectral);
  CHECK(c.exponents.N_dim == 2.0);
  CHECK(c.solver.seed == 12);
  CHECK(c.solver.max_iter == 500);
  CHECK(c.output.dir == "results");
  CHECK_FALSE(c.wants("csv"));
  CHECK(make_hamiltonian(c).theta() == 0.4);
}

TEST_CASE("coupled hamiltonian") {
  const RunConfig c = parse_config(R"(
method = "dual"
[domain]
n = 33
[operator]
s = 0.3
[exponents]
p = 2
q = 2
[hamiltonian]
kind = "coupled_eps"
eps = 0.5
a_c = 1.5
b_c = 1.5
)");
  const HamiltonianSpec H = make_hamiltonian(c);
  CHECK(H.kind() == HamiltonianKind::coupled_eps);
  CHECK(H.eps() == 0.5);
}

TEST_CASE("rejections") {
  CHECK(error_of(R"([domain]
n = 10
[operator]
s = 1.5
[exponents]
p = 2
q = 2
)").find("s must lie in (0,1]") != std::string::npos);

  CHECK(error_of(R"([domain]
n = 10
[operator]
s = 0.5
[exponents]
p = 2
q = 0.5
)").find("pq != 1") != std::string::npos);

  CHECK(error_of(R"([domain]
n = 10
nodes = 4
[operator]
s = 0.5
[exponents]
p = 2
q = 2
)").find("unknown key 'domain.nodes'") != std::string::npos);

  CHECK(error_of("colour = 1\n").find("unknown key 'colour'") != std::string::npos);

  const std::string parse = error_of("[domain]\nn = = 3\n");
  CHECK(parse.find("cfg.toml:2:") != std::string::npos);

  CHECK(error_of("[operator]\ns = 0.5\n[exponents]\np = 2\nq = 2\n").find("domain.n") != std::string::npos);

  CHECK(error_of(R"(method = "nehari"
[domain]
n = 10
[operator]
s = 0.5
[exponents]
p = 2
q = 2
[hamiltonian]
kind = "coupled_eps"
eps = 1
a_c = 1.5
b_c = 1.5
)").find("lane_emden") != std::string::npos);

  CHECK(error_of(R"([domain]
n = 10
[operator]
s = 0.5
backend = "fft"
[exponents]
p = 2
q = 2
)").size() > 0);

  CHECK(error_of(R"([domain]
n = 10
[operator]
s = 0.5
[exponents]
p = 2
q = 2
[output]
formats = ["xml"]
)").find("output.formats") != std::string::npos);
}

TEST_CASE("dimension warning") {
  const RunConfig c = parse_config(R"([domain]
n = 10
[operator]
s = 0.6
[exponents]
p = 2
q = 2
)");
  REQUIRE(c.warnings.size() == 1);
  CHECK(c.warnings[0].find("N_dim") != std::string::npos);
}

TEST_CASE("files") {
  const auto path = std::filesystem::temp_directory_path() / "fham_config_test.toml";
  {
    std::ofstream out(path);
    out << kMinimal;
  }
  CHECK(load_config(path).domain.n == 257);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_config(path), ConfigError);
}

}
