#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "hlx/error.hpp"
#include "hlx/harness.hpp"

using namespace hlx;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

fs::path fresh_dir(const std::string& name) {
  auto d = fs::temp_directory_path() / ("hlx_harness_" + name);
  fs::remove_all(d);
  return d;
}

ExperimentConfig config(const std::string& ini, Task task, const fs::path& out) {
  std::istringstream is(ini);
  auto cfg = parse_config(is, task, "/tmp");
  cfg.out_dir = out.string();
  return cfg;
}

// Reference FNV-1a written out over raw bytes, independent of the library routine.
std::uint64_t fnv_ref(const std::string& s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (std::size_t i = 0; i < s.size(); ++i) h = (h ^ static_cast<std::uint8_t>(s[i])) * 1099511628211ULL;
  return h;
}

}  // namespace

TEST_CASE("task names round trip") {
  for (auto t : {Task::validate, Task::legendre, Task::flow, Task::criteria, Task::patch, Task::solve,
                 Task::compare, Task::aronsson, Task::acceptance})
    CHECK(parse_task(to_string(t)) == t);
  CHECK_FALSE(parse_task("unknown").has_value());
  CHECK_FALSE(parse_task("").has_value());
}

TEST_CASE("FNV-1a 64 against published vectors") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
  CHECK(fnv1a64_hex("a") == "af63dc4c8601ec8c");
  std::string bin("\0\xff\x10 x", 5);
  CHECK(fnv1a64(bin) == fnv_ref(bin));
}

TEST_CASE("config parsing") {
  const std::string ini =
      "[run]\nseed = 42\nout = results\n"
      "[hamiltonian]\nkind = quadratic\ndim = 2\nmatrix = 1 0, 0 2\n"
      "[grid]\nn = 17 9\nlo = 0 -1\nhi = 1 1\n"
      "[data]\nfamily = cone\nk = 0.25\nvertex = 2 3\npath = sub/u.csv\n"
      "[tolerances]\nsolver = 1e-9\n"
      "[patch]\ngammas = 0.3, 0.1\n";
  std::istringstream is(ini);
  auto cfg = parse_config(is, Task::patch, "/base/dir");
  CHECK(cfg.seed == 42);
  CHECK(fs::path(cfg.out_dir).is_absolute());
  CHECK(fs::path(cfg.out_dir).filename() == "results");
  CHECK(cfg.hamiltonian.kind == "quadratic");
  CHECK(cfg.hamiltonian.matrix == std::vector<double>{1, 0, 0, 2});
  CHECK(cfg.grid.n == std::vector<int>{17, 9});
  CHECK(cfg.grid.lo == std::vector<double>{0, -1});
  CHECK(cfg.data.family == "cone");
  CHECK(cfg.data.k == 0.25);
  CHECK(cfg.data.path == "/base/dir/sub/u.csv");
  CHECK(cfg.number("tolerances.solver", 0) == 1e-9);
  CHECK(cfg.numbers("patch.gammas", {}) == std::vector<double>{0.3, 0.1});
  CHECK(cfg.number("solve.t", 0.5) == 0.5);

  auto g = make_grid(cfg.grid);
  CHECK(g.dims == 2);
  CHECK(g.n[0] == 17);
  CHECK(g.h[1] == doctest::Approx(0.25));

  for (const char* bad : {"[grid]\nn = 3 x\n", "[nosuch]\na = 1\n", "[grid]\nsize = 3\n", "[run]\nseed = -1\n",
                          "[data]\nk = \n"}) {
    std::istringstream b(bad);
    try {
      parse_config(b, Task::solve);
      FAIL("expected config error for " << bad);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::input);
    }
  }
}

TEST_CASE("data families") {
  auto H = HamiltonianModel::power(2, 2.0);
  Grid g = Grid::square(9, 9, 0, 1, 0, 1);
  DataSpec aff;
  aff.slope = {0.5, -2};
  aff.offset = 1;
  auto a = make_data(aff, g, H, 1);
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto p = g.point(i);
    CHECK(a[i] == doctest::Approx(0.5 * p[0] - 2 * p[1] + 1).epsilon(1e-15));
    CHECK(a.boundary[i] == (g.edge_distance(i) == 0.0));
  }

  // Closed form for |p|^2/2: C_k(z) = sqrt(2k)|z|.
  DataSpec cone;
  cone.family = "cone";
  cone.k = 0.5;
  cone.vertex = {-0.5, 2};
  auto c = make_data(cone, g, H, 1);
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto p = g.point(i);
    CHECK(c[i] == doctest::Approx(std::hypot(p[0] + 0.5, p[1] - 2)).epsilon(1e-5));  // sampled level set
  }
  CHECK(exact_solution(cone, g, H).has_value());
  cone.vertex = {0.5, 0.5};
  CHECK_FALSE(exact_solution(cone, g, H).has_value());

  DataSpec ex;
  ex.family = "aronsson-exemplar";
  CHECK_FALSE(exact_solution(ex, g, H).has_value());  // [0,1]^2 crosses x = 1/2
  Grid off = Grid::square(9, 9, 0.6, 1.6, 0.6, 1.6);
  REQUIRE(exact_solution(ex, off, H).has_value());
  CHECK_FALSE(exact_solution(ex, off, HamiltonianModel::power(2, 1.0)).has_value());
  CHECK_THROWS_AS(make_data(ex, Grid::line(9, 0.6, 1.6), HamiltonianModel::power(1, 2.0), 1), Error);

  DataSpec rnd;
  rnd.family = "random-seeded";
  auto r1 = make_data(rnd, g, H, 5), r2 = make_data(rnd, g, H, 5), r3 = make_data(rnd, g, H, 6);
  CHECK(r1.values == r2.values);
  CHECK(r1.values != r3.values);
  CHECK_FALSE(exact_solution(rnd, g, H).has_value());

  DataSpec bad;
  bad.family = "nope";
  CHECK_THROWS_AS(make_data(bad, g, H, 1), Error);
}

TEST_CASE("hamiltonian specs") {
  HamiltonianSpec s;
  s.kind = "polygon";
  s.ball = {1, 0, 0, 1, -1, 0, 0, -1};
  auto H = make_hamiltonian(s);
  Vec p(2);
  p << 0.5, 0.5;
  CHECK(H(p) == doctest::Approx(1.0));  // gauge of the l1 ball: |p1| + |p2|
  s.ball = {1, 0, 0};
  CHECK_THROWS_AS(make_hamiltonian(s), Error);
  s.kind = "quadratic";
  s.matrix = {1, 0, 0};
  CHECK_THROWS_AS(make_hamiltonian(s), Error);
  s.kind = "other";
  CHECK_THROWS_AS(make_hamiltonian(s), Error);
}

TEST_CASE("legendre run: artifacts, hashes, determinism") {
  const std::string ini = "[hamiltonian]\nkind = power\ndim = 1\nexponent = 2\n[legendre]\nn = 129\n";
  auto d1 = fresh_dir("leg1"), d2 = fresh_dir("leg2");
  auto r1 = run_experiment(config(ini, Task::legendre, d1));
  auto r2 = run_experiment(config(ini, Task::legendre, d2));
  CHECK(r1.exit_code == 0);
  REQUIRE(r1.checks.size() == 1);
  CHECK(r1.checks[0].pass);
  REQUIRE(r1.artifacts == r2.artifacts);
  CHECK(std::find(r1.artifacts.begin(), r1.artifacts.end(), "conjugate.csv") != r1.artifacts.end());
  for (const auto& a : r1.artifacts) CHECK(slurp(d1 / a) == slurp(d2 / a));

  auto m = nlohmann::json::parse(slurp(r1.manifest_path));
  CHECK(m["task"] == "legendre");
  CHECK(m["seed"] == 1);
  CHECK(m["status"] == "pass");
  CHECK(m["tolerances"]["legendre"] == 3.0);
  REQUIRE(m["artifacts"].size() == r1.artifacts.size());
  for (const auto& a : m["artifacts"]) {
    std::string bytes = slurp(d1 / a["file"].get<std::string>());
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv_ref(bytes)));
    CHECK(a["fnv1a64"] == hex);
    CHECK(a["bytes"] == bytes.size());
  }
  // Every text artifact records the seed.
  auto txt = slurp(d1 / "legendre.txt");
  CHECK(txt.rfind("# task=legendre seed=1\n", 0) == 0);
  CHECK(txt.find("max_error=") != std::string::npos);
  auto dat = slurp(d1 / "conjugate.dat");
  CHECK(dat.rfind("# task=legendre seed=1", 0) == 0);
}

TEST_CASE("solve and compare on affine data") {
  const std::string ini =
      "[hamiltonian]\nkind = power\ndim = 2\nexponent = 2\n[grid]\nn = 17 17\n"
      "[data]\nfamily = affine\nslope = 0.4 -0.8\n";
  auto d = fresh_dir("solve");
  auto r = run_experiment(config(ini, Task::solve, d));
  CHECK(r.exit_code == 0);
  REQUIRE_FALSE(r.checks.empty());
  CHECK(r.checks[0].name == "converged");
  CHECK(r.checks[0].detail.find("max_error=") != std::string::npos);
  auto u = read_csv((d / "u.csv").string());
  for (std::size_t i = 0; i < u.size(); ++i) {
    auto p = u.grid.point(i);
    CHECK(u[i] == doctest::Approx(0.4 * p[0] - 0.8 * p[1]).epsilon(0).scale(1).epsilon(1e-7));
  }
  auto dc = fresh_dir("compare");
  auto rc = run_experiment(config(ini, Task::compare, dc));
  CHECK(rc.exit_code == 0);
  CHECK(fs::exists(dc / "u_random.csv"));
}

TEST_CASE("module errors surface in the manifest with exit 1") {
  const std::string ini = "[hamiltonian]\ndim = 1\n[grid]\nn = 9 9\n";
  auto d = fresh_dir("err");
  auto r = run_experiment(config(ini, Task::solve, d));
  CHECK(r.exit_code == 1);
  CHECK(r.error.find("dimensions") != std::string::npos);
  auto m = nlohmann::json::parse(slurp(r.manifest_path));
  CHECK(m["status"] == "error");
  CHECK(m["error"]["kind"] == "input");

  // A failing check is exit 1 without an error: a zero floor rejects any negative residual.
  const std::string conc =
      "[hamiltonian]\nkind = power\ndim = 2\n[grid]\nn = 33 33\nlo = -1 -1\nhi = 1 1\n"
      "[data]\nfamily = random-seeded\n[aronsson]\nrho = 3\nsamples = 5\n[tolerances]\naronsson_floor = 0\n";
  auto r2 = run_experiment(config(conc, Task::aronsson, fresh_dir("floor")));
  CHECK(r2.error.empty());
  REQUIRE(r2.checks.size() == 1);
  CHECK_FALSE(r2.checks[0].pass);
  CHECK(r2.exit_code == 1);
}

TEST_CASE("validate run flags a Hamiltonian with a flat zero set") {
  auto d = fresh_dir("validate");
  const std::string ok = "[hamiltonian]\nkind = power\ndim = 2\nexponent = 2\n";
  auto r = run_experiment(config(ok, Task::validate, d));
  CHECK(r.exit_code == 0);
  CHECK(r.checks.size() == 5);
}

TEST_CASE("xy tables skip the sentinel") {
  auto p = fs::temp_directory_path() / "hlx_xy.dat";
  write_xy(p.string(), "x y", {0, 1, 2}, {1.5, 1e300, -2});
  CHECK(slurp(p) == "# x y\n0 1.5\n2 -2\n");
  CHECK_THROWS_AS(write_xy(p.string(), "", {0}, {}), Error);
}

TEST_CASE("acceptance task writes a verdict table") {
  auto d = fresh_dir("acc");
  auto r = run_experiment(config("[acceptance]\nonly = 1\n", Task::acceptance, d));
  REQUIRE(r.checks.size() == 1);
  CHECK(r.checks[0].name == "criterion_1");
  CHECK(r.checks[0].pass);
  auto txt = slurp(d / "acceptance.txt");
  CHECK(txt.find("criterion 1 legendre_round_trip PASS") != std::string::npos);
}
