#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <random>

#include "hlx/error.hpp"
#include "hlx/extreal.hpp"
#include "hlx/geometry.hpp"
#include "hlx/hopflax.hpp"
#include "hlx/simd.hpp"

using namespace hlx;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

ScalarField random_lattice(const Grid& g, std::uint64_t seed, double amp) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<long> U(0, 1 << 20);
  ScalarField f(g);
  for (auto& v : f.values) v = amp * static_cast<double>(U(rng)) / (1 << 20);
  return f;
}

bool bit_equal(const ScalarField& a, const ScalarField& b) {
  return std::memcmp(a.values.data(), b.values.data(), a.size() * sizeof(double)) == 0;
}

// Independent brute-force flow: every node pair, no stencil, no SIMD.
double brute_up(const HamiltonianModel& H, const ScalarField& u, std::size_t x, double t, double r) {
  auto px = u.grid.point(x);
  double best = -1e308;
  for (std::size_t y = 0; y < u.size(); ++y) {
    auto py = u.grid.point(y);
    double d0 = py[0] - px[0], d1 = py[1] - px[1];
    if (std::hypot(d0, d1) > r) continue;
    Vec z(u.grid.dims);
    z[0] = d0 / t;
    if (u.grid.dims > 1) z[1] = d1 / t;
    double L = H.lagrangian(z);
    if (is_inf(L)) continue;
    best = std::max(best, u.values[y] - t * L);
  }
  return best;
}

}  // namespace

TEST_CASE("constants are fixed by both flows") {
  auto H = HamiltonianModel::power(2, 2.0);
  Grid g = Grid::square(17, 17, 0, 1, 0, 1);
  ScalarField u(g, 0.375);
  auto fp = FlowParams::with_radius(H, 0.05, 0.3);
  auto a = flow_up(u, fp), b = flow_down(u, fp);
  for (std::size_t i = 0; i < u.size(); ++i) {
    CHECK(a.values[i] == 0.375);
    CHECK(b.values[i] == 0.375);
  }
}

TEST_CASE("affine fields flow by t H(p)") {
  Eigen::MatrixXd A(2, 2);
  A << 1, 0, 0, 2;
  auto H = HamiltonianModel::quadratic(A);
  auto prof = coercivity_profile(H);
  Grid g = Grid::square(41, 41, -1, 1, -1, 1);
  Vec p = v2(0.6, -0.3);
  ScalarField u = sample(g, [&](double x, double y) { return p[0] * x + p[1] * y; });
  const double t = 0.1;
  double K = discrete_lipschitz(u);
  auto fp = FlowParams::from_lipschitz(H, prof, K, t);
  auto up = flow_up(u, fp), dn = flow_down(u, fp);
  auto valid = valid_mask(g, fp.radius, false);
  int checked = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!valid[i]) continue;
    ++checked;
    CHECK(std::abs(up.values[i] - (u.values[i] + t * H(p))) <= g.hmax());
    CHECK(std::abs(dn.values[i] - (u.values[i] - t * H(p))) <= g.hmax());
    if (i % 37 == 0) CHECK(up.values[i] == doctest::Approx(brute_up(H, u, i, t, 2.0)).epsilon(1e-9));
  }
  CHECK(checked > 100);
}

TEST_CASE("cones flow by k t") {
  for (auto H : {HamiltonianModel::power(2, 2.0), HamiltonianModel::power(2, 1.0)}) {
    auto prof = coercivity_profile(H);
    Grid g = Grid::square(33, 33, -1, 1, -1, 1);
    for (double k : {0.5, 2.0}) {
      auto cone = cone_data(H, k);
      ScalarField u = sample(g, [&](double x, double y) { return cone.value(x, y); });
      const double t = 0.125;
      auto fp = FlowParams::from_lipschitz(H, prof, cone.K_k * (1 + 1e-9), t);
      auto up = flow_up(u, fp);
      auto valid = valid_mask(g, fp.radius, false);
      for (std::size_t i = 0; i < u.size(); ++i)
        if (valid[i]) CHECK(std::abs(up.values[i] - (u.values[i] + k * t)) <= 5 * cone.K_k * g.hmax());
    }
  }
}

TEST_CASE("norm Hamiltonian: the down flow of -|x| is -(|x|+t)") {
  auto H = HamiltonianModel::power(1, 1.0);
  Grid g = Grid::line(65, -1, 1);
  ScalarField u = sample(g, [](double x, double) { return -std::abs(x); });
  const double t = 8 * g.h[0];
  auto dn = flow_down(u, FlowParams::with_radius(H, t, 2 * t));
  auto valid = valid_mask(g, 2 * t, false);
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!valid[i]) continue;
    double x = g.point(i)[0];
    CHECK(dn.values[i] == doctest::Approx(-(std::abs(x) + t)).epsilon(1e-12));
  }
  auto H2 = HamiltonianModel::power(2, 1.0);
  Grid g2 = Grid::square(33, 33, -1, 1, -1, 1);
  ScalarField u2 = sample(g2, [](double x, double y) { return -std::hypot(x, y); });
  auto dn2 = flow_down(u2, FlowParams::with_radius(H2, 0.25, 0.5));
  auto valid2 = valid_mask(g2, 0.5, false);
  for (std::size_t i = 0; i < u2.size(); ++i)
    if (valid2[i]) CHECK(std::abs(dn2.values[i] + (-u2.values[i] + 0.25)) <= g2.hmax());
}

TEST_CASE("flow laws hold exactly on random lattice fields") {
  auto H = HamiltonianModel::power(2, 2.0);
  Grid g = Grid::square(17, 17, 0, 1, 0, 1);
  auto fp = FlowParams::with_radius(H, 1.0 / 32, 0.3);
  for (int s = 0; s < 20; ++s) {
    auto u = random_lattice(g, 100 + s, 0.25);
    auto v = u;
    auto bump = random_lattice(g, 900 + s, 0.1);
    for (std::size_t i = 0; i < v.size(); ++i) v.values[i] += bump.values[i];
    auto rep = verify_flow_laws(u, fp, &v, 5.0);
    CHECK(rep.commutation_checked);
    CHECK(rep.ok());
  }
}

TEST_CASE("the sandwich holds exactly off the lattice too") {
  Eigen::MatrixXd A(2, 2);
  A << 1.3, 0.2, 0, 0.7;
  auto H = HamiltonianModel::quadratic(A);
  Grid g = Grid::square(21, 21, 0, 1, 0, 1);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> U(0, 1);
  ScalarField u(g);
  for (auto& x : u.values) x = std::sin(7 * U(rng)) / 3.0;
  auto rep = verify_flow_laws(u, FlowParams::with_radius(H, 0.07, 0.35));
  CHECK_FALSE(rep.commutation_checked);
  CHECK(rep.ok());
}

TEST_CASE("semigroup defect") {
  auto H = HamiltonianModel::power(2, 2.0);
  auto prof = coercivity_profile(H);
  Grid g = Grid::square(33, 33, 0, 1, 0, 1);
  ScalarField c(g, 0.5);
  auto d0 = semigroup_defect(H, prof, c, 1.0 / 32, 1.0 / 64);
  CHECK(d0.max_defect == 0.0);
  ScalarField aff = sample(g, [](double x, double y) { return 0.2 * x - 0.1 * y; });
  auto d1 = semigroup_defect(H, prof, aff, 1.0 / 32, 1.0 / 64);
  CHECK(d1.max_defect <= 3 * g.hmax());
  auto cone = cone_data(H, 0.02);
  ScalarField cu = sample(g, [&](double x, double y) { return cone.value(x - 0.5, y - 0.5); });
  auto d2 = semigroup_defect(H, prof, cu, 1.0 / 32, 1.0 / 64);
  CHECK(d2.max_defect <= 3 * g.hmax());
  CHECK_THROWS_AS(semigroup_defect(H, prof, sample(g, [](double x, double) { return 50 * x; }), 0.2, 0.2),
                  Error);
}

TEST_CASE("doubling the stencil radius changes no valid node") {
  auto H = HamiltonianModel::power(2, 2.0);
  auto prof = coercivity_profile(H);
  Grid g = Grid::square(33, 33, 0, 1, 0, 1);
  auto u = random_lattice(g, 7, 0.2);
  auto fp = FlowParams::from_oscillation(H, prof, u.oscillation(), 1.0 / 40);
  auto a = flow_up(u, fp);
  auto fp2 = FlowParams::with_radius(H, fp.t, 2 * fp.radius);
  auto b = flow_up(u, fp2);
  auto valid = valid_mask(g, fp.radius, false);
  int n = 0;
  for (std::size_t i = 0; i < u.size(); ++i)
    if (valid[i]) {
      ++n;
      CHECK(a.values[i] == b.values[i]);
    }
  CHECK(n > 0);
}

TEST_CASE("flow moves a K-Lipschitz field by at most a_K K t") {
  auto H = HamiltonianModel::power(2, 2.0);
  auto prof = coercivity_profile(H);
  Grid g = Grid::square(33, 33, 0, 1, 0, 1);
  ScalarField u = sample(g, [](double x, double y) { return std::sin(3 * x) * std::cos(2 * y); });
  double K = discrete_lipschitz(u);
  for (double t : {0.2, 0.1, 0.05, 0.025}) {
    auto fp = FlowParams::from_lipschitz(H, prof, K, t);
    auto up = flow_up(u, fp);
    double m = 0;
    for (std::size_t i = 0; i < u.size(); ++i) m = std::max(m, up.values[i] - u.values[i]);
    CHECK(m <= prof.lipschitz_reach(K) * K * t + 1e-12);
  }
}

TEST_CASE("truncation claims are verified against the field") {
  auto H = HamiltonianModel::power(2, 2.0);
  auto prof = coercivity_profile(H);
  Grid g = Grid::square(17, 17, 0, 1, 0, 1);
  auto u = random_lattice(g, 1, 1.0);
  auto fp = FlowParams::from_oscillation(H, prof, 0.1, 0.01);
  CHECK_THROWS_AS(flow_up(u, fp), Error);
  auto fl = FlowParams::from_lipschitz(H, prof, 0.5, 0.01);
  CHECK_THROWS_AS(flow_down(u, fl), Error);
}

TEST_CASE("argmax flow agrees with the field flow and breaks ties low") {
  auto H = HamiltonianModel::power(2, 1.0);
  Grid g = Grid::square(17, 17, 0, 1, 0, 1);
  ScalarField u(g, 0.0);
  Stencil st = build_stencil(H, g, 0.125, 0.25);
  auto a = apply_up_at(st, u, g.index(8, 8));
  CHECK(a.value == 0.0);
  CHECK(a.arg == g.index(6, 8));
  auto v = random_lattice(g, 3, 1.0);
  ScalarField full;
  apply_up(st, v, full);
  for (std::size_t i = 0; i < v.size(); i += 5) CHECK(apply_up_at(st, v, i).value == full.values[i]);
}

TEST_CASE("flows are bit-identical across thread counts and SIMD backends") {
  Eigen::MatrixXd A(2, 2);
  A << 1, 0.5, 0, 1;
  auto H = HamiltonianModel::quadratic(A);
  Grid g = Grid::square(47, 53, 0, 1, 0, 1.2);
  ScalarField u = sample(g, [](double x, double y) { return std::cos(5 * x * y) / 3; });
  auto fp = FlowParams::with_radius(H, 0.03, 0.2);
  setenv("HLX_THREADS", "1", 1);
  simd::force(simd::Backend::scalar);
  auto a = flow_up(u, fp), b = flow_down(u, fp);
  setenv("HLX_THREADS", "4", 1);
  simd::force(std::nullopt);
  auto c = flow_up(u, fp), d = flow_down(u, fp);
  unsetenv("HLX_THREADS");
  CHECK(bit_equal(a, c));
  CHECK(bit_equal(b, d));
}
