#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <random>

#include "hlx/error.hpp"
#include "hlx/solver.hpp"

using namespace hlx;

namespace {

double max_diff(const ScalarField& a, const ScalarField& b) {
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

// Brute midpoint sweep: symmetric pairs only, straight from the Lagrangian.
double brute_sweep_at(const HamiltonianModel& H, const ScalarField& u, std::size_t x, double t, double r) {
  const Grid& g = u.grid;
  auto cx = g.coords(x);
  double up = -1e308, dn = 1e308;
  for (std::size_t y = 0; y < g.size(); ++y) {
    auto cy = g.coords(y);
    int m0 = 2 * cx[0] - cy[0], m1 = 2 * cx[1] - cy[1];
    if (m0 < 0 || m0 >= g.n[0] || (g.dims > 1 && (m1 < 0 || m1 >= g.n[1]))) continue;
    auto px = g.point(x), py = g.point(y);
    Vec z(g.dims);
    z[0] = (py[0] - px[0]) / t;
    if (g.dims > 1) z[1] = (py[1] - px[1]) / t;
    if (std::hypot(py[0] - px[0], py[1] - px[1]) > r * (1 + 1e-12)) continue;
    double cu = t * H.lagrangian(z), cd = t * H.lagrangian(Vec(-z));
    if (cu < 1e299) up = std::max(up, u[y] - cu);
    if (cd < 1e299) dn = std::min(dn, u[y] + cd);
  }
  return 0.5 * (up + dn);
}

ScalarField edge_data(const Grid& g, double (*f)(double, double)) {
  ScalarField u = sample(g, f);
  u.mark_edge_boundary();
  return u;
}

}  // namespace

TEST_CASE("1D quadratic: affine data is recovered") {
  auto H = HamiltonianModel::power(1, 2.0);
  auto prof = coercivity_profile(H);
  auto g = edge_data(Grid::line(33, 0, 1), [](double x, double) { return x; });
  SolveConfig cfg;
  auto r = solve_dirichlet(H, prof, g, cfg);
  CHECK(r.report.converged);
  CHECK(r.report.residual <= cfg.tolerance);
  CHECK(max_diff(r.u, g) <= 10 * cfg.tolerance);
  CHECK(r.report.full_residual <= 2 * cfg.tolerance);
}

TEST_CASE("2D norm: affine trace is recovered") {
  auto H = HamiltonianModel::power(2, 1.0);
  auto prof = coercivity_profile(H);
  auto g = edge_data(Grid::square(17, 17, 0, 1, 0, 1),
                     [](double x, double y) { return 0.4 * x - 0.8 * y + 0.2; });
  for (auto init : {InitMode::boundary_min, InitMode::boundary_max, InitMode::random}) {
    SolveConfig cfg;
    cfg.init = init;
    auto r = solve_dirichlet(H, prof, g, cfg);
    CHECK(r.report.converged);
    CHECK(max_diff(r.u, g) <= 10 * cfg.tolerance);
  }
}

TEST_CASE("sweep matches a brute-force symmetric midpoint") {
  auto H = HamiltonianModel::power(2, 2.0);
  auto grid = Grid::square(9, 11, 0, 1, -0.5, 0.5);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-1, 1);
  ScalarField u(grid);
  for (auto& v : u.values) v = U(rng);
  u.mark_edge_boundary();
  const double t = 0.07, r = 0.3;
  Stencil st = build_stencil(H, grid, t, r);
  st.symmetric_clip = true;
  auto s = solver_sweep(st, u, 1.0);
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u.boundary[i]) {
      CHECK(s[i] == u[i]);
      continue;
    }
    CHECK(s[i] == doctest::Approx(brute_sweep_at(H, u, i, t, st.radius)).epsilon(1e-9));
  }
}

TEST_CASE("dyadic affine field is an exact fixed point of one sweep") {
  auto grid = Grid::square(17, 17, 0, 1, 0, 1);
  auto u = edge_data(grid, [](double x, double y) { return 0.25 * x - 0.5 * y; });
  for (double m : {1.0, 2.0}) {
    auto H = HamiltonianModel::power(2, m);
    Stencil st = build_stencil(H, grid, 0.1, 0.4);
    st.symmetric_clip = true;
    auto s = solver_sweep(st, u, 1.0);
    CHECK(max_diff(s, u) == 0.0);
  }
}

TEST_CASE("sweep is monotone and keeps the boundary") {
  auto H = HamiltonianModel::power(2, 2.0);
  auto grid = Grid::square(13, 13, 0, 1, 0, 1);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0, 1);
  Stencil st = build_stencil(H, grid, 0.08, 0.35);
  st.symmetric_clip = true;
  for (int trial = 0; trial < 10; ++trial) {
    ScalarField u(grid), v(grid);
    u.mark_edge_boundary();
    v.boundary = u.boundary;
    for (std::size_t i = 0; i < u.size(); ++i) {
      u[i] = U(rng);
      v[i] = u.boundary[i] ? u[i] : u[i] + U(rng);
    }
    for (double lam : {1.0, 0.5}) {
      auto su = solver_sweep(st, u, lam), sv = solver_sweep(st, v, lam);
      for (std::size_t i = 0; i < u.size(); ++i) {
        CHECK(su[i] <= sv[i]);
        if (u.boundary[i]) CHECK(su[i] == u[i]);
      }
    }
  }
}

TEST_CASE("output obeys the discrete maximum principle and three inits agree") {
  auto H = HamiltonianModel::power(2, 2.0);
  auto prof = coercivity_profile(H);
  auto g = edge_data(Grid::square(17, 17, 0, 1, 0, 1), [](double x, double y) {
    return x + 0.3 * std::sin(4 * y) + 0.5 * x * x;
  });
  double gmin = 1e300, gmax = -1e300;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g.boundary[i]) gmin = std::min(gmin, g[i]), gmax = std::max(gmax, g[i]);
  std::vector<ScalarField> outs;
  for (auto init : {InitMode::boundary_min, InitMode::boundary_max, InitMode::random}) {
    SolveConfig cfg;
    cfg.init = init;
    cfg.seed = 3;
    auto r = solve_dirichlet(H, prof, g, cfg);
    REQUIRE(r.report.converged);
    CHECK(r.report.residual < cfg.tolerance);
    CHECK(r.report.error_estimate < cfg.tolerance);
    for (double v : r.u.values) {
      CHECK(v >= gmin);
      CHECK(v <= gmax);
    }
    outs.push_back(r.u);
  }
  for (auto& a : outs)
    for (auto& b : outs) {
      CHECK(max_diff(a, b) <= 1e-7);
      CHECK(comparison_gap(a, b) <= 1e-7);
    }
}

TEST_CASE("min init increases monotonically toward the fixed point") {
  auto H = HamiltonianModel::power(1, 2.0);
  auto prof = coercivity_profile(H);
  auto g = edge_data(Grid::line(21, 0, 1), [](double x, double) { return x * x; });
  SolveConfig cfg;
  cfg.t = 0.1;
  cfg.max_iters = 5;
  cfg.final_check = false;
  auto r5 = solve_dirichlet(H, prof, g, cfg);
  cfg.max_iters = 6;
  auto r6 = solve_dirichlet(H, prof, g, cfg);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(r6.u[i] >= r5.u[i]);
  CHECK_FALSE(r5.report.converged);
  CHECK(r5.report.verdict == "not converged");
  CHECK(r5.report.history.size() == 5);
}

TEST_CASE("user init, damping and input errors") {
  auto H = HamiltonianModel::power(1, 2.0);
  auto prof = coercivity_profile(H);
  auto g = edge_data(Grid::line(17, 0, 1), [](double x, double) { return std::sin(2 * x); });
  SolveConfig cfg;
  cfg.init = InitMode::user;
  CHECK_THROWS_AS(solve_dirichlet(H, prof, g, cfg), Error);
  cfg.user_init = ScalarField(g.grid, 0.3);
  cfg.damping = 0.5;
  auto r = solve_dirichlet(H, prof, g, cfg);
  CHECK(r.report.converged);
  SolveConfig base;
  auto r0 = solve_dirichlet(H, prof, g, base);
  CHECK(max_diff(r.u, r0.u) <= 1e-7);

  cfg.damping = 0.0;
  CHECK_THROWS_AS(solve_dirichlet(H, prof, g, cfg), Error);
  ScalarField nob = g;
  std::fill(nob.boundary.begin(), nob.boundary.end(), 0);
  CHECK_THROWS_AS(solve_dirichlet(H, prof, nob, base), Error);
  ScalarField bad = g;
  bad[0] = std::nan("");
  CHECK_THROWS_AS(solve_dirichlet(H, prof, bad, base), Error);
  SolveConfig big;
  big.t = 100;
  try {
    solve_dirichlet(H, prof, g, big);
    FAIL("expected locality error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::locality);
  }
}

TEST_CASE("comparison gap") {
  auto grid = Grid::square(9, 9, 0, 1, 0, 1);
  auto u = edge_data(grid, [](double x, double y) { return std::cos(3 * x) + y; });
  CHECK(comparison_gap(u, u) == 0.0);
  ScalarField v = u;
  for (auto& x : v.values) x += 2.5;
  CHECK(comparison_gap(u, v) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
  ScalarField bump = u;
  bump[grid.index(4, 4)] += 1.0;
  CHECK(comparison_gap(bump, u) == doctest::Approx(1.0));
  CHECK(comparison_gap(u, bump) <= 0.0);
  ScalarField other(Grid::square(9, 8, 0, 1, 0, 1));
  other.mark_edge_boundary();
  try {
    comparison_gap(u, other);
    FAIL("expected mismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::grid_mismatch);
  }
}

TEST_CASE("boundary distance") {
  auto grid = Grid::square(9, 9, 0, 1, 0, 1);
  ScalarField u(grid);
  u.mark_edge_boundary();
  auto d = boundary_distance(u);
  CHECK(d[grid.index(4, 4)] == doctest::Approx(0.5));
  CHECK(d[grid.index(1, 3)] == doctest::Approx(0.125));
  CHECK(d[grid.index(0, 3)] == 0.0);
}

TEST_CASE("stationary point search") {
  auto H = HamiltonianModel::power(2, 2.0);
  auto prof = coercivity_profile(H);
  auto grid = Grid::square(25, 25, 0, 1, 0, 1);
  const double r = 0.125, t = 0.005;

  SUBCASE("zero fields give the certificate") {
    ScalarField z(grid);
    z.mark_edge_boundary();
    auto res = stationary_point_search(H, prof, z, z, t, r, 1e-9);
    CHECK(res.outcome == StationaryOutcome::certificate);
  }
  SUBCASE("distinct affine fields give the certificate") {
    auto f = edge_data(grid, [](double x, double y) { return 0.5 * x + 0.2 * y; });
    auto g = edge_data(grid, [](double x, double y) { return -0.3 * x + 0.4 * y; });
    auto res = stationary_point_search(H, prof, f, g, t, r, 1e-9);
    CHECK(res.outcome == StationaryOutcome::certificate);
    // Oracle: f - g = 0.8x - 0.2y peaks where x is largest and y smallest.
    auto d = boundary_distance(f);
    auto p = grid.point(res.node);
    CHECK(d[res.node] >= r - 1e-12);
    CHECK(d[res.node] <= 2 * r + 1e-12);
    CHECK(res.max_annulus >= res.max_interior);
    CHECK(0.8 * p[0] - 0.2 * p[1] == doctest::Approx(0.8 * 0.875 - 0.2 * 0.125));
  }
  SUBCASE("a bump violates the flow-difference precondition") {
    auto f = edge_data(grid, [](double x, double y) {
      double q = (x - 0.5) * (x - 0.5) + (y - 0.5) * (y - 0.5);
      return std::exp(-q / 0.01);
    });
    ScalarField z(grid);
    z.mark_edge_boundary();
    try {
      stationary_point_search(H, prof, f, z, t, r, 1e-6);
      FAIL("expected precondition error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::precondition);
    }
  }
  SUBCASE("interior plateau of f-g returns a stationary x0") {
    // f = 0 and a shallow cone g with a flat floor deep inside: both flows move
    // g by at most t s^2 / 2, so the peak of f - g is flow-fixed.
    ScalarField f(grid);
    f.mark_edge_boundary();
    auto g = sample(grid, [](double x, double y) {
      return -1 + 0.02 * std::max(std::hypot(x - 0.5, y - 0.5) - 0.15, 0.0);
    });
    g.boundary = f.boundary;
    auto res = stationary_point_search(H, prof, f, g, t, r, 1e-3);
    CHECK(res.outcome == StationaryOutcome::stationary_point);
    auto d = boundary_distance(f);
    CHECK(d[res.node] > 2 * r);
  }
  SUBCASE("flow time beyond t_zero is rejected") {
    ScalarField z(grid);
    z.mark_edge_boundary();
    CHECK_THROWS_AS(stationary_point_search(H, prof, z, z, 10.0, r, 1e-9), Error);
  }
}
