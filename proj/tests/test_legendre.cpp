#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "hlx/error.hpp"
#include "hlx/extreal.hpp"
#include "hlx/hamiltonian.hpp"
#include "hlx/simd.hpp"

using namespace hlx;

namespace {

// Independent oracle: plain double loop over every primal node.
double brute_conj(const ScalarField& f, double s) {
  double best = -1e308;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (is_inf(f.values[i])) continue;
    best = std::max(best, s * f.grid.point(i)[0] - f.values[i]);
  }
  return best;
}

bool bit_equal(const ScalarField& a, const ScalarField& b) {
  return a.values.size() == b.values.size() &&
         std::memcmp(a.values.data(), b.values.data(), a.values.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("conjugate of x^2/2 on [-2,2] with 257 nodes") {
  Grid g = Grid::line(257, -2, 2);
  ScalarField f = sample(g, [](double x, double) { return 0.5 * x * x; });
  ScalarField c = legendre_transform(f, g);
  const double h = g.h[0];
  for (std::size_t j = 0; j < g.size(); ++j) {
    double s = g.point(j)[0];
    if (std::abs(s) > 1.9) continue;
    CHECK(std::abs(c.values[j] - 0.5 * s * s) <= h);
    CHECK(c.values[j] == doctest::Approx(brute_conj(f, s)).epsilon(1e-15));
  }
  // slopes beyond the edge secant are decided outside the window
  CHECK(is_inf(c.values.back()));
  CHECK(is_inf(c.values.front()));
}

TEST_CASE("conjugate of an affine table is 0 at its slope and +inf elsewhere") {
  Grid g = Grid::line(65, -1, 1);
  const double a = 0.25;
  ScalarField f = sample(g, [a](double x, double) { return a * x; });
  ScalarField c = legendre_transform(f, g);
  for (std::size_t j = 0; j < g.size(); ++j) {
    double s = g.point(j)[0];
    if (s == a) CHECK(std::abs(c.values[j]) <= 1e-15);
    else CHECK(is_inf(c.values[j]));
  }
}

TEST_CASE("biconjugate reproduces sampled convex tables") {
  Grid g = Grid::line(513, -2, 2);
  for (auto fn : {+[](double x) { return 0.5 * x * x; }, +[](double x) { return std::abs(x); },
                  +[](double x) { return std::pow(std::abs(x), 3) / 3; }}) {
    ScalarField f = sample(g, [fn](double x, double) { return fn(x); });
    ScalarField dual_grid_field(Grid::line(1025, -4.5, 4.5));
    ScalarField c = legendre_transform(f, dual_grid_field.grid);
    ScalarField cc = legendre_transform(c, g);
    for (std::size_t i = 0; i < g.size(); ++i) {
      double x = g.point(i)[0];
      if (std::abs(x) > 1.5) continue;
      CHECK(std::abs(cc.values[i] - f.values[i]) <= 3 * g.h[0]);
    }
  }
}

TEST_CASE("fast transform equals the brute-force mode bit for bit") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(0.1, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    int n = 17 + trial * 13;
    Grid g = Grid::line(n, -1.5, 1.5);
    double a = U(rng), b = U(rng), c0 = U(rng);
    ScalarField f = sample(g, [&](double x, double) {
      return a * x * x + b * std::abs(x - 0.3) + c0 * std::exp(x) / 7.0;
    });
    if (trial % 3 == 0)
      for (std::size_t i = 0; i < g.size() / 5; ++i) f.values[i] = kInf;
    Grid dual = Grid::line(2 * n + 1, -6, 6);
    auto fast = legendre_transform(f, dual, LegendreMode::fast);
    auto brute = legendre_transform(f, dual, LegendreMode::brute);
    CHECK(bit_equal(fast, brute));
    for (std::size_t j = 0; j < dual.size(); j += 7)
      if (!is_inf(brute.values[j])) CHECK(brute.values[j] == brute_conj(f, dual.point(j)[0]));
  }
}

TEST_CASE("fast equals brute on collinear data with exact ties") {
  Grid g = Grid::line(101, -1, 1);
  ScalarField f = sample(g, [](double x, double) { return 0.3 * x + 0.1; });
  for (auto be : {simd::Backend::scalar, simd::Backend::avx2}) {
    simd::force(be);
    CHECK(bit_equal(legendre_transform(f, g, LegendreMode::fast),
                    legendre_transform(f, g, LegendreMode::brute)));
  }
  simd::force(std::nullopt);
}

TEST_CASE("2D separable conjugate of the anisotropic quadratic") {
  Grid g = Grid::square(129, 129, -2, 2, -2, 2);
  ScalarField f = sample(g, [](double a, double b) { return 0.5 * (a * a + 4 * b * b); });
  Grid dual = Grid::square(65, 65, -1.5, 1.5, -3, 3);
  auto c = legendre_transform(f, dual);
  auto cb = legendre_transform(f, dual, LegendreMode::brute);
  CHECK(bit_equal(c, cb));
  for (std::size_t j = 0; j < dual.size(); ++j) {
    auto s = dual.point(j);
    double exact = 0.5 * (s[0] * s[0] + s[1] * s[1] / 4);
    CHECK(std::abs(c.values[j] - exact) <= 2 * g.hmax());
  }
  // 2D brute oracle directly over all pairs
  for (std::size_t j = 0; j < dual.size(); j += 101) {
    auto s = dual.point(j);
    double best = -1e308;
    for (std::size_t i = 0; i < g.size(); ++i) {
      auto p = g.point(i);
      best = std::max(best, s[0] * p[0] + s[1] * p[1] - f.values[i]);
    }
    CHECK(c.values[j] == doctest::Approx(best).epsilon(1e-14));
  }
}

TEST_CASE("empty effective domain is an input error") {
  Grid g = Grid::line(9, -1, 1);
  ScalarField f(g, kInf);
  CHECK_THROWS_AS(legendre_transform(f, g), Error);
}
