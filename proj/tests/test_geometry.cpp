#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hlx/error.hpp"
#include "hlx/geometry.hpp"

using namespace hlx;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("cones of the half-square and the Euclidean norm") {
  auto H = HamiltonianModel::power(2, 2.0);
  auto N = HamiltonianModel::power(2, 1.0);
  for (double k : {0.5, 1.0, 2.0}) {
    auto c = cone_data(H, k);
    auto cn = cone_data(N, k);
    for (const auto& x : {v2(1, 0), v2(0.3, -0.7), v2(-2, 1.5)}) {
      CHECK(c.value(x) == doctest::Approx(std::sqrt(2 * k) * x.norm()).epsilon(1e-5));
      CHECK(cn.value(x) == doctest::Approx(k * x.norm()).epsilon(1e-5));
    }
    CHECK(c.value(v2(0, 0)) == 0.0);
    CHECK(c.M_k == doctest::Approx(std::sqrt(2 * k)).epsilon(1e-5));
    CHECK(c.K_k == doctest::Approx(std::sqrt(2 * k)).epsilon(1e-5));
    for (const auto& p : c.level_set) CHECK(std::abs(H(p) - k) <= 1e-12 * k);
  }
  CHECK(cone_value(H, 0.0, v2(1, 1)) == 0.0);
}

TEST_CASE("cone constants of the anisotropic quadratic against a dense ellipse sample") {
  Eigen::MatrixXd A(2, 2);
  A << 1, 0, 0, 2;
  auto H = HamiltonianModel::quadratic(A);
  const double k = 0.7;
  auto [Mk, Kk] = cone_constants(H, k);
  // level set: p1^2 + 4 p2^2 = 2k, parametrised directly
  std::vector<Vec> ell;
  for (int i = 0; i < 20000; ++i) {
    double a = 2 * std::numbers::pi * i / 20000;
    ell.push_back(v2(std::sqrt(2 * k) * std::cos(a), std::sqrt(2 * k) / 2 * std::sin(a)));
  }
  double mn = 1e300, mx = -1e300;
  for (int i = 0; i < 10000; ++i) {
    double a = 2 * std::numbers::pi * i / 10000;
    Vec d = v2(std::cos(a), std::sin(a));
    double s = -1e300;
    for (const auto& p : ell) s = std::max(s, p.dot(d));
    mn = std::min(mn, s);
    mx = std::max(mx, s);
  }
  CHECK(Mk == doctest::Approx(mn).epsilon(1e-4));
  CHECK(Kk == doctest::Approx(mx).epsilon(1e-4));
  CHECK(Mk <= Kk);
}

TEST_CASE("cone homogeneity, subadditivity and strict growth in k") {
  Eigen::MatrixXd A(2, 2);
  A << 1, 0.4, 0, 1.5;
  auto H = HamiltonianModel::quadratic(A);
  auto c1 = cone_data(H, 0.5), c2 = cone_data(H, 0.8);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> U(-2, 2);
  for (int i = 0; i < 200; ++i) {
    Vec x = v2(U(rng), U(rng)), y = v2(U(rng), U(rng));
    double lam = std::abs(U(rng));
    CHECK(c1.value(lam * x) == doctest::Approx(lam * c1.value(x)).epsilon(1e-12));
    CHECK(c1.value(x + y) <= c1.value(x) + c1.value(y) + 1e-12);
    CHECK(c2.value(x) > c1.value(x));
  }
  double prev = 0;
  for (double k : {0.1, 0.5, 2.0, 8.0, 32.0}) {
    auto [Mk, Kk] = cone_constants(H, k);
    CHECK(Mk > prev);
    prev = Mk;
  }
}

TEST_CASE("subdifferential: gradient at smooth points, the ball at the norm's kink") {
  auto H = HamiltonianModel::power(2, 2.0);
  SubdiffOptions o;
  o.dual_nodes = 81;
  o.dual_half = 2.0;
  double h = 4.0 / 80;
  Vec p = v2(0.8, -0.4);
  auto q = subdifferential(H, p, 0.5 * h * h, o);
  REQUIRE_FALSE(q.empty());
  for (const auto& x : q) CHECK((x - p).norm() <= h + 1e-12);

  auto N = HamiltonianModel::power(2, 1.0);
  auto ball = subdifferential(N, v2(0, 0), 1e-9, o);
  std::size_t inside = 0;
  for (int i = 0; i < 81; ++i)
    for (int j = 0; j < 81; ++j) {
      double a = -2 + i * h, b = -2 + j * h;
      if (std::hypot(a, b) <= 1.0 - 1e-9) ++inside;
    }
  CHECK(ball.size() >= inside);
  CHECK(ball.size() <= inside + 16);
  for (const auto& x : ball) CHECK(x.norm() <= 1.0 + 1e-9);

  auto g = subdifferential(N, v2(0.6, 0.8), h * h, o);
  REQUIRE_FALSE(g.empty());
  for (const auto& x : g) CHECK((x - v2(0.6, 0.8)).norm() <= 2 * h);
}

TEST_CASE("Gamma_k, W_k, N_k for the half-square Hamiltonian") {
  auto H = HamiltonianModel::power(2, 2.0);
  const double k = 0.5;
  auto s = gamma_w_n(H, k);
  CHECK(s.warnings.empty());
  for (const auto& q : s.gamma_k) CHECK(q.norm() == doctest::Approx(std::sqrt(2 * k)).epsilon(1e-9));
  const Grid& g = s.n_k.grid;
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto p = g.point(i);
    double r = std::hypot(p[0], p[1]);
    if (r < std::sqrt(2 * k) - s.level_tol - 1e-9) CHECK(s.n_k.values[i] == 1.0);
    if (r > std::sqrt(2 * k) + 1e-5) CHECK(s.w_k.values[i] == 0.0);
    if (s.n_k.values[i] == 1.0) CHECK(s.w_k.values[i] == 1.0);
  }
  // the level-set sample through the brute-force subdifferential lands on the same sphere
  auto cone = cone_data(H, k, ConeOptions{16});
  SubdiffOptions o;
  o.dual_nodes = 81;
  o.dual_half = 2.0;
  for (const auto& p : cone.level_set)
    for (const auto& q : subdifferential(H, p, 0.0025, o))
      CHECK(std::abs(q.norm() - std::sqrt(2 * k)) <= 0.05 * std::sqrt(2.0));
}

TEST_CASE("Gamma_k, N_k for the Euclidean norm: unit sphere and open unit ball") {
  auto N = HamiltonianModel::power(2, 1.0);
  for (double k : {0.3, 2.0}) {
    auto s = gamma_w_n(N, k);
    CHECK(s.warnings.empty());
    for (const auto& q : s.gamma_k) CHECK(q.norm() == doctest::Approx(1.0));
    const Grid& g = s.n_k.grid;
    for (std::size_t i = 0; i < g.size(); ++i) {
      auto p = g.point(i);
      double r = std::hypot(p[0], p[1]);
      if (r < 1 - s.level_tol - 1e-9) CHECK(s.n_k.values[i] == 1.0);
      if (r > 1 + 1e-9) CHECK(s.w_k.values[i] == 0.0);
    }
  }
}

TEST_CASE("origin lies in N_k for every k > 0") {
  Eigen::MatrixXd A(2, 2);
  A << 1, 0, 0, 2;
  std::vector<Vec> ball{v2(1, 0), v2(0, 2), v2(-1, 0), v2(0, -0.5)};
  for (const auto& H : {HamiltonianModel::quadratic(A), HamiltonianModel::sampled_norm(ball),
                        HamiltonianModel::power(1, 3.0)})
    for (double k : {0.1, 1.0, 4.0}) {
      auto s = gamma_w_n(H, k);
      CHECK(s.warnings.empty());
    }
  CHECK_THROWS_AS(gamma_w_n(HamiltonianModel::power(2, 2.0), 0.0), Error);
}

TEST_CASE("direct support value against closed forms") {
  Eigen::MatrixXd A(2, 2);
  A << 1, 0.5, 0, 2;
  auto Hq = HamiltonianModel::quadratic(A);
  std::vector<Vec> ball{v2(1, 0), v2(0, 2), v2(-1, 0), v2(0, -0.5)};
  auto Hn = HamiltonianModel::sampled_norm(ball);
  auto H1 = HamiltonianModel::power(1, 3.0);
  for (double k : {0.05, 0.5, 2.0})
    for (double th = 0.1; th < 6.3; th += 0.7) {
      Vec x = v2(std::cos(th), std::sin(th)) * 1.7;
      Eigen::Vector2d y = A.transpose().inverse() * Eigen::Vector2d(x[0], x[1]);
      CHECK(support_value(Hq, k, x) == doctest::Approx(std::sqrt(2 * k) * y.norm()).epsilon(1e-10));
      double hv = -1e300;
      for (const auto& v : ball) hv = std::max(hv, v.dot(x));
      CHECK(support_value(Hn, k, x) == doctest::Approx(k * hv).epsilon(1e-10));
      // The sampled cone never exceeds the direct value.
      CHECK(cone_value(Hq, k, x) <= support_value(Hq, k, x) + 1e-12);
    }
  Vec x1(1);
  x1 << -0.8;
  CHECK(support_value(H1, 0.4, x1) == doctest::Approx(std::cbrt(1.2) * 0.8).epsilon(1e-12));
}
