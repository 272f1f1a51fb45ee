#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hlx/error.hpp"
#include "hlx/extreal.hpp"
#include "hlx/hamiltonian.hpp"

using namespace hlx;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

HamiltonianModel half_square(int dim = 2) { return HamiltonianModel::power(dim, 2.0); }
HamiltonianModel euclid(int dim = 2) { return HamiltonianModel::power(dim, 1.0); }

ScalarField table_of(double (*f)(double, double), int n, double half) {
  Grid g = Grid::square(n, n, -half, half, -half, half);
  return sample(g, f);
}

}  // namespace

TEST_CASE("validation passes for the half-square Hamiltonian") {
  auto rep = validate_hamiltonian(half_square(), 1e-9);
  CHECK(rep.pass());
  CHECK(rep.checks.size() == 5);
}

TEST_CASE("validation flags an unbounded zero set with a witness on the p2 axis") {
  auto H = HamiltonianModel::table(table_of([](double a, double) { return std::abs(a); }, 65, 4));
  auto rep = validate_hamiltonian(H, 1e-9);
  const auto& c = rep.check("zero set bounded");
  REQUIRE_FALSE(c.pass);
  REQUIRE_FALSE(c.witnesses.empty());
  CHECK(c.witnesses.front().point[0] == 0.0);
  CHECK(std::abs(c.witnesses.front().point[1]) == 4.0);
  CHECK(rep.check("convexity").pass);
}

TEST_CASE("validation flags a zero set with interior") {
  auto H = HamiltonianModel::table(
      table_of([](double a, double b) { return std::max(std::hypot(a, b) - 1.0, 0.0); }, 65, 4));
  auto rep = validate_hamiltonian(H, 1e-9);
  const auto& c = rep.check("empty interior");
  REQUIRE_FALSE(c.pass);
  CHECK(c.witnesses.front().point.norm() < 1.0);
  CHECK(rep.check("zero set bounded").pass);
}

TEST_CASE("validation flags nonconvex and negative samples") {
  auto H = HamiltonianModel::table(
      table_of([](double a, double b) { return std::sqrt(std::hypot(a, b)); }, 65, 4));
  CHECK_FALSE(validate_hamiltonian(H, 1e-9).check("convexity").pass);
  auto Hn = HamiltonianModel::table(
      table_of([](double a, double b) { return 0.5 * (a * a + b * b) - 0.1; }, 33, 2));
  CHECK_FALSE(validate_hamiltonian(Hn, 1e-9).check("minimum").pass);
}

TEST_CASE("validation input errors") {
  CHECK_THROWS_AS(validate_hamiltonian(half_square(), 0.0), Error);
  Grid g = Grid::square(9, 9, 1, 2, 1, 2);
  auto H = HamiltonianModel::table(sample(g, [](double a, double b) { return a + b; }));
  CHECK_THROWS_AS(validate_hamiltonian(H, 1e-9), Error);
}

TEST_CASE("closed-form Lagrangians") {
  auto H = half_square();
  CHECK(H.lagrangian(v2(0.3, -1.2)) == doctest::Approx(0.5 * (0.09 + 1.44)));
  auto N = euclid();
  CHECK(N.lagrangian(v2(0.3, 0.4)) == 0.0);
  CHECK(is_inf(N.lagrangian(v2(2.0, 0.0))));
  auto P = HamiltonianModel::power(1, 3.0);
  // m = 3 conjugates to |q|^{3/2} / (3/2)
  CHECK(P.lagrangian(Vec::Constant(1, 4.0)) == doctest::Approx(8.0 / 1.5));
  Eigen::MatrixXd A(2, 2);
  A << 1, 0, 0, 2;
  auto Q = HamiltonianModel::quadratic(A);
  CHECK(Q(v2(1, 1)) == doctest::Approx(0.5 * (1 + 4)));
  CHECK(Q.lagrangian(v2(1, 4)) == doctest::Approx(0.5 * (1 + 4)));
  for (const auto* h : {&H, &N, &P, &Q}) CHECK(h->lagrangian(Vec::Zero(h->dim())) == 0.0);
}

TEST_CASE("Lagrangian matches a brute-force sup for analytic families") {
  Eigen::MatrixXd A(2, 2);
  A << 1, 0.3, 0, 2;
  auto Q = HamiltonianModel::quadratic(A);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-1, 1);
  for (int k = 0; k < 10; ++k) {
    Vec q = v2(U(rng), U(rng));
    double best = -1e300;
    for (int i = -400; i <= 400; ++i)
      for (int j = -400; j <= 400; ++j) {
        Vec p = v2(i / 100.0, j / 100.0);
        best = std::max(best, p.dot(q) - Q(p));
      }
    CHECK(Q.lagrangian(q) == doctest::Approx(best).epsilon(1e-3));
  }
}

TEST_CASE("sampled norm is a polygon gauge with an indicator conjugate") {
  std::vector<Vec> ball{v2(1, 0), v2(0, 1), v2(-1, 0), v2(0, -1), v2(0.2, 0.2)};
  auto N = HamiltonianModel::sampled_norm(ball);
  CHECK(N(v2(1, 1)) == doctest::Approx(2.0));
  CHECK(N(v2(-3, 0)) == doctest::Approx(3.0));
  CHECK(N.facet_normals().size() == 4);
  CHECK(N.lagrangian(v2(1, 1)) == 0.0);
  CHECK(is_inf(N.lagrangian(v2(1.1, 0))));
  CHECK(validate_hamiltonian(N, 1e-9).pass());
  CHECK_THROWS_AS(HamiltonianModel::sampled_norm({v2(1, 0), v2(2, 1), v2(1, 2)}), Error);
}

TEST_CASE("table Lagrangian: support radius inside, sentinel at the box edge") {
  auto T = HamiltonianModel::table(
      table_of([](double a, double b) { return 0.5 * (a * a + b * b); }, 129, 2));
  CHECK(T.lagrangian(v2(0.5, 0.25)) == doctest::Approx(0.5 * (0.25 + 0.0625)).epsilon(1e-6));
  CHECK(T.lagrangian(v2(1.9, 0.0)) == doctest::Approx(0.5 * 1.9 * 1.9).epsilon(1e-4));
  CHECK(is_inf(T.lagrangian(v2(2.5, 0.0))));
  CHECK(T.lagrangian(v2(0, 0)) == 0.0);
}

TEST_CASE("coercivity profile of the half-square Hamiltonian: M(r) = r/2") {
  auto prof = coercivity_profile(half_square());
  CHECK(prof.k0 > 0);
  CHECK(prof.R0 > 0);
  for (std::size_t j = 0; j < prof.radii.size(); j += 97)
    CHECK(prof.M[j] == doctest::Approx(prof.radii[j] / 2).epsilon(1e-12));
  for (std::size_t j = 1; j < prof.M.size(); ++j) CHECK(prof.M[j] >= prof.M[j - 1]);
  // independent oracle: a_K with M(s) = s/2 is the first table radius beyond 2K
  double a = prof.lipschitz_reach(1.5);
  CHECK(a > 3.0);
  CHECK(a < 3.0 * 1.011);
}

TEST_CASE("coercivity profile of the Euclidean norm: 0 then the sentinel") {
  auto prof = coercivity_profile(euclid());
  for (std::size_t j = 0; j + 1 < prof.radii.size(); ++j) {
    if (prof.radii[j] <= 1.0) CHECK(prof.M[j] == 0.0);
  }
  CHECK(is_inf(prof.M.back()));
  CHECK(prof.radii.back() > 1.0);
  CHECK(prof.radii.back() < 1.011);
}

TEST_CASE("k0 is positive for every R0 when the zero set is the origin") {
  for (auto H : {half_square(), euclid(), HamiltonianModel::power(3, 2.5)}) {
    auto prof = coercivity_profile(H);
    CHECK(prof.k0 > 0);
  }
}

TEST_CASE("t_zero inverts M conservatively") {
  auto prof = coercivity_profile(half_square());
  for (double alpha : {0.0, 0.5, 2.0})
    for (double r : {0.1, 0.5, 1.0}) {
      double t0 = t_zero(alpha, r, prof);
      double exact = r * r / (2 * (alpha + r));
      CHECK(t0 <= exact);
      CHECK(t0 >= exact / 1.011);
      CHECK(prof.M_at(r / t0) > alpha / r + 1);
    }
  auto pn = coercivity_profile(euclid());
  double t0 = t_zero(3.0, 0.5, pn);
  CHECK(t0 < 0.5);
  CHECK(t0 > 0.5 / 1.011);
  CHECK_THROWS_AS(t_zero(-1, 1, prof), Error);
  CoercivityProfile tiny;
  tiny.radii = {1.0};
  tiny.M = {0.5};
  CHECK_THROWS_AS(t_zero(1.0, 1.0, tiny), Error);
}

TEST_CASE("locality radius is the inverse of t_zero in r") {
  auto prof = coercivity_profile(half_square());
  double r = locality_radius(1.0, 0.05, prof);
  CHECK(0.05 < t_zero(1.0, r, prof));
  CHECK_FALSE(0.05 < t_zero(1.0, r * 0.99, prof));
}

TEST_CASE("Lagrangian dominates M(|q|)|q| and is midpoint convex") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-3, 3);
  Eigen::MatrixXd A(2, 2);
  A << 1, 0, 0, 2;
  for (auto H : {half_square(), HamiltonianModel::quadratic(A), HamiltonianModel::power(2, 4.0)}) {
    auto prof = coercivity_profile(H);
    for (int k = 0; k < 200; ++k) {
      Vec q = v2(U(rng), U(rng)), q2 = v2(U(rng), U(rng));
      CHECK(H.lagrangian(q) >= prof.M_at(q.norm()) * q.norm() - 1e-12);
      double mid = H.lagrangian(0.5 * (q + q2));
      CHECK(mid <= 0.5 * (H.lagrangian(q) + H.lagrangian(q2)) + 1e-12);
    }
  }
}

TEST_CASE("analytic subgradients") {
  auto H = half_square();
  auto g = H.subgradients(v2(0.3, -0.2));
  REQUIRE(g.size() == 1);
  CHECK(g[0][0] == doctest::Approx(0.3));
  auto N = euclid();
  auto ball = N.subgradients(v2(0, 0));
  CHECK(ball.size() > 10);
  for (const auto& q : ball) CHECK(q.norm() <= 1.0 + 1e-12);
}
