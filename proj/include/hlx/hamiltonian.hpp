#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "hlx/field.hpp"

namespace hlx {

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 3, 1>;

enum class HamKind { quadratic_form, power, sampled_norm, table };

struct Box {
  Vec lo, hi;
  bool contains(const Vec& p) const;
};

class HamiltonianModel {
 public:
  // H(p) = 1/2 |A p|^2 with A invertible.
  static HamiltonianModel quadratic(const Eigen::MatrixXd& A, double box_half = 4.0);
  // H(p) = |p|^m / m, m >= 1.
  static HamiltonianModel power(int dim, double m, double box_half = 4.0);
  // H = gauge of the convex hull of the given unit-ball points (1D or 2D).
  static HamiltonianModel sampled_norm(const std::vector<Vec>& ball, double box_half = 4.0);
  // H given by node values on a 1D/2D box grid; multilinear between nodes.
  static HamiltonianModel table(const ScalarField& values);

  double operator()(const Vec& p) const;
  double lagrangian(const Vec& q) const;

  int dim() const { return dim_; }
  HamKind kind() const { return kind_; }
  std::string describe() const;
  const Box& box() const { return box_; }
  double box_half() const;

  // Analytic subgradient cloud at p (a single gradient at smooth points,
  // a sampled face otherwise). Table kind returns an empty cloud.
  std::vector<Vec> subgradients(const Vec& p, int samples = 64) const;

  const Eigen::MatrixXd& matrix() const { return A_; }
  double exponent() const { return m_; }
  const ScalarField& table_values() const { return table_; }
  const std::vector<Vec>& vertices() const { return verts_; }
  const std::vector<Vec>& facet_normals() const { return normals_; }

 private:
  HamKind kind_ = HamKind::power;
  int dim_ = 1;
  Box box_;
  Eigen::MatrixXd A_, AinvT_;
  double m_ = 2.0;
  std::vector<Vec> verts_, normals_;
  ScalarField table_;
  double table_R0_ = 0.0, table_k0_ = 0.0;

  double table_eval(const Vec& p) const;
  double table_lagrangian(const Vec& q) const;
};

struct ValidationWitness {
  Vec point;
  double violation = 0.0;
};

struct ValidationCheck {
  std::string name;
  bool pass = true;
  std::vector<ValidationWitness> witnesses;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  double tol = 0.0;
  double step = 0.0;
  bool pass() const;
  const ValidationCheck& check(const std::string& name) const;
};

struct ValidationOptions {
  int nodes_per_axis = 0;  // 0 picks 257 / 65 / 17 for dims 1 / 2 / 3
  int random_pairs = 2000;
  int rays = 64;
  std::uint64_t seed = 1;
};

// Checks names: "convexity", "minimum", "zero set bounded", "empty interior", "ray monotone".
ValidationReport validate_hamiltonian(const HamiltonianModel& H, double tol,
                                      const ValidationOptions& opt = {});

struct CoercivityProfile {
  double R0 = 0.0;
  double k0 = 0.0;
  std::vector<double> radii;  // geometric table s_j
  std::vector<double> M;      // nondecreasing; kInf once L is +inf on the whole sphere

  double M_at(double r) const;
  // Smallest tabulated radius a with L(z) > K|z| for |z| > a.
  double lipschitz_reach(double K) const;
};

struct ProfileOptions {
  int directions = 0;  // 0 picks a per-kind default
  double s_min = 1e-4;
  double s_max = 1e6;
  double ratio = 1.01;
};

// Unit directions used for ray sampling: {-1,+1}, n equally spaced angles, or a Fibonacci sphere.
std::vector<Vec> sphere_directions(int dim, int n);

CoercivityProfile coercivity_profile(const HamiltonianModel& H, const ProfileOptions& opt = {});

double t_zero(double alpha, double r, const CoercivityProfile& prof);

// Smallest r (up to bisection resolution) with t < t_zero(alpha, r).
double locality_radius(double alpha, double t, const CoercivityProfile& prof);

enum class LegendreMode { fast, brute };

// Conjugate f*(s) = max_x (s.x - f(x)) of a 1D/2D sampled table onto a dual grid.
// Entries >= kInf mark points outside the effective domain.
ScalarField legendre_transform(const ScalarField& f, const Grid& dual,
                               LegendreMode mode = LegendreMode::fast);

ScalarField sample_hamiltonian(const HamiltonianModel& H, const Grid& g);

}  // namespace hlx
