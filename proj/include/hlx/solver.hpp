#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hlx/field.hpp"
#include "hlx/hamiltonian.hpp"
#include "hlx/hopflax.hpp"

namespace hlx {

enum class InitMode { boundary_min, boundary_max, random, user };

// residual: stop once the sweep residual drops below tolerance.
// contraction: additionally require residual * rho / (1 - rho) < tolerance,
// rho being the worst residual ratio over the recent history.
enum class StopRule { residual, contraction };

struct SolveConfig {
  double t = 0.0;  // 0 picks t_zero(osc g, diam) / 4
  double tolerance = 1e-8;
  int max_iters = 200000;
  InitMode init = InitMode::boundary_min;
  StopRule stop = StopRule::contraction;
  double damping = 1.0;
  std::uint64_t seed = 1;
  std::optional<ScalarField> user_init;
  // Stencil radius is a_K t with K = lipschitz_factor * Lip(boundary data).
  double lipschitz_factor = 1.5;
  double radius = 0.0;  // > 0 overrides the radius rule
  bool final_check = true;
  // Affine data stays an exact fixed point only with point-symmetric stencils.
  bool symmetric_clip = true;
};

struct ConvergenceReport {
  int iterations = 0;
  double residual = 0.0;
  double contraction = 0.0;     // estimated per-sweep rate
  double error_estimate = 0.0;  // residual * rho / (1 - rho)
  std::vector<double> history;
  bool converged = false;
  std::string verdict;
  double t = 0.0;
  double radius = 0.0;
  double full_residual = -1.0;  // residual against full-radius flows, when checked
  std::vector<std::string> warnings;
};

struct SolveResult {
  ScalarField u;
  ConvergenceReport report;
};

// g carries the boundary mask and boundary values; interior values of g are ignored.
SolveResult solve_dirichlet(const HamiltonianModel& H, const CoercivityProfile& prof,
                            const ScalarField& g, const SolveConfig& cfg);

// One sweep u <- (1-lambda) u + lambda (T^t u + T_t u)/2 on interior nodes.
ScalarField solver_sweep(const Stencil& st, const ScalarField& u, double lambda);

// max over interior of (u - v) minus max over the boundary mask of (u - v).
double comparison_gap(const ScalarField& u, const ScalarField& v);

enum class StationaryOutcome { certificate, stationary_point, unresolved };

struct StationaryResult {
  StationaryOutcome outcome = StationaryOutcome::unresolved;
  std::size_t node = 0;  // witness: a maximiser on the annulus, or x0
  double max_interior = 0.0;
  double max_annulus = 0.0;
  std::size_t e_size = 0, f_size = 0;
  std::string detail;
};

// Distance from every node to the nearest boundary-mask node.
std::vector<double> boundary_distance(const ScalarField& u);

StationaryResult stationary_point_search(const HamiltonianModel& H, const CoercivityProfile& prof,
                                         const ScalarField& f, const ScalarField& g, double t,
                                         double r, double tol);

}  // namespace hlx
