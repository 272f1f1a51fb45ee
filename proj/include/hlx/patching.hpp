#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hlx/criteria.hpp"
#include "hlx/field.hpp"
#include "hlx/hamiltonian.hpp"

namespace hlx {

struct PatchClaims {
  // 1: u_gamma <= u, equality on the boundary mask
  bool below = true, boundary_equal = true;
  double below_worst = 0.0;
  // 2: v(x) - v(y) <= C_gamma(x - y) on short in-closure segments
  bool cone_bound = true;
  double cone_worst = 0.0, cone_tol = 0.0;
  std::size_t cone_pairs = 0;
  // 3: (T^t u_gamma - u_gamma)/t = gamma on V nodes whose stencil stays in the closure
  bool flow_identity = true;
  double flow_identity_worst = 0.0;
  std::size_t flow_identity_nodes = 0;
  // 4: T^t u_gamma = T^t u off V
  bool flow_equal = true;
  double flow_equal_worst = 0.0;
  // 3-4: S+ u_gamma >= gamma - tol on valid nodes; 5: pointwise criterion
  bool slope = true;
  double splus_min = 0.0;
  bool pointwise = true;
  double t = 0.0, tol = 0.0;
  bool verified = false;

  bool all() const {
    return below && boundary_equal && cone_bound && flow_identity && flow_equal && slope && pointwise;
  }
  std::string summary_line(double gamma) const;
};

struct PatchOptions {
  CriteriaConfig criteria;
  bool require_pointwise = true;  // precondition check on u
  bool verify = true;
  double tol = 0.0;     // slope tolerance for claims 3-4; 0 means 5h
  double flow_t = 0.0;  // 0: first ladder time of u
  int segment_cells = 2;
  int step_reach = 2;  // path steps: primitive offsets up to this max-norm, 1 = 8 neighbours
  // V: S+ + margin < gamma on valid nodes, upwind H(Du) < gamma elsewhere.
  // Negative margin uses the S+ resolution.
  double margin = -1.0;
};

struct PatchResult {
  double gamma = 0.0;
  ScalarField u_gamma, v_gamma;  // v_gamma is -inf off the closure
  std::vector<std::uint8_t> V, closure, dV;
  std::size_t components = 0;
  double margin = 0.0;
  double max_change = 0.0;
  PatchClaims claims;
};

// splus: S+ of u, reused across gamma values; computed when null.
PatchResult patch(const HamiltonianModel& H, const CoercivityProfile& prof, const ScalarField& u,
                  double gamma, const PatchOptions& opt = {}, const SPlusField* splus = nullptr);

// Largest k with C_k(q), C_k(-q) <= eps / (2 diam), q orthogonal to the zero set of H.
double prepatch_bound(const HamiltonianModel& H, double diam, double eps);
// Smallest eps whose prepatch_bound reaches k.
double prepatch_eps(const HamiltonianModel& H, double diam, double k);

void write_patch(const std::string& prefix, const PatchResult& r);

}  // namespace hlx
