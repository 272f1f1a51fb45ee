#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hlx/field.hpp"
#include "hlx/hamiltonian.hpp"

namespace hlx {

enum class Truncation {
  oscillation,  // radius from inverting t_zero at the field oscillation
  lipschitz,    // radius a_K * t, valid for K-Lipschitz fields
  full,         // caller-chosen radius, no locality claim
};

struct FlowParams {
  const HamiltonianModel* H = nullptr;
  double t = 0.0;
  double radius = 0.0;
  Truncation truncation = Truncation::full;
  double bound = 0.0;         // oscillation alpha or Lipschitz K
  bool include_edge = false;  // grid-edge nodes count as designated boundary
  bool verify = true;         // check the truncation claim against the input field

  static FlowParams from_oscillation(const HamiltonianModel& H, const CoercivityProfile& prof,
                                     double osc, double t);
  static FlowParams from_lipschitz(const HamiltonianModel& H, const CoercivityProfile& prof,
                                   double K, double t);
  static FlowParams with_radius(const HamiltonianModel& H, double t, double radius);
};

// Offsets sorted lexicographically, so scanning them visits source nodes in
// increasing index order.
struct Stencil {
  std::vector<int> d0, d1;
  std::vector<double> up;    // t L((y-x)/t), kInf where excluded
  std::vector<double> down;  // t L((x-y)/t)
  double radius = 0.0;
  double t = 0.0;
  int reach0 = 0, reach1 = 0;
  // Near the grid edge keep offset z only when x+z and x-z are both nodes.
  bool symmetric_clip = false;
  std::size_t size() const { return d0.size(); }
};

// Costs are rounded up onto the dyadic lattice 2^-36 so lattice-valued fields
// stay on the lattice through the flows.
inline constexpr double kLatticeScale = 68719476736.0;  // 2^36
double lattice_ceil(double x);
double lattice_round(double x);

Stencil build_stencil(const HamiltonianModel& H, const Grid& g, double t, double radius);

// Directed rounding: the max-flow rounds up, the min-flow rounds down.
void apply_up(const Stencil& st, const ScalarField& u, ScalarField& out);
void apply_down(const Stencil& st, const ScalarField& u, ScalarField& out);

struct ArgFlow {
  double value = 0.0;
  std::size_t arg = 0;
};
ArgFlow apply_up_at(const Stencil& st, const ScalarField& u, std::size_t node);
ArgFlow apply_down_at(const Stencil& st, const ScalarField& u, std::size_t node);

// Nodes whose stencil ball stays inside the grid box (all nodes with include_edge).
std::vector<std::uint8_t> valid_mask(const Grid& g, double radius, bool include_edge);

ScalarField flow_up(const ScalarField& u, const FlowParams& fp);
ScalarField flow_down(const ScalarField& u, const FlowParams& fp);

// Largest upward difference quotient (u(y)-u(x))/|y-x| over all node pairs.
double discrete_lipschitz(const ScalarField& u);

struct SemigroupDefect {
  ScalarField defect;
  std::vector<std::uint8_t> valid;
  double max_defect = 0.0;
};

SemigroupDefect semigroup_defect(const HamiltonianModel& H, const CoercivityProfile& prof,
                                 const ScalarField& u, double t, double s);

struct LawViolation {
  std::string law;
  std::size_t node = 0;
  double amount = 0.0;
};

struct FlowLawReport {
  std::vector<LawViolation> violations;
  std::size_t nodes_checked = 0;
  bool commutation_checked = false;
  bool ok() const { return violations.empty(); }
};

// Checks the ordering chain, the sandwich, monotonicity against v >= u and
// commutation with the constant c. Commutation is only exact for fields on
// the 2^-36 lattice and is skipped otherwise.
FlowLawReport verify_flow_laws(const ScalarField& u, const FlowParams& fp,
                               const ScalarField* v = nullptr, double c = 5.0);

bool on_lattice(const ScalarField& u);

}  // namespace hlx
