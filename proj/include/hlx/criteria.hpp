#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "hlx/field.hpp"
#include "hlx/geometry.hpp"
#include "hlx/hamiltonian.hpp"
#include "hlx/hopflax.hpp"

namespace hlx {

struct CriteriaConfig {
  // Flow times. Empty: evenly spaced multiples of h starting at the first
  // multiple m h whose lattice defect per unit time is below `resolution`,
  // step max(1, m/2) h, cut below t_zero.
  std::vector<double> ladder;
  int ladder_points = 8;
  double resolution = 0.05;
  // Locality radius fed to t_zero; 0 means the grid diameter.
  double ladder_radius = 0.0;

  double base_tol = 1e-9;
  double defect_factor = 2.0;  // scales the lattice defect into the convexity tolerance
  double usc_tol = 0.0;        // added to the S+ resolution in the usc surrogate
  double usc_slope = 0.0;      // modulus(h) slope; 0 uses A_R from lipschitz_from_cones

  std::vector<double> k_grid;           // empty: {0, 1/8, 1/4, 1/2, 1, 2}
  std::vector<int> sides{4, 8, 16};     // square side in cells; 1D intervals use the same
  double cone_tol = 1e-9;               // added to the half-cell sampling slack
  int cone_directions = 0;              // level-set sampling for C_k
};

struct Witness {
  std::string kind;
  std::size_t node = 0;
  double t_a = 0.0, t_b = 0.0;  // ladder pair, convexity witnesses
  double k = 0.0;               // cone witnesses
  std::array<int, 4> square{0, 0, 0, 0};  // i0 lo, i0 hi, i1 lo, i1 hi
  std::array<int, 2> vertex_cell{0, 0};  // lattice coordinates, may lie off the grid
  double amount = 0.0;
};

struct CriterionSection {
  std::string criterion;
  bool pass = true;
  double worst = 0.0;
  double tol = 0.0;
  std::size_t checked = 0;
  std::vector<Witness> witnesses;  // capped, worst first
  std::vector<std::uint8_t> node_pass;

  // criterion,verdict,worst_violation,witness
  std::string summary_line() const;
};

struct SPlusField {
  ScalarField value;
  std::vector<double> ladder;
  std::vector<double> defect;           // lattice defect per ladder time
  std::vector<ScalarField> flows;       // T^{t_i} u
  std::vector<std::uint8_t> valid;      // interior nodes whose flow maximiser never sits on the grid edge
  std::vector<std::uint8_t> approximate;
  std::vector<std::uint8_t> saturated;
  std::vector<int> prefix;              // ladder points in the longest convex prefix
  int min_prefix = 2;                   // per-node pass needs half the ladder, at least two points
  std::vector<double> worst_triple;     // largest convexity violation over the full ladder
  std::vector<std::size_t> worst_index; // ladder index of that violation's centre
  double lipschitz = 0.0;
  double radius = 0.0;
  double resolution = 0.0;              // defect(t_1) / t_1
  std::string mode_note;
};

SPlusField s_plus(const HamiltonianModel& H, const CoercivityProfile& prof, const ScalarField& u,
                  const CriteriaConfig& cfg = {});

std::vector<double> default_ladder(const HamiltonianModel& H, const CoercivityProfile& prof,
                                   const ScalarField& u, const CriteriaConfig& cfg = {});

// Largest gap t H(p) - max_z (p.z - cost) over sampled |p| <= K.
double lattice_defect(const HamiltonianModel& H, const Stencil& st, const Grid& g, double K);

// V empty: every valid node.
CriterionSection check_convexity_criterion(const SPlusField& sp,
                                           const std::vector<std::uint8_t>& V = {});
CriterionSection check_pointwise_criterion(const HamiltonianModel& H, const SPlusField& sp,
                                           const ScalarField& u, const CriteriaConfig& cfg = {});

CriterionSection check_cone_comparison_above(const HamiltonianModel& H, const ScalarField& u,
                                             const CriteriaConfig& cfg = {});
CriterionSection check_cone_comparison_below(const HamiltonianModel& H, const ScalarField& u,
                                             const CriteriaConfig& cfg = {});

struct LipschitzFromCones {
  double k = 0.0;
  double M_k = 0.0;
  double A_R = 0.0;
};
// Table: k = 0 then 2^(j/4) for j in [-64, 64].
LipschitzFromCones lipschitz_from_cones(const HamiltonianModel& H, const ScalarField& u, double R);
std::vector<double> cone_k_table();

struct GradientConeReport {
  double k = 0.0;
  bool chord_holds = true;      // u(x) - u(y) <= C_k(x - y)
  double chord_worst = 0.0;
  std::size_t chord_x = 0, chord_y = 0;
  bool gradient_holds = true;   // upwind H(Du) <= k + C h, a.e. surrogate
  double gradient_worst = 0.0;
  std::size_t gradient_node = 0;
  double violating_fraction = 0.0;
  bool agree = true;
};

struct GradientConeOptions {
  double chord_cap = 0.0;  // 0: a quarter of the diameter
  double slope_c = 2.0;    // C in k + C h, scaled by max(1, K_k^2)
  double fraction = 0.0;   // allowed violating fraction; 0 picks 4 h / diameter
  double tol = 1e-9;
};

GradientConeReport gradient_cone_equivalence(const HamiltonianModel& H, const ScalarField& u,
                                             double k, const GradientConeOptions& opt = {});

struct SlopeCheck {
  bool pass = true;
  double slope = 0.0;
  std::size_t argmax = 0;
  double splus_at_argmax = 0.0;
  double tol = 0.0;
};

// Flow at (node, ladder index) against S+ at the flow argmax.
SlopeCheck increasing_slope_check(const HamiltonianModel& H, const ScalarField& u,
                                  const SPlusField& sp, std::size_t node, std::size_t ladder_index,
                                  double tol = 0.0);

struct EquivalenceReport {
  CriterionSection cone, convexity, pointwise;
  SPlusField splus;
  bool agree = true;
  std::string verdict;  // "pass", "fail" or "disagree"
};

EquivalenceReport check_equivalences(const HamiltonianModel& H, const CoercivityProfile& prof,
                                     const ScalarField& u, const CriteriaConfig& cfg = {});

void write_splus_csv(const std::string& path, const SPlusField& sp);

}  // namespace hlx
