#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hlx/field.hpp"
#include "hlx/hamiltonian.hpp"

namespace hlx {

struct ConeData {
  double k = 0.0;
  std::vector<Vec> level_set;
  double M_k = 0.0, K_k = 0.0;
  double level_tol = 0.0;

  // C_k(x) = max over the sampled level set of p.x
  double value(const Vec& x) const;
  double value(double x0, double x1) const;
};

struct ConeOptions {
  int directions = 0;  // 0 picks 2 / 1024 / 2048 for dims 1 / 2 / 3
  double level_tol = 1e-12;
};

ConeData cone_data(const HamiltonianModel& H, double k, const ConeOptions& opt = {});
double cone_value(const HamiltonianModel& H, double k, const Vec& x);
// C_k(x) by direct maximisation over the level set; 1D and 2D.
double support_value(const HamiltonianModel& H, double k, const Vec& x);
std::pair<double, double> cone_constants(const HamiltonianModel& H, double k);

struct SubdiffOptions {
  int dual_nodes = 0;    // per axis; 0 picks 401 / 81 / 21
  int primal_nodes = 0;  // per axis; 0 picks 257 / 41 / 13
  double dual_half = 0;  // 0 derives the dual box from the Lipschitz bound of H
};

std::vector<Vec> subdifferential(const HamiltonianModel& H, const Vec& p, double tol,
                                 const SubdiffOptions& opt = {});

struct SubdiffSets {
  double k = 0.0;
  std::vector<Vec> gamma_k;
  ScalarField w_k, n_k;
  double dual_step = 0.0;
  double level_tol = 0.0;
  std::vector<std::string> warnings;
};

struct GammaOptions {
  int dual_nodes = 0;  // per axis; 0 picks 401 / 81
  int directions = 0;
  double ray_eps = 1e-6;
};

// 1D and 2D only: indicator grids live on the dual grid.
SubdiffSets gamma_w_n(const HamiltonianModel& H, double k, const GammaOptions& opt = {});

void write_points_csv(const std::string& path, const std::vector<Vec>& pts);

}  // namespace hlx
