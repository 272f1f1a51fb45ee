#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hlx/field.hpp"
#include "hlx/geometry.hpp"
#include "hlx/hamiltonian.hpp"

namespace hlx {

struct QuadraticFit {
  std::size_t node = 0;
  Vec x0;
  Vec grad;
  Eigen::MatrixXd hess;  // symmetric
  double rho = 0.0;
  double fit_residual = 0.0;  // max abs misfit over the ball
  std::size_t nodes_used = 0;
};

// Least squares phi = c + g.z + z'Mz/2 over nodes with |x - x0| <= rho.
QuadraticFit fit_quadratic(const ScalarField& u, std::size_t node, double rho);

struct AronssonResult {
  double residual = 0.0;  // max over omega in dH(Dphi) of omega' D2phi omega
  Vec omega;              // maximiser
  std::size_t subgradients = 0;
  std::optional<double> infinity_laplacian;  // Dphi' D2phi Dphi, quadratic family only
  QuadraticFit fit;
};

AronssonResult subsolution_residual(const HamiltonianModel& H, const ScalarField& u,
                                    std::size_t node, double rho, const SubdiffOptions& opt = {});

// Seeded sample of nodes whose fit ball stays inside the grid box.
std::vector<std::size_t> aronsson_sample_nodes(const ScalarField& u, double rho, std::size_t count,
                                               std::uint64_t seed);

std::vector<AronssonResult> aronsson_sweep(const HamiltonianModel& H, const ScalarField& u,
                                           const std::vector<std::size_t>& nodes, double rho);

// node,residual,grad_norm,fit_residual
void write_aronsson_csv(const std::string& path, const std::vector<AronssonResult>& rs);

}  // namespace hlx
