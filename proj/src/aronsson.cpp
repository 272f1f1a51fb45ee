#include "hlx/aronsson.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "hlx/error.hpp"
#include "hlx/extreal.hpp"
#include "hlx/parallel.hpp"

namespace hlx {

namespace {

bool ball_inside(const Grid& g, std::size_t node, double rho) {
  auto p = g.point(node);
  for (int a = 0; a < g.dims; ++a)
    if (p[a] - rho < g.lo(a) - 1e-12 * rho || p[a] + rho > g.hi(a) + 1e-12 * rho) return false;
  return true;
}

}  // namespace

QuadraticFit fit_quadratic(const ScalarField& u, std::size_t node, double rho) {
  const Grid& g = u.grid;
  if (node >= g.size()) throw Error(ErrorKind::input, "node out of range");
  if (!(rho > 0)) throw Error(ErrorKind::input, "fit radius must be positive");
  if (!ball_inside(g, node, rho)) throw Error(ErrorKind::input, "fit ball leaves the grid");
  const bool two = g.dims > 1;
  const int unknowns = two ? 6 : 3;
  auto c = g.coords(node);
  auto p0 = g.point(node);
  const int R0 = static_cast<int>(std::floor(rho / g.h[0] + 1e-9));
  const int R1 = two ? static_cast<int>(std::floor(rho / g.h[1] + 1e-9)) : 0;

  std::vector<std::array<double, 2>> z;
  std::vector<double> val;
  for (int a = -R0; a <= R0; ++a)
    for (int b = -R1; b <= R1; ++b) {
      double z0 = a * g.h[0], z1 = two ? b * g.h[1] : 0.0;
      if (std::hypot(z0, z1) > rho * (1 + 1e-12)) continue;
      z.push_back({z0 / rho, z1 / rho});
      val.push_back(u[g.index(c[0] + a, two ? c[1] + b : 0)]);
    }
  if (static_cast<int>(z.size()) < unknowns)
    throw Error(ErrorKind::fit, "too few nodes in the fit ball");

  // Columns in scaled coordinates s = z / rho: 1, s0, s1, s0^2/2, s0 s1, s1^2/2.
  Eigen::MatrixXd A(z.size(), unknowns);
  Eigen::VectorXd y(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double s0 = z[i][0], s1 = z[i][1];
    if (two) {
      A.row(i) << 1, s0, s1, 0.5 * s0 * s0, s0 * s1, 0.5 * s1 * s1;
    } else {
      A.row(i) << 1, s0, 0.5 * s0 * s0;
    }
    y[i] = val[i];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  qr.setThreshold(1e-10);
  if (qr.rank() < unknowns) throw Error(ErrorKind::fit, "rank-deficient quadratic fit");
  Eigen::VectorXd coef = qr.solve(y);

  QuadraticFit f;
  f.node = node;
  f.rho = rho;
  f.nodes_used = z.size();
  f.x0 = Vec(g.dims);
  f.grad = Vec(g.dims);
  f.hess = Eigen::MatrixXd(g.dims, g.dims);
  for (int a = 0; a < g.dims; ++a) f.x0[a] = p0[a];
  const double r2 = rho * rho;
  if (two) {
    f.grad << coef[1] / rho, coef[2] / rho;
    f.hess << coef[3] / r2, coef[4] / r2, coef[4] / r2, coef[5] / r2;
  } else {
    f.grad << coef[1] / rho;
    f.hess << coef[2] / r2;
  }
  f.fit_residual = (A * coef - y).cwiseAbs().maxCoeff();
  return f;
}

AronssonResult subsolution_residual(const HamiltonianModel& H, const ScalarField& u,
                                    std::size_t node, double rho, const SubdiffOptions& opt) {
  if (H.dim() != u.grid.dims) throw Error(ErrorKind::input, "H and field dimensions differ");
  AronssonResult r;
  r.fit = fit_quadratic(u, node, rho);
  // Gradients inside the fit noise are treated as exact zeros (kink of H at 0).
  Vec p = r.fit.grad;
  const double noise = std::max(1e-12 * (1 + u.grid.diameter()), r.fit.fit_residual / rho);
  if (p.norm() <= noise) p.setZero();
  auto omegas = H.subgradients(p);
  if (omegas.empty()) omegas = subdifferential(H, p, 1e-9, opt);
  if (omegas.empty()) throw Error(ErrorKind::evaluation, "empty subdifferential");
  r.subgradients = omegas.size();
  r.residual = -kInf;
  for (const auto& w : omegas) {
    double v = w.dot(r.fit.hess * w);
    if (v > r.residual) {
      r.residual = v;
      r.omega = w;
    }
  }
  const bool quadratic =
      H.kind() == HamKind::quadratic_form || (H.kind() == HamKind::power && H.exponent() == 2.0);
  if (quadratic) r.infinity_laplacian = r.fit.grad.dot(r.fit.hess * r.fit.grad);
  return r;
}

std::vector<std::size_t> aronsson_sample_nodes(const ScalarField& u, double rho, std::size_t count,
                                               std::uint64_t seed) {
  std::vector<std::size_t> ok;
  for (std::size_t i = 0; i < u.size(); ++i)
    if (ball_inside(u.grid, i, rho)) ok.push_back(i);
  if (ok.empty()) throw Error(ErrorKind::input, "no node has its fit ball inside the grid");
  if (count >= ok.size()) return ok;
  std::mt19937_64 rng(seed);
  std::shuffle(ok.begin(), ok.end(), rng);
  ok.resize(count);
  std::sort(ok.begin(), ok.end());
  return ok;
}

std::vector<AronssonResult> aronsson_sweep(const HamiltonianModel& H, const ScalarField& u,
                                           const std::vector<std::size_t>& nodes, double rho) {
  std::vector<AronssonResult> out(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) out[i] = subsolution_residual(H, u, nodes[i], rho);
  });
  return out;
}

void write_aronsson_csv(const std::string& path, const std::vector<AronssonResult>& rs) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorKind::input, "cannot write " + path);
  os << "node,residual,grad_norm,fit_residual\n";
  for (const auto& r : rs)
    os << r.fit.node << ',' << format_double(r.residual) << ',' << format_double(r.fit.grad.norm())
       << ',' << format_double(r.fit.fit_residual) << '\n';
}

}  // namespace hlx
