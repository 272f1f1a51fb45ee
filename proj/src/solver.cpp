#include "hlx/solver.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "hlx/error.hpp"
#include "hlx/extreal.hpp"
#include "hlx/simd.hpp"

namespace hlx {

namespace {

double boundary_lipschitz(const ScalarField& g) {
  std::vector<std::size_t> b;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g.boundary[i]) b.push_back(i);
  double m = 0;
  for (std::size_t a = 0; a < b.size(); ++a) {
    auto pa = g.grid.point(b[a]);
    for (std::size_t c = a + 1; c < b.size(); ++c) {
      auto pc = g.grid.point(b[c]);
      double d = std::hypot(pa[0] - pc[0], pa[1] - pc[1]);
      m = std::max(m, std::abs(g.values[b[a]] - g.values[b[c]]) / d);
    }
  }
  return m;
}

void update_contraction(ConvergenceReport& rep) {
  constexpr std::size_t span = 20;
  const auto& h = rep.history;
  if (h.size() <= span) {
    rep.contraction = 1.0;
    rep.error_estimate = kInf;
    return;
  }
  double rho = 0;
  for (std::size_t i = h.size() - span; i < h.size(); ++i)
    rho = std::max(rho, h[i - 1] > 0 ? h[i] / h[i - 1] : 0.0);
  rep.contraction = rho;
  rep.error_estimate = rho < 1 ? rep.residual * rho / (1 - rho) : kInf;
}

void restore_boundary(ScalarField& out, const ScalarField& u) {
  for (std::size_t i = 0; i < u.size(); ++i)
    if (u.boundary[i]) out.values[i] = u.values[i];
}

}  // namespace

ScalarField solver_sweep(const Stencil& st, const ScalarField& u, double lambda) {
  ScalarField a, b;
  apply_up(st, u, a);
  apply_down(st, u, b);
  ScalarField out = u;
  simd::relax(out.values.data(), u.values.data(), a.values.data(), b.values.data(), u.size(),
              lambda);
  restore_boundary(out, u);
  out.invalidate();
  return out;
}

SolveResult solve_dirichlet(const HamiltonianModel& H, const CoercivityProfile& prof,
                            const ScalarField& g, const SolveConfig& cfg) {
  if (H.dim() != g.grid.dims) throw Error(ErrorKind::input, "H and grid dimensions differ");
  if (std::none_of(g.boundary.begin(), g.boundary.end(), [](auto v) { return v != 0; }))
    throw Error(ErrorKind::input, "boundary mask is empty");
  if (!(cfg.tolerance > 0)) throw Error(ErrorKind::input, "tolerance must be positive");
  if (!(cfg.damping > 0 && cfg.damping <= 1)) throw Error(ErrorKind::input, "damping must lie in (0,1]");
  double gmin = kInf, gmax = -kInf;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!g.boundary[i]) continue;
    if (!std::isfinite(g.values[i]) || is_inf(std::abs(g.values[i])))
      throw Error(ErrorKind::input, "boundary data must be finite");
    gmin = std::min(gmin, g.values[i]);
    gmax = std::max(gmax, g.values[i]);
  }
  const double osc = gmax - gmin;
  const double diam = g.grid.diameter();

  SolveResult res;
  ConvergenceReport& rep = res.report;
  const double t0 = t_zero(osc, diam, prof);
  rep.t = cfg.t > 0 ? cfg.t : t0 / 4;
  if (!(rep.t < t0)) throw Error(ErrorKind::locality, "flow time is not below t_zero(osc g, diam)");
  double K = cfg.lipschitz_factor * boundary_lipschitz(g);
  rep.radius = cfg.radius > 0 ? cfg.radius : prof.lipschitz_reach(K) * rep.t;
  Stencil st = build_stencil(H, g.grid, rep.t, rep.radius);
  st.symmetric_clip = cfg.symmetric_clip;
  rep.radius = st.radius;

  ScalarField u = g;
  u.invalidate();
  switch (cfg.init) {
    case InitMode::boundary_min:
    case InitMode::boundary_max:
      for (std::size_t i = 0; i < u.size(); ++i)
        if (!u.boundary[i]) u.values[i] = cfg.init == InitMode::boundary_min ? gmin : gmax;
      break;
    case InitMode::random: {
      std::mt19937_64 rng(cfg.seed);
      std::uniform_real_distribution<double> U(gmin, gmax);
      for (std::size_t i = 0; i < u.size(); ++i)
        if (!u.boundary[i]) u.values[i] = U(rng);
      break;
    }
    case InitMode::user:
      if (!cfg.user_init || !cfg.user_init->grid.same_as(g.grid))
        throw Error(ErrorKind::grid_mismatch, "user initialisation does not match the grid");
      for (std::size_t i = 0; i < u.size(); ++i)
        if (!u.boundary[i]) u.values[i] = cfg.user_init->values[i];
      break;
  }

  ScalarField a(g.grid), b(g.grid), m(g.grid), next = u;
  const std::size_t n = u.size();
  const std::size_t window = 50;
  for (rep.iterations = 0; rep.iterations < cfg.max_iters; ++rep.iterations) {
    apply_up(st, u, a);
    apply_down(st, u, b);
    simd::relax(m.values.data(), u.values.data(), a.values.data(), b.values.data(), n, 1.0);
    restore_boundary(m, u);
    rep.residual = simd::max_abs_diff(m.values.data(), u.values.data(), n);
    rep.history.push_back(rep.residual);
    update_contraction(rep);
    if (rep.residual == 0.0 ||
        (rep.residual < cfg.tolerance &&
         (cfg.stop == StopRule::residual || rep.error_estimate < cfg.tolerance))) {
      rep.converged = true;
      break;
    }
    if (cfg.damping == 1.0) {
      std::swap(u.values, m.values);
    } else {
      simd::relax(next.values.data(), u.values.data(), a.values.data(), b.values.data(), n,
                  cfg.damping);
      restore_boundary(next, u);
      std::swap(u.values, next.values);
    }
  }
  u.invalidate();
  // Residual history should settle into a nonincreasing tail once damping burns in.
  const auto& hs = rep.history;
  if (hs.size() > 2 * window) {
    double head = *std::max_element(hs.end() - window, hs.end());
    double prior = *std::max_element(hs.end() - 2 * window, hs.end() - window);
    if (head > prior * (1 + 1e-9)) rep.warnings.push_back("residual history not settling");
  }
  if (cfg.final_check) {
    double full = diam * (1 + 1e-9);
    Stencil fs = build_stencil(H, g.grid, rep.t, full);
    fs.symmetric_clip = cfg.symmetric_clip;
    apply_up(fs, u, a);
    apply_down(fs, u, b);
    simd::relax(m.values.data(), u.values.data(), a.values.data(), b.values.data(), n, 1.0);
    restore_boundary(m, u);
    rep.full_residual = simd::max_abs_diff(m.values.data(), u.values.data(), n);
    if (rep.full_residual > std::max(rep.residual, cfg.tolerance) * (1 + 1e-9))
      rep.warnings.push_back("truncated stencil missed far maximisers: full-radius residual " +
                             format_double(rep.full_residual));
  }
  if (rep.converged && !rep.warnings.empty() && rep.full_residual > cfg.tolerance)
    rep.converged = false;
  rep.verdict = rep.converged ? "converged" : "not converged";
  res.u = std::move(u);
  return res;
}

double comparison_gap(const ScalarField& u, const ScalarField& v) {
  if (!u.grid.same_as(v.grid) || u.boundary != v.boundary)
    throw Error(ErrorKind::grid_mismatch, "comparison needs identical grids and boundary masks");
  double mi = -kInf, mb = -kInf;
  for (std::size_t i = 0; i < u.size(); ++i) {
    double d = u.values[i] - v.values[i];
    if (u.boundary[i]) mb = std::max(mb, d);
    else mi = std::max(mi, d);
  }
  if (is_neg_inf(mb)) throw Error(ErrorKind::input, "boundary mask is empty");
  if (is_neg_inf(mi)) return 0.0;
  return mi - mb;
}

std::vector<double> boundary_distance(const ScalarField& u) {
  std::vector<std::size_t> b;
  for (std::size_t i = 0; i < u.size(); ++i)
    if (u.boundary[i]) b.push_back(i);
  std::vector<double> d(u.size(), kInf);
  for (std::size_t i = 0; i < u.size(); ++i) {
    auto p = u.grid.point(i);
    for (auto j : b) {
      auto q = u.grid.point(j);
      d[i] = std::min(d[i], std::hypot(p[0] - q[0], p[1] - q[1]));
    }
  }
  return d;
}

StationaryResult stationary_point_search(const HamiltonianModel& H, const CoercivityProfile& prof,
                                         const ScalarField& f, const ScalarField& g, double t,
                                         double r, double tol) {
  if (!f.grid.same_as(g.grid) || f.boundary != g.boundary)
    throw Error(ErrorKind::grid_mismatch, "f and g must share grid and boundary mask");
  const double osc = std::max(f.oscillation(), g.oscillation());
  if (!(t < t_zero(osc, r, prof)))
    throw Error(ErrorKind::locality, "t is not below t_zero(osc, r)");
  Stencil st = build_stencil(H, f.grid, t, r);
  ScalarField fu, fd, gu, gd;
  apply_up(st, f, fu);
  apply_down(st, f, fd);
  apply_up(st, g, gu);
  apply_down(st, g, gd);
  auto dist = boundary_distance(f);
  const double eps = 1e-12 * std::max(1.0, r);

  double worst = 0;
  std::size_t worst_node = 0;
  std::string which;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!(dist[i] > 2 * r + eps)) continue;
    double df = -(fu.values[i] + fd.values[i] - 2 * f.values[i]);
    double dg = gu.values[i] + gd.values[i] - 2 * g.values[i];
    if (df > worst) {
      worst = df;
      worst_node = i;
      which = "f";
    }
    if (dg > worst) {
      worst = dg;
      worst_node = i;
      which = "g";
    }
  }
  if (worst > tol)
    throw Error(ErrorKind::precondition, "flow-difference inequality for " + which +
                                             " violated by " + format_double(worst) +
                                             " at node " + std::to_string(worst_node));

  StationaryResult res;
  double M = -kInf;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (dist[i] >= r - eps) M = std::max(M, f.values[i] - g.values[i]);
  if (is_neg_inf(M)) throw Error(ErrorKind::margin, "no node at distance >= r from the boundary");
  std::vector<std::size_t> E;
  res.max_interior = -kInf;
  res.max_annulus = -kInf;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!(dist[i] >= r - eps)) continue;
    double d = f.values[i] - g.values[i];
    bool annulus = !(dist[i] > 2 * r + eps);
    (annulus ? res.max_annulus : res.max_interior) =
        std::max(annulus ? res.max_annulus : res.max_interior, d);
    if (d >= M - tol) E.push_back(i);
  }
  res.e_size = E.size();
  for (auto i : E) {
    if (!(dist[i] > 2 * r + eps)) {
      res.outcome = StationaryOutcome::certificate;
      res.node = i;
      res.detail = "max of f-g over the closed r-interior is attained within 2r of the boundary";
      return res;
    }
  }
  double fmax = -kInf;
  for (auto i : E) fmax = std::max(fmax, f.values[i]);
  std::vector<std::size_t> F;
  for (auto i : E)
    if (f.values[i] >= fmax - tol) F.push_back(i);
  res.f_size = F.size();
  for (auto i : F) {
    bool stat = std::abs(f.values[i] - fu.values[i]) <= tol && std::abs(f.values[i] - fd.values[i]) <= tol &&
                std::abs(g.values[i] - gu.values[i]) <= tol && std::abs(g.values[i] - gd.values[i]) <= tol;
    if (stat) {
      res.outcome = StationaryOutcome::stationary_point;
      res.node = i;
      res.detail = "f and g are fixed by both flows at x0";
      return res;
    }
  }
  res.outcome = StationaryOutcome::unresolved;
  res.node = F.empty() ? 0 : F.front();
  res.detail = "interior maximiser found but no F-node is stationary within tolerance";
  return res;
}

}  // namespace hlx
