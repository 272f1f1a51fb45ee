#include "hlx/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "hlx/error.hpp"
#include "hlx/extreal.hpp"
#include "hlx/parallel.hpp"

namespace hlx {

namespace {

int default_dirs(int dim) { return dim == 1 ? 2 : dim == 2 ? 1024 : 2048; }

double ray_exit(const HamiltonianModel& H, const Vec& d) {
  if (H.kind() != HamKind::table) return kInf;
  double t = kInf;
  for (int a = 0; a < H.dim(); ++a) {
    if (d[a] > 0) t = std::min(t, H.box().hi[a] / d[a]);
    if (d[a] < 0) t = std::min(t, H.box().lo[a] / d[a]);
  }
  return t;
}

// Largest t with H(t d) <= k (H is nondecreasing along the ray past its zero set).
bool ray_level(const HamiltonianModel& H, const Vec& d, double k, double* t_out) {
  double cap = ray_exit(H, d);
  double hi = std::min(1.0, cap);
  while (H(hi * d) <= k) {
    if (hi >= cap) return false;
    hi = std::min(2 * hi, cap);
    if (hi > 1e12) return false;
  }
  double lo = 0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    double mid = 0.5 * (lo + hi);
    (H(mid * d) <= k ? lo : hi) = mid;
  }
  *t_out = k > 0 ? hi : lo;
  return true;
}

}  // namespace

double ConeData::value(const Vec& x) const {
  double m = -kInf;
  for (const auto& p : level_set) m = std::max(m, p.dot(x));
  return m;
}

double ConeData::value(double x0, double x1) const {
  double m = -kInf;
  if (!level_set.empty() && level_set.front().size() == 1) {
    for (const auto& p : level_set) m = std::max(m, p[0] * x0);
  } else {
    for (const auto& p : level_set) m = std::max(m, p[0] * x0 + p[1] * x1);
  }
  return m;
}

ConeData cone_data(const HamiltonianModel& H, double k, const ConeOptions& opt) {
  if (!(k >= 0)) throw Error(ErrorKind::input, "cone level must be >= 0");
  const int dim = H.dim();
  ConeData c;
  c.k = k;
  c.level_tol = opt.level_tol;
  auto dirs = sphere_directions(dim, opt.directions > 0 ? opt.directions : default_dirs(dim));
  if (k == 0) c.level_set.push_back(Vec::Zero(dim));
  for (const auto& d : dirs) {
    double t;
    if (!ray_level(H, d, k, &t)) continue;
    Vec p = t * d;
    if (k > 0 && std::abs(H(p) - k) > std::max(opt.level_tol, 1e-12 * k)) {
      // bisection bottomed out at a jump; keep the point only if it is on the level
      continue;
    }
    if (k == 0 && t == 0) continue;
    c.level_set.push_back(p);
  }
  if (c.level_set.empty()) throw Error(ErrorKind::level, "empty sampled level set");
  c.M_k = kInf;
  c.K_k = -kInf;
  for (const auto& d : dirs) {
    double v = c.value(d);
    c.M_k = std::min(c.M_k, v);
    c.K_k = std::max(c.K_k, v);
  }
  return c;
}

double support_value(const HamiltonianModel& H, double k, const Vec& x) {
  if (!(k >= 0)) throw Error(ErrorKind::input, "cone level must be >= 0");
  if (H.dim() > 2) throw Error(ErrorKind::input, "support_value is 1D/2D only");
  const double nx = x.norm();
  if (nx == 0) return 0.0;
  auto height = [&](double th) {
    Vec d(H.dim());
    if (H.dim() == 1) {
      d[0] = th;
    } else {
      d[0] = std::cos(th);
      d[1] = std::sin(th);
    }
    double t;
    if (!ray_level(H, d, k, &t)) throw Error(ErrorKind::level, "level set leaves the box");
    return t * d.dot(x);
  };
  if (H.dim() == 1) return std::max(height(1.0), height(-1.0));
  // Height along x is unimodal on the half circle facing x.
  const double th0 = std::atan2(x[1], x[0]);
  const int n = 64;
  int best = 0;
  double bv = -kInf;
  for (int j = 0; j <= n; ++j) {
    double v = height(th0 + std::numbers::pi * (double(j) / n - 0.5));
    if (v > bv) {
      bv = v;
      best = j;
    }
  }
  double a = th0 + std::numbers::pi * (double(std::max(best - 1, 0)) / n - 0.5);
  double b = th0 + std::numbers::pi * (double(std::min(best + 1, n)) / n - 0.5);
  const double r = 0.5 * (std::sqrt(5.0) - 1);
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = height(c), fd = height(d);
  for (int it = 0; it < 80; ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = height(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = height(d);
    }
  }
  return std::max({bv, fc, fd});
}

double cone_value(const HamiltonianModel& H, double k, const Vec& x) {
  if (x.norm() == 0) return 0.0;
  return cone_data(H, k).value(x);
}

std::pair<double, double> cone_constants(const HamiltonianModel& H, double k) {
  auto c = cone_data(H, k);
  return {c.M_k, c.K_k};
}

namespace {

struct Lattice {
  int dim, n;
  Vec lo, step;
  std::size_t count() const {
    std::size_t c = 1;
    for (int i = 0; i < dim; ++i) c *= n;
    return c;
  }
  Vec point(std::size_t idx) const {
    Vec p(dim);
    for (int a = dim - 1; a >= 0; --a) {
      p[a] = lo[a] + static_cast<double>(idx % n) * step[a];
      idx /= n;
    }
    return p;
  }
};

double lipschitz_bound(const HamiltonianModel& H, const Lattice& lat) {
  double L = 0;
  for (std::size_t i = 0; i < lat.count(); ++i) {
    Vec p = lat.point(i);
    for (int a = 0; a < lat.dim; ++a) {
      Vec q = p;
      q[a] += lat.step[a];
      if (q[a] > H.box().hi[a] + 1e-12) continue;
      L = std::max(L, std::abs(H(q) - H(p)) / lat.step[a]);
    }
  }
  return L;
}

}  // namespace

std::vector<Vec> subdifferential(const HamiltonianModel& H, const Vec& p, double tol,
                                 const SubdiffOptions& opt) {
  const int dim = H.dim();
  Lattice prim{dim, opt.primal_nodes > 0 ? opt.primal_nodes : (dim == 1 ? 257 : dim == 2 ? 41 : 13),
               H.box().lo, Vec()};
  prim.step = (H.box().hi - H.box().lo) / (prim.n - 1);
  std::vector<Vec> samples;
  for (std::size_t i = 0; i < prim.count(); ++i) samples.push_back(prim.point(i));
  // Local ring around p resolves the supporting test near p itself.
  double hp = prim.step.maxCoeff();
  for (double r : {hp / 16, hp / 4, hp / 2, hp})
    for (const auto& d : sphere_directions(dim, dim == 1 ? 2 : 64)) {
      Vec q = p + r * d;
      if (H.box().contains(q)) samples.push_back(q);
    }
  double half = opt.dual_half > 0 ? opt.dual_half : 1.1 * lipschitz_bound(H, prim);
  half = std::max(half, 1e-6);
  Lattice dual{dim, opt.dual_nodes > 0 ? opt.dual_nodes : (dim == 1 ? 401 : dim == 2 ? 81 : 21),
               Vec::Constant(dim, -half), Vec()};
  dual.step = Vec::Constant(dim, 2 * half / (dual.n - 1));
  const double hp0 = H(p);
  std::vector<double> hs(samples.size());
  for (std::size_t j = 0; j < samples.size(); ++j) hs[j] = H(samples[j]);
  std::vector<Vec> out;
  for (std::size_t i = 0; i < dual.count(); ++i) {
    Vec q = dual.point(i);
    bool ok = true;
    for (std::size_t j = 0; j < samples.size() && ok; ++j)
      ok = hs[j] >= hp0 + q.dot(samples[j] - p) - tol;
    if (ok) out.push_back(q);
  }
  return out;
}

SubdiffSets gamma_w_n(const HamiltonianModel& H, double k, const GammaOptions& opt) {
  const int dim = H.dim();
  if (dim > 2) throw Error(ErrorKind::input, "indicator grids support 1D and 2D");
  if (!(k > 0)) throw Error(ErrorKind::input, "gamma_w_n needs k > 0");
  SubdiffSets s;
  s.k = k;
  ConeOptions co;
  if (opt.directions > 0) co.directions = opt.directions;
  ConeData cone = cone_data(H, k, co);

  for (const auto& p : cone.level_set) {
    auto g = H.subgradients(p);
    if (g.empty()) g = subdifferential(H, p, 1e-6);
    s.gamma_k.insert(s.gamma_k.end(), g.begin(), g.end());
  }
  double qmax = 0;
  for (const auto& q : s.gamma_k) qmax = std::max(qmax, q.norm());
  const double half = 1.25 * qmax + 1e-9;
  const int n = opt.dual_nodes > 0 ? opt.dual_nodes : (dim == 1 ? 401 : 81);
  Grid dual = dim == 1 ? Grid::line(n, -half, half) : Grid::square(n, n, -half, half, -half, half);
  s.dual_step = dual.hmax();
  s.level_tol = 0.5 * s.dual_step;

  // q lies in W_k iff min over p in dL(q) of H(p) <= k. That minimum equals
  // g'(1-) - L(q) for g(tau) = L(tau q); the left secant approximates g'(1-).
  const double eps = opt.ray_eps;
  s.w_k = ScalarField(dual);
  s.n_k = ScalarField(dual);
  parallel_for(dual.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      auto pt = dual.point(i);
      Vec q(dim);
      q[0] = pt[0];
      if (dim > 1) q[1] = pt[1];
      double L = H.lagrangian(q);
      if (is_inf(L)) continue;
      double Lm = H.lagrangian((1 - eps) * q);
      double hmin = (L - Lm) / eps - L;
      if (hmin > k * (1 + 1e-6) + 1e-9) continue;
      s.w_k.values[i] = 1.0;
      double dmin = kInf;
      for (const auto& g : s.gamma_k) dmin = std::min(dmin, (g - q).norm());
      if (dmin > s.level_tol) s.n_k.values[i] = 1.0;
    }
  });

  std::size_t origin = 0;
  double best = kInf;
  for (std::size_t i = 0; i < dual.size(); ++i) {
    auto pt = dual.point(i);
    double r = std::hypot(pt[0], pt[1]);
    if (r < best) {
      best = r;
      origin = i;
    }
  }
  if (s.n_k.values[origin] != 1.0) s.warnings.push_back("origin not in N_k");
  const double edge_tol = s.level_tol + std::sqrt(2.0) * s.dual_step;
  for (std::size_t i = 0; i < dual.size(); ++i) {
    if (s.n_k.values[i] != 1.0) continue;
    auto c = dual.coords(i);
    bool boundary = false;
    for (int a = -1; a <= 1 && !boundary; ++a)
      for (int b = (dim > 1 ? -1 : 0); b <= (dim > 1 ? 1 : 0) && !boundary; ++b) {
        int i0 = c[0] + a, i1 = c[1] + b;
        if (i0 < 0 || i0 >= dual.n[0] || (dim > 1 && (i1 < 0 || i1 >= dual.n[1]))) {
          boundary = true;
          continue;
        }
        if (s.n_k.values[dual.index(i0, dim > 1 ? i1 : 0)] != 1.0) boundary = true;
      }
    if (!boundary) continue;
    auto pt = dual.point(i);
    Vec q(dim);
    q[0] = pt[0];
    if (dim > 1) q[1] = pt[1];
    double dmin = kInf;
    for (const auto& g : s.gamma_k) dmin = std::min(dmin, (g - q).norm());
    if (dmin > edge_tol) {
      s.warnings.push_back("N_k boundary node at (" + format_double(pt[0]) + "," +
                           format_double(pt[1]) + ") is " + format_double(dmin) +
                           " from Gamma_k");
    }
  }
  return s;
}

void write_points_csv(const std::string& path, const std::vector<Vec>& pts) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::input, "cannot write " + path);
  for (const auto& p : pts) {
    for (int i = 0; i < p.size(); ++i) os << (i ? "," : "") << format_double(p[i]);
    os << '\n';
  }
}

}  // namespace hlx
