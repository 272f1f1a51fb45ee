#include "hlx/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "hlx/error.hpp"
#include "hlx/extreal.hpp"

namespace hlx {

namespace {

constexpr double kNormTol = 1e-12;

Box centered_box(int dim, double half) {
  Box b;
  b.lo = Vec::Constant(dim, -half);
  b.hi = Vec::Constant(dim, half);
  return b;
}

Vec make_vec(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

}  // namespace

bool Box::contains(const Vec& p) const {
  for (int i = 0; i < p.size(); ++i)
    if (p[i] < lo[i] || p[i] > hi[i]) return false;
  return true;
}

HamiltonianModel HamiltonianModel::quadratic(const Eigen::MatrixXd& A, double box_half) {
  if (A.rows() != A.cols() || A.rows() < 1 || A.rows() > 3)
    throw Error(ErrorKind::input, "quadratic form needs a square 1x1..3x3 matrix");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  if (!lu.isInvertible()) throw Error(ErrorKind::input, "quadratic form matrix is singular");
  HamiltonianModel h;
  h.kind_ = HamKind::quadratic_form;
  h.dim_ = static_cast<int>(A.rows());
  h.A_ = A;
  h.AinvT_ = lu.inverse().transpose();
  h.m_ = 2.0;
  h.box_ = centered_box(h.dim_, box_half);
  return h;
}

HamiltonianModel HamiltonianModel::power(int dim, double m, double box_half) {
  if (dim < 1 || dim > 3) throw Error(ErrorKind::input, "dimension must be 1..3");
  if (!(m >= 1.0)) throw Error(ErrorKind::input, "exponent must be >= 1");
  HamiltonianModel h;
  h.kind_ = HamKind::power;
  h.dim_ = dim;
  h.m_ = m;
  h.box_ = centered_box(dim, box_half);
  return h;
}

HamiltonianModel HamiltonianModel::sampled_norm(const std::vector<Vec>& ball, double box_half) {
  if (ball.empty()) throw Error(ErrorKind::input, "empty unit ball sample");
  HamiltonianModel h;
  h.kind_ = HamKind::sampled_norm;
  h.dim_ = static_cast<int>(ball.front().size());
  h.m_ = 1.0;
  h.box_ = centered_box(h.dim_, box_half);
  if (h.dim_ == 1) {
    double a = 0, b = 0;
    for (const auto& v : ball) {
      a = std::max(a, v[0]);
      b = std::min(b, v[0]);
    }
    if (!(a > 0) || !(b < 0)) throw Error(ErrorKind::input, "unit ball must contain 0 inside");
    h.verts_ = {Vec::Constant(1, b), Vec::Constant(1, a)};
    h.normals_ = {Vec::Constant(1, 1.0 / b), Vec::Constant(1, 1.0 / a)};
    return h;
  }
  if (h.dim_ != 2) throw Error(ErrorKind::input, "sampled norms support 1D and 2D");
  std::vector<Vec> pts = ball;
  std::sort(pts.begin(), pts.end(), [](const Vec& x, const Vec& y) {
    return x[0] < y[0] || (x[0] == y[0] && x[1] < y[1]);
  });
  auto cross = [](const Vec& o, const Vec& a, const Vec& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
  };
  std::vector<Vec> hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k > 0 ? k - 1 : 0);
  if (hull.size() < 3) throw Error(ErrorKind::input, "unit ball sample is degenerate");
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Vec& a = hull[i];
    const Vec& b = hull[(i + 1) % hull.size()];
    Vec perp = make_vec(b[1] - a[1], a[0] - b[0]);
    double d = perp.dot(a);
    if (!(d > 0)) throw Error(ErrorKind::input, "unit ball must contain 0 inside");
    h.normals_.push_back(perp / d);
  }
  h.verts_ = hull;
  return h;
}

HamiltonianModel HamiltonianModel::table(const ScalarField& values) {
  HamiltonianModel h;
  h.kind_ = HamKind::table;
  h.dim_ = values.grid.dims;
  h.table_ = values;
  const Grid& g = values.grid;
  h.box_.lo = Vec(h.dim_);
  h.box_.hi = Vec(h.dim_);
  for (int a = 0; a < h.dim_; ++a) {
    h.box_.lo[a] = g.lo(a);
    h.box_.hi[a] = g.hi(a);
  }
  for (double v : values.values)
    if (!std::isfinite(v) || is_inf(v)) throw Error(ErrorKind::evaluation, "table H must be finite");
  double zero_extent = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto p = g.point(i);
    double r = std::hypot(p[0], g.dims > 1 ? p[1] : 0.0);
    if (values.values[i] <= kNormTol) zero_extent = std::max(zero_extent, r);
  }
  h.table_R0_ = zero_extent + g.hmax();
  double k0 = kInf;
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto p = g.point(i);
    double r = std::hypot(p[0], g.dims > 1 ? p[1] : 0.0);
    if (r >= h.table_R0_ && r <= h.table_R0_ + 2 * g.hmax()) k0 = std::min(k0, values.values[i]);
  }
  h.table_k0_ = is_inf(k0) ? 0.0 : k0;
  return h;
}

double HamiltonianModel::box_half() const {
  double r = 0;
  for (int i = 0; i < dim_; ++i) r = std::max({r, -box_.lo[i], box_.hi[i]});
  return r;
}

std::string HamiltonianModel::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case HamKind::quadratic_form: os << "quadratic_form dim=" << dim_; break;
    case HamKind::power: os << "power dim=" << dim_ << " m=" << m_; break;
    case HamKind::sampled_norm: os << "sampled_norm dim=" << dim_ << " facets=" << normals_.size(); break;
    case HamKind::table: os << "table dim=" << dim_ << " nodes=" << table_.size(); break;
  }
  return os.str();
}

double HamiltonianModel::table_eval(const Vec& p) const {
  const Grid& g = table_.grid;
  double idx[2] = {0, 0};
  for (int a = 0; a < dim_; ++a) {
    double x = (p[a] - g.origin[a]) / g.h[a];
    if (x < -1e-9 || x > g.n[a] - 1 + 1e-9)
      throw Error(ErrorKind::evaluation, "table H evaluated outside its box");
    idx[a] = std::clamp(x, 0.0, static_cast<double>(g.n[a] - 1));
  }
  int i0 = std::min(static_cast<int>(idx[0]), g.n[0] - 2);
  double w0 = idx[0] - i0;
  if (dim_ == 1) {
    return (1 - w0) * table_.values[i0] + w0 * table_.values[i0 + 1];
  }
  int i1 = std::min(static_cast<int>(idx[1]), g.n[1] - 2);
  double w1 = idx[1] - i1;
  const auto& v = table_.values;
  double a = (1 - w1) * v[g.index(i0, i1)] + w1 * v[g.index(i0, i1 + 1)];
  double b = (1 - w1) * v[g.index(i0 + 1, i1)] + w1 * v[g.index(i0 + 1, i1 + 1)];
  return (1 - w0) * a + w0 * b;
}

double HamiltonianModel::operator()(const Vec& p) const {
  if (p.size() != dim_) throw Error(ErrorKind::input, "dimension mismatch in H");
  double r = 0;
  switch (kind_) {
    case HamKind::quadratic_form: r = 0.5 * (A_ * p).squaredNorm(); break;
    case HamKind::power: r = std::pow(p.norm(), m_) / m_; break;
    case HamKind::sampled_norm: {
      r = -kInf;
      for (const auto& n : normals_) r = std::max(r, n.dot(p));
      break;
    }
    case HamKind::table: r = table_eval(p); break;
  }
  if (!std::isfinite(r)) throw Error(ErrorKind::evaluation, "non-finite H value");
  return r;
}

double HamiltonianModel::table_lagrangian(const Vec& q) const {
  const Grid& g = table_.grid;
  double qn = q.norm();
  bool restrict = table_k0_ > 0 && qn < table_k0_ / table_R0_;
  double best = -kInf;
  std::size_t arg = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto p = g.point(i);
    if (restrict && std::hypot(p[0], g.dims > 1 ? p[1] : 0.0) > table_R0_) continue;
    double v = q[0] * p[0] - table_.values[i];
    if (dim_ > 1) v = q[0] * p[0] + q[1] * p[1] - table_.values[i];
    if (v > best) {
      best = v;
      arg = i;
    }
  }
  if (!restrict) {
    auto c = g.coords(arg);
    bool edge = c[0] == 0 || c[0] == g.n[0] - 1;
    if (dim_ > 1) edge = edge || c[1] == 0 || c[1] == g.n[1] - 1;
    if (edge) return kInf;
  }
  return std::max(best, 0.0);
}

double HamiltonianModel::lagrangian(const Vec& q) const {
  if (q.size() != dim_) throw Error(ErrorKind::input, "dimension mismatch in L");
  switch (kind_) {
    case HamKind::quadratic_form: return sat(0.5 * (AinvT_ * q).squaredNorm());
    case HamKind::power: {
      double n = q.norm();
      if (m_ == 1.0) return n <= 1.0 + kNormTol ? 0.0 : kInf;
      double mc = m_ / (m_ - 1.0);
      return sat(std::pow(n, mc) / mc);
    }
    case HamKind::sampled_norm: {
      double s = -kInf;
      for (const auto& v : verts_) s = std::max(s, v.dot(q));
      return s <= 1.0 + kNormTol ? 0.0 : kInf;
    }
    case HamKind::table: return table_lagrangian(q);
  }
  return kInf;
}

std::vector<Vec> HamiltonianModel::subgradients(const Vec& p, int samples) const {
  std::vector<Vec> out;
  switch (kind_) {
    case HamKind::quadratic_form: out.push_back(A_.transpose() * (A_ * p)); break;
    case HamKind::power: {
      double n = p.norm();
      if (n > 0) {
        out.push_back(std::pow(n, m_ - 2.0) * p);
      } else if (m_ > 1.0) {
        out.push_back(Vec::Zero(dim_));
      } else {
        out.push_back(Vec::Zero(dim_));
        for (const auto& d : sphere_directions(dim_, samples)) out.push_back(d);
      }
      break;
    }
    case HamKind::sampled_norm: {
      double hp = (*this)(p);
      std::vector<Vec> active;
      for (const auto& n : normals_)
        if (n.dot(p) >= hp - kNormTol * std::max(1.0, std::abs(hp))) active.push_back(n);
      if (active.size() == 1) return active;
      // Faces of the dual ball: segments between consecutive active normals.
      for (std::size_t i = 0; i < active.size(); ++i) {
        const Vec& a = active[i];
        const Vec& b = active[(i + 1) % active.size()];
        int steps = active.size() == 2 && i == 1 ? 0 : std::max(1, samples / static_cast<int>(active.size()));
        out.push_back(a);
        for (int s = 1; s < steps; ++s) {
          double w = static_cast<double>(s) / steps;
          out.push_back((1 - w) * a + w * b);
        }
      }
      if (p.norm() == 0) out.push_back(Vec::Zero(dim_));
      break;
    }
    case HamKind::table: break;
  }
  return out;
}

bool ValidationReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
}

const ValidationCheck& ValidationReport::check(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return c;
  throw Error(ErrorKind::input, "no validation check named " + name);
}

namespace {

struct SampleLattice {
  int dim = 1;
  int n = 0;
  Vec lo, step;
  std::size_t count() const {
    std::size_t c = 1;
    for (int i = 0; i < dim; ++i) c *= n;
    return c;
  }
  std::array<int, 3> coords(std::size_t idx) const {
    std::array<int, 3> c{0, 0, 0};
    for (int a = dim - 1; a >= 0; --a) {
      c[a] = static_cast<int>(idx % n);
      idx /= n;
    }
    return c;
  }
  std::size_t index(const std::array<int, 3>& c) const {
    std::size_t idx = 0;
    for (int a = 0; a < dim; ++a) idx = idx * n + c[a];
    return idx;
  }
  Vec point(const std::array<int, 3>& c) const {
    Vec p(dim);
    for (int a = 0; a < dim; ++a) p[a] = lo[a] + c[a] * step[a];
    return p;
  }
};

}  // namespace

ValidationReport validate_hamiltonian(const HamiltonianModel& H, double tol,
                                      const ValidationOptions& opt) {
  if (!(tol > 0)) throw Error(ErrorKind::input, "tolerance must be positive");
  const int dim = H.dim();
  const Box& box = H.box();
  Vec zero = Vec::Zero(dim);
  if (!box.contains(zero)) throw Error(ErrorKind::input, "domain box must contain 0");

  SampleLattice lat;
  lat.dim = dim;
  lat.n = opt.nodes_per_axis > 0 ? opt.nodes_per_axis : (dim == 1 ? 257 : dim == 2 ? 65 : 17);
  lat.lo = box.lo;
  lat.step = (box.hi - box.lo) / (lat.n - 1);
  if (H.kind() == HamKind::table) {
    const Grid& g = H.table_values().grid;
    lat.n = g.n[0];
    for (int a = 0; a < dim; ++a) lat.step[a] = g.h[a];
    if (dim == 2 && g.n[1] != g.n[0]) lat.n = std::min(g.n[0], g.n[1]);
  }
  const double h = lat.step.maxCoeff();

  std::vector<double> vals(lat.count());
  for (std::size_t i = 0; i < vals.size(); ++i) {
    vals[i] = H(lat.point(lat.coords(i)));
    if (!std::isfinite(vals[i])) throw Error(ErrorKind::evaluation, "non-finite H sample");
  }

  ValidationReport rep;
  rep.tol = tol;
  rep.step = h;
  const std::size_t kMaxWitness = 8;
  auto add = [&](ValidationCheck& c, const Vec& p, double v) {
    c.pass = false;
    if (c.witnesses.size() < kMaxWitness) c.witnesses.push_back({p, v});
  };

  // Neighbour offsets: axis and diagonal directions, pairs (x - e, x + e).
  std::vector<std::array<int, 3>> offs;
  for (int a = -1; a <= 1; ++a)
    for (int b = (dim > 1 ? -1 : 0); b <= (dim > 1 ? 1 : 0); ++b)
      for (int c = (dim > 2 ? -1 : 0); c <= (dim > 2 ? 1 : 0); ++c) {
        std::array<int, 3> o{a, b, c};
        bool pos = false, nz = false;
        for (int d = 0; d < 3; ++d) {
          if (o[d] != 0 && !nz) pos = o[d] > 0;
          nz = nz || o[d] != 0;
        }
        if (nz && pos) offs.push_back(o);
      }

  ValidationCheck conv{"convexity", true, {}};
  for (std::size_t i = 0; i < vals.size(); ++i) {
    auto c = lat.coords(i);
    for (const auto& o : offs) {
      std::array<int, 3> lo = c, hi = c;
      bool ok = true;
      for (int d = 0; d < dim; ++d) {
        lo[d] -= o[d];
        hi[d] += o[d];
        ok = ok && lo[d] >= 0 && lo[d] < lat.n && hi[d] >= 0 && hi[d] < lat.n;
      }
      if (!ok) continue;
      double gap = vals[i] - 0.5 * (vals[lat.index(lo)] + vals[lat.index(hi)]);
      if (gap > tol) add(conv, lat.point(c), gap);
    }
  }
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int k = 0; k < opt.random_pairs; ++k) {
    Vec a(dim), b(dim);
    for (int d = 0; d < dim; ++d) {
      a[d] = box.lo[d] + U(rng) * (box.hi[d] - box.lo[d]);
      b[d] = box.lo[d] + U(rng) * (box.hi[d] - box.lo[d]);
    }
    Vec m = 0.5 * (a + b);
    double gap = H(m) - 0.5 * (H(a) + H(b));
    if (gap > tol) add(conv, m, gap);
  }
  rep.checks.push_back(conv);

  ValidationCheck mn{"minimum", true, {}};
  double h0 = H(zero);
  if (std::abs(h0) > tol) add(mn, zero, std::abs(h0));
  for (std::size_t i = 0; i < vals.size(); ++i)
    if (vals[i] < -tol) add(mn, lat.point(lat.coords(i)), -vals[i]);
  rep.checks.push_back(mn);

  ValidationCheck bounded{"zero set bounded", true, {}};
  for (std::size_t i = 0; i < vals.size(); ++i) {
    auto c = lat.coords(i);
    bool edge = false;
    for (int d = 0; d < dim; ++d) edge = edge || c[d] == 0 || c[d] == lat.n - 1;
    if (edge && vals[i] <= tol) add(bounded, lat.point(c), tol - vals[i]);
  }
  rep.checks.push_back(bounded);

  ValidationCheck interior{"empty interior", true, {}};
  const int rad = 2;
  for (std::size_t i = 0; i < vals.size() && interior.pass; ++i) {
    if (vals[i] > tol) continue;
    auto c = lat.coords(i);
    bool all = true;
    for (int a = -rad; a <= rad && all; ++a)
      for (int b = (dim > 1 ? -rad : 0); b <= (dim > 1 ? rad : 0) && all; ++b)
        for (int e = (dim > 2 ? -rad : 0); e <= (dim > 2 ? rad : 0) && all; ++e) {
          if (a * a + b * b + e * e > rad * rad) continue;
          std::array<int, 3> q{c[0] + a, c[1] + b, c[2] + e};
          for (int d = 0; d < dim; ++d)
            if (q[d] < 0 || q[d] >= lat.n) all = false;
          if (all && vals[lat.index(q)] > tol) all = false;
        }
    if (all) add(interior, lat.point(c), 2 * h);
  }
  rep.checks.push_back(interior);

  ValidationCheck mono{"ray monotone", true, {}};
  const int steps = 256;
  for (const auto& d : sphere_directions(dim, opt.rays)) {
    double tmax = kInf;
    for (int a = 0; a < dim; ++a) {
      if (d[a] > 0) tmax = std::min(tmax, box.hi[a] / d[a]);
      if (d[a] < 0) tmax = std::min(tmax, box.lo[a] / d[a]);
    }
    double prev = 0;
    bool past_zero = false;
    for (int s = 1; s <= steps; ++s) {
      Vec p = (tmax * s / steps) * d;
      double v = H(p);
      if (v > tol) {
        if (past_zero && v < prev - tol) add(mono, p, prev - v);
        past_zero = true;
      } else if (past_zero) {
        add(mono, p, prev - v);
      }
      prev = v;
    }
  }
  rep.checks.push_back(mono);
  return rep;
}

std::vector<Vec> sphere_directions(int dim, int n) {
  std::vector<Vec> out;
  if (dim == 1) {
    out.push_back(Vec::Constant(1, -1.0));
    out.push_back(Vec::Constant(1, 1.0));
    return out;
  }
  if (dim == 2) {
    for (int i = 0; i < n; ++i) {
      double a = 2 * std::numbers::pi * i / n;
      out.push_back(make_vec(std::cos(a), std::sin(a)));
    }
    return out;
  }
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    double z = 1.0 - 2.0 * (i + 0.5) / n;
    double r = std::sqrt(std::max(0.0, 1 - z * z));
    Vec v(3);
    v << r * std::cos(golden * i), r * std::sin(golden * i), z;
    out.push_back(v);
  }
  return out;
}

double CoercivityProfile::M_at(double r) const {
  if (radii.empty() || r < radii.front()) return 0.0;
  auto it = std::upper_bound(radii.begin(), radii.end(), r);
  return M[static_cast<std::size_t>(it - radii.begin()) - 1];
}

double CoercivityProfile::lipschitz_reach(double K) const {
  for (std::size_t j = 0; j < radii.size(); ++j)
    if (M[j] > K) return radii[j];
  throw Error(ErrorKind::resolution, "M table never exceeds K; extend the table");
}

CoercivityProfile coercivity_profile(const HamiltonianModel& H, const ProfileOptions& opt) {
  const int dim = H.dim();
  const bool table = H.kind() == HamKind::table;
  int ndirs = opt.directions > 0 ? opt.directions : (table ? 64 : 256);
  double ratio = table ? std::max(opt.ratio, 1.03) : opt.ratio;
  auto dirs = sphere_directions(dim, ndirs);
  const double tol = 1e-12;

  CoercivityProfile prof;
  const double reach = H.box_half();
  double zero_extent = 0;
  for (const auto& d : dirs) {
    double tmax = kInf;
    for (int a = 0; a < dim; ++a) {
      if (d[a] > 0) tmax = std::min(tmax, H.box().hi[a] / d[a]);
      if (d[a] < 0) tmax = std::min(tmax, H.box().lo[a] / d[a]);
    }
    if (H(tmax * d) <= tol) throw Error(ErrorKind::input, "zero set reaches the domain box");
    double lo = 0, hi = tmax;
    if (H(hi * 1e-9 * d) > tol) continue;
    for (int it = 0; it < 80; ++it) {
      double mid = 0.5 * (lo + hi);
      (H(mid * d) <= tol ? lo : hi) = mid;
    }
    zero_extent = std::max(zero_extent, lo);
  }
  const double dr = reach / 256;
  prof.R0 = (std::floor(zero_extent / dr) + 1) * dr;
  prof.k0 = kInf;
  for (const auto& d : dirs) prof.k0 = std::min(prof.k0, H(prof.R0 * d));
  if (!(prof.k0 > 0)) throw Error(ErrorKind::input, "H vanishes on the sphere |p| = R0");

  std::vector<double> raw;
  for (double s = opt.s_min; s <= opt.s_max; s *= ratio) {
    double m = kInf;
    for (const auto& d : dirs) {
      double L = H.lagrangian(s * d);
      m = std::min(m, is_inf(L) ? kInf : L / s);
    }
    prof.radii.push_back(s);
    raw.push_back(m);
    if (is_inf(m)) break;
  }
  prof.M.resize(raw.size());
  double run = kInf;
  for (std::size_t j = raw.size(); j-- > 0;) {
    run = std::min(run, raw[j]);
    prof.M[j] = run;
  }
  return prof;
}

double t_zero(double alpha, double r, const CoercivityProfile& prof) {
  if (!(alpha >= 0) || !(r > 0)) throw Error(ErrorKind::input, "t_zero needs alpha >= 0, r > 0");
  double thr = alpha / r + 1.0;
  for (std::size_t j = 0; j < prof.radii.size(); ++j)
    if (prof.M[j] > thr) return r / prof.radii[j];
  throw Error(ErrorKind::resolution, "M never exceeds alpha/r + 1 on its table");
}

double locality_radius(double alpha, double t, const CoercivityProfile& prof) {
  if (!(t > 0)) throw Error(ErrorKind::input, "locality radius needs t > 0");
  double hi = 1.0;
  while (!(t < t_zero(alpha, hi, prof))) {
    hi *= 2;
    if (hi > 1e12) throw Error(ErrorKind::resolution, "no radius localizes this flow time");
  }
  double lo = 0;
  for (int it = 0; it < 100; ++it) {
    double mid = 0.5 * (lo + hi);
    bool ok = false;
    try {
      ok = t < t_zero(alpha, mid, prof);
    } catch (const Error&) {
      ok = false;
    }
    (ok ? hi : lo) = mid;
  }
  return hi;
}

ScalarField sample_hamiltonian(const HamiltonianModel& H, const Grid& g) {
  ScalarField f(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto p = g.point(i);
    Vec v(g.dims);
    v[0] = p[0];
    if (g.dims > 1) v[1] = p[1];
    f.values[i] = H(v);
  }
  return f;
}

}  // namespace hlx
