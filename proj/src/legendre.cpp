#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>

#include "hlx/error.hpp"
#include "hlx/extreal.hpp"
#include "hlx/hamiltonian.hpp"
#include "hlx/simd.hpp"

namespace hlx {

namespace {

// One 1D line: primal nodes x (ascending, uniform), values f (kInf outside
// the effective domain), dual slopes s (ascending). Writes f* into out.
struct Line {
  std::vector<double> x, f;
};

// Slopes beyond which the sup is decided outside the sampled window.
struct EdgeRule {
  bool left = false, right = false;
  double left_slope = 0, right_slope = 0;
};

EdgeRule edge_rule(const std::vector<double>& x, const std::vector<double>& f,
                   const std::vector<std::size_t>& fin) {
  EdgeRule r;
  if (fin.size() < 2) return r;
  std::size_t a = fin.front(), b = fin.back();
  if (a == 0 && fin[1] == 1) {
    r.left = true;
    r.left_slope = (f[1] - f[0]) / (x[1] - x[0]);
  }
  std::size_t n = x.size();
  if (b == n - 1 && fin[fin.size() - 2] == n - 2) {
    r.right = true;
    r.right_slope = (f[n - 1] - f[n - 2]) / (x[n - 1] - x[n - 2]);
  }
  return r;
}

bool outside(const EdgeRule& r, double s) {
  return (r.right && s > r.right_slope) || (r.left && s < r.left_slope);
}

void conj_line_brute(const Line& L, const std::vector<double>& s, double* out) {
  std::vector<std::size_t> fin;
  for (std::size_t i = 0; i < L.f.size(); ++i)
    if (!is_inf(L.f[i])) fin.push_back(i);
  if (fin.empty()) {
    for (std::size_t j = 0; j < s.size(); ++j) out[j] = -kInf;
    return;
  }
  EdgeRule er = edge_rule(L.x, L.f, fin);
  std::vector<double> xs, fs;
  for (auto i : fin) {
    xs.push_back(L.x[i]);
    fs.push_back(L.f[i]);
  }
  for (std::size_t j = 0; j < s.size(); ++j) {
    if (outside(er, s[j])) {
      out[j] = kInf;
      continue;
    }
    out[j] = sat(simd::conj_max(xs.data(), fs.data(), xs.size(), s[j], nullptr));
  }
}

// Lower hull walk with a rounding-safe candidate window: any node whose exact
// value trails the hull maximum by more than the error bound cannot win in
// floating point, so only the window around the hull argmax is rescanned.
void conj_line_fast(const Line& L, const std::vector<double>& s, double* out) {
  std::vector<std::size_t> fin;
  for (std::size_t i = 0; i < L.f.size(); ++i)
    if (!is_inf(L.f[i])) fin.push_back(i);
  if (fin.empty()) {
    for (std::size_t j = 0; j < s.size(); ++j) out[j] = -kInf;
    return;
  }
  EdgeRule er = edge_rule(L.x, L.f, fin);
  const std::size_t m = fin.size();
  std::vector<double> xs(m), fs(m);
  for (std::size_t k = 0; k < m; ++k) {
    xs[k] = L.x[fin[k]];
    fs[k] = L.f[fin[k]];
  }
  std::vector<std::size_t> hull;
  for (std::size_t k = 0; k < m; ++k) {
    while (hull.size() >= 2) {
      std::size_t a = hull[hull.size() - 2], b = hull.back();
      double cr = (xs[b] - xs[a]) * (fs[k] - fs[a]) - (fs[b] - fs[a]) * (xs[k] - xs[a]);
      if (cr <= 0) hull.pop_back();
      else break;
    }
    hull.push_back(k);
  }
  double xmax = 0, fmax = 0, smax = 0;
  for (std::size_t k = 0; k < m; ++k) {
    xmax = std::max(xmax, std::abs(xs[k]));
    fmax = std::max(fmax, std::abs(fs[k]));
  }
  for (double v : s) smax = std::max(smax, std::abs(v));
  const double err = 16 * DBL_EPSILON * (smax * xmax + fmax) + DBL_MIN;

  std::size_t pos = 0;
  for (std::size_t j = 0; j < s.size(); ++j) {
    const double sj = s[j];
    if (outside(er, sj)) {
      out[j] = kInf;
      continue;
    }
    auto val = [&](std::size_t k) {
      double p = sj * xs[k];
      return p - fs[k];
    };
    if (j > 0 && sj < s[j - 1]) pos = 0;
    while (pos + 1 < hull.size() && val(hull[pos + 1]) >= val(hull[pos])) ++pos;
    while (pos > 0 && val(hull[pos - 1]) > val(hull[pos])) --pos;
    const double top = val(hull[pos]);
    std::size_t lo = pos, hi = pos;
    while (lo > 0 && val(hull[lo]) >= top - 4 * err) --lo;
    while (hi + 1 < hull.size() && val(hull[hi]) >= top - 4 * err) ++hi;
    double best = -DBL_MAX;
    for (std::size_t k = hull[lo]; k <= hull[hi]; ++k) best = std::max(best, val(k));
    out[j] = sat(best);
  }
}

void conj_line(const Line& L, const std::vector<double>& s, double* out, LegendreMode mode) {
  if (mode == LegendreMode::brute) conj_line_brute(L, s, out);
  else conj_line_fast(L, s, out);
}

std::vector<double> axis_nodes(const Grid& g, int a) {
  std::vector<double> v(g.n[a]);
  for (int i = 0; i < g.n[a]; ++i) v[i] = g.origin[a] + i * g.h[a];
  return v;
}

}  // namespace

ScalarField legendre_transform(const ScalarField& f, const Grid& dual, LegendreMode mode) {
  const Grid& g = f.grid;
  if (g.dims != dual.dims) throw Error(ErrorKind::input, "dual grid dimension mismatch");
  if (std::all_of(f.values.begin(), f.values.end(), [](double v) { return is_inf(v); }))
    throw Error(ErrorKind::input, "empty effective domain");
  ScalarField out(dual);
  if (g.dims == 1) {
    Line L{axis_nodes(g, 0), f.values};
    conj_line(L, axis_nodes(dual, 0), out.values.data(), mode);
    return out;
  }
  // Inner sup over the second axis for every primal row, then the outer sup
  // over the first axis of -inner for every dual column.
  const auto x1 = axis_nodes(g, 1);
  const auto s1 = axis_nodes(dual, 1);
  std::vector<double> inner(static_cast<std::size_t>(g.n[0]) * dual.n[1]);
  for (int i0 = 0; i0 < g.n[0]; ++i0) {
    Line L{x1, std::vector<double>(f.values.begin() + g.index(i0, 0),
                                   f.values.begin() + g.index(i0, 0) + g.n[1])};
    conj_line(L, s1, inner.data() + static_cast<std::size_t>(i0) * dual.n[1], mode);
  }
  const auto x0 = axis_nodes(g, 0);
  const auto s0 = axis_nodes(dual, 0);
  std::vector<double> col(dual.n[0]);
  for (int j1 = 0; j1 < dual.n[1]; ++j1) {
    Line L{x0, std::vector<double>(g.n[0])};
    bool unbounded = false;
    for (int i0 = 0; i0 < g.n[0]; ++i0) {
      double v = inner[static_cast<std::size_t>(i0) * dual.n[1] + j1];
      if (is_inf(v)) unbounded = true;
      L.f[i0] = is_neg_inf(v) ? kInf : -v;
    }
    if (unbounded || std::all_of(L.f.begin(), L.f.end(), [](double v) { return is_inf(v); })) {
      for (int j0 = 0; j0 < dual.n[0]; ++j0)
        out.values[dual.index(j0, j1)] = unbounded ? kInf : -kInf;
      continue;
    }
    conj_line(L, s0, col.data(), mode);
    for (int j0 = 0; j0 < dual.n[0]; ++j0) out.values[dual.index(j0, j1)] = col[j0];
  }
  return out;
}

}  // namespace hlx
