#include "hlx/hopflax.hpp"

#include <algorithm>
#include <cmath>

#include "hlx/error.hpp"
#include "hlx/extreal.hpp"
#include "hlx/parallel.hpp"
#include "hlx/simd.hpp"

namespace hlx {

FlowParams FlowParams::from_oscillation(const HamiltonianModel& H, const CoercivityProfile& prof,
                                        double osc, double t) {
  FlowParams fp;
  fp.H = &H;
  fp.t = t;
  fp.truncation = Truncation::oscillation;
  fp.bound = osc;
  fp.radius = locality_radius(osc, t, prof);
  return fp;
}

FlowParams FlowParams::from_lipschitz(const HamiltonianModel& H, const CoercivityProfile& prof,
                                      double K, double t) {
  FlowParams fp;
  fp.H = &H;
  fp.t = t;
  fp.truncation = Truncation::lipschitz;
  fp.bound = K;
  fp.radius = prof.lipschitz_reach(K) * t;
  return fp;
}

FlowParams FlowParams::with_radius(const HamiltonianModel& H, double t, double radius) {
  FlowParams fp;
  fp.H = &H;
  fp.t = t;
  fp.radius = radius;
  fp.truncation = Truncation::full;
  return fp;
}

double lattice_ceil(double x) {
  if (is_inf(x)) return kInf;
  return std::ceil(x * kLatticeScale) / kLatticeScale;
}

double lattice_round(double x) { return std::nearbyint(x * kLatticeScale) / kLatticeScale; }

Stencil build_stencil(const HamiltonianModel& H, const Grid& g, double t, double radius) {
  if (!(t > 0)) throw Error(ErrorKind::input, "flow time must be positive");
  if (H.dim() != g.dims) throw Error(ErrorKind::input, "H and grid dimensions differ");
  Stencil st;
  st.t = t;
  st.radius = std::max(radius, g.hmax());
  const double r = st.radius * (1 + 1e-12);
  int R0 = std::min(static_cast<int>(std::floor(r / g.h[0])), g.n[0] - 1);
  int R1 = g.dims > 1 ? std::min(static_cast<int>(std::floor(r / g.h[1])), g.n[1] - 1) : 0;
  bool any = false;
  for (int a = -R0; a <= R0; ++a)
    for (int b = -R1; b <= R1; ++b) {
      double z0 = a * g.h[0], z1 = b * g.h[1];
      if (std::hypot(z0, g.dims > 1 ? z1 : 0.0) > r) continue;
      Vec z(g.dims), mz(g.dims);
      z[0] = z0 / t;
      if (g.dims > 1) z[1] = z1 / t;
      mz = -z;
      double cu = (a == 0 && b == 0) ? 0.0 : lattice_ceil(sat_mul(t, H.lagrangian(z)));
      double cd = (a == 0 && b == 0) ? 0.0 : lattice_ceil(sat_mul(t, H.lagrangian(mz)));
      if (is_inf(cu) && is_inf(cd)) continue;
      st.d0.push_back(a);
      st.d1.push_back(b);
      st.up.push_back(cu);
      st.down.push_back(cd);
      st.reach0 = std::max(st.reach0, std::abs(a));
      st.reach1 = std::max(st.reach1, std::abs(b));
      any = any || !is_inf(cu);
    }
  if (!any) throw Error(ErrorKind::degenerate_stencil, "Lagrangian is +inf over the whole stencil");
  return st;
}

namespace {

// A 1D grid is one row of n[0] nodes; a 2D grid is n[0] rows of n[1].
struct RowView {
  int rows, cols;
  explicit RowView(const Grid& g)
      : rows(g.dims > 1 ? g.n[0] : 1), cols(g.dims > 1 ? g.n[1] : g.n[0]) {}
};

template <bool Up>
void apply(const Stencil& st, const ScalarField& u, ScalarField& out) {
  const Grid& g = u.grid;
  if (!out.grid.same_as(g)) out = ScalarField(g);
  out.values = u.values;
  out.boundary = u.boundary;
  out.invalidate();
  const RowView rv(g);
  const bool one_d = g.dims == 1;
  const std::vector<double>& cost = Up ? st.up : st.down;
  parallel_for(static_cast<std::size_t>(rv.rows), [&](std::size_t rb, std::size_t re) {
    simd::RoundingScope rs(Up ? simd::Rounding::upward : simd::Rounding::downward);
    for (std::size_t row = rb; row < re; ++row) {
      double* o = out.values.data() + row * rv.cols;
      for (std::size_t k = 0; k < st.size(); ++k) {
        const double c = cost[k];
        if (is_inf(c)) continue;
        const int dr = one_d ? 0 : st.d0[k];
        const int dc = one_d ? st.d0[k] : st.d1[k];
        const long src = static_cast<long>(row) + dr;
        if (src < 0 || src >= rv.rows) continue;
        int jb = std::max(0, -dc), je = std::min(rv.cols, rv.cols - dc);
        if (st.symmetric_clip) {
          const long mirror = static_cast<long>(row) - dr;
          if (mirror < 0 || mirror >= rv.rows) continue;
          jb = std::max(jb, dc);
          je = std::min(je, rv.cols + dc);
        }
        if (jb >= je) continue;
        const double* in = u.values.data() + src * rv.cols + jb + dc;
        if (Up) simd::shifted_max_sub(o + jb, in, je - jb, c);
        else simd::shifted_min_add(o + jb, in, je - jb, c);
      }
    }
  });
}

template <bool Up>
ArgFlow apply_at(const Stencil& st, const ScalarField& u, std::size_t node) {
  const Grid& g = u.grid;
  simd::RoundingScope rs(Up ? simd::Rounding::upward : simd::Rounding::downward);
  auto c = g.coords(node);
  ArgFlow best{Up ? -kInf : kInf, node};
  bool first = true;
  for (std::size_t k = 0; k < st.size(); ++k) {
    const double cost = Up ? st.up[k] : st.down[k];
    if (is_inf(cost)) continue;
    int i0 = c[0] + st.d0[k], i1 = c[1] + st.d1[k];
    if (i0 < 0 || i0 >= g.n[0]) continue;
    if (g.dims > 1 && (i1 < 0 || i1 >= g.n[1])) continue;
    if (st.symmetric_clip) {
      int m0 = c[0] - st.d0[k], m1 = c[1] - st.d1[k];
      if (m0 < 0 || m0 >= g.n[0]) continue;
      if (g.dims > 1 && (m1 < 0 || m1 >= g.n[1])) continue;
    }
    std::size_t y = g.index(i0, g.dims > 1 ? i1 : 0);
    double v = Up ? u.values[y] - cost : u.values[y] + cost;
    if (first || (Up ? v > best.value : v < best.value)) {
      best = {v, y};
      first = false;
    }
  }
  return best;
}

void check_truncation(const ScalarField& u, const FlowParams& fp) {
  if (!fp.H) throw Error(ErrorKind::input, "flow parameters carry no Hamiltonian");
  if (!fp.verify) return;
  if (fp.truncation == Truncation::oscillation) {
    double osc = u.oscillation();
    if (osc > fp.bound * (1 + 1e-12) + 1e-300)
      throw Error(ErrorKind::locality, "field oscillation exceeds the bound used for the radius");
  } else if (fp.truncation == Truncation::lipschitz) {
    double lip = discrete_lipschitz(u);
    if (lip > fp.bound * (1 + 1e-9))
      throw Error(ErrorKind::locality, "field Lipschitz constant " + format_double(lip) +
                                           " exceeds K = " + format_double(fp.bound));
  }
}

}  // namespace

void apply_up(const Stencil& st, const ScalarField& u, ScalarField& out) { apply<true>(st, u, out); }
void apply_down(const Stencil& st, const ScalarField& u, ScalarField& out) {
  apply<false>(st, u, out);
}
ArgFlow apply_up_at(const Stencil& st, const ScalarField& u, std::size_t node) {
  return apply_at<true>(st, u, node);
}
ArgFlow apply_down_at(const Stencil& st, const ScalarField& u, std::size_t node) {
  return apply_at<false>(st, u, node);
}

std::vector<std::uint8_t> valid_mask(const Grid& g, double radius, bool include_edge) {
  std::vector<std::uint8_t> m(g.size(), 1);
  if (include_edge) return m;
  const double r = std::max(radius, g.hmax());
  for (std::size_t i = 0; i < g.size(); ++i) m[i] = g.edge_distance(i) > r * (1 + 1e-12) ? 1 : 0;
  return m;
}

ScalarField flow_up(const ScalarField& u, const FlowParams& fp) {
  check_truncation(u, fp);
  Stencil st = build_stencil(*fp.H, u.grid, fp.t, fp.radius);
  ScalarField out;
  apply_up(st, u, out);
  return out;
}

ScalarField flow_down(const ScalarField& u, const FlowParams& fp) {
  check_truncation(u, fp);
  Stencil st = build_stencil(*fp.H, u.grid, fp.t, fp.radius);
  ScalarField out;
  apply_down(st, u, out);
  return out;
}

double discrete_lipschitz(const ScalarField& u) {
  const Grid& g = u.grid;
  const std::size_t n = g.size();
  std::vector<double> px(n), py(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto p = g.point(i);
    px[i] = p[0];
    py[i] = p[1];
  }
  std::vector<double> partial(n, 0.0);
  parallel_for(n, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      double m = 0;
      for (std::size_t j = i + 1; j < n; ++j) {
        double d = std::hypot(px[j] - px[i], py[j] - py[i]);
        double q = std::abs(u.values[j] - u.values[i]) / d;
        if (q > m) m = q;
      }
      partial[i] = m;
    }
  });
  return *std::max_element(partial.begin(), partial.end());
}

SemigroupDefect semigroup_defect(const HamiltonianModel& H, const CoercivityProfile& prof,
                                 const ScalarField& u, double t, double s) {
  const double osc = u.oscillation();
  FlowParams fs = FlowParams::from_oscillation(H, prof, osc, s);
  FlowParams ft = FlowParams::from_oscillation(H, prof, osc, t);
  FlowParams fts = FlowParams::from_oscillation(H, prof, osc, t + s);
  ScalarField a = flow_up(u, fts);
  ScalarField b = flow_up(flow_up(u, fs), ft);
  const double margin = std::max(fts.radius, ft.radius + fs.radius);
  SemigroupDefect d;
  d.valid = valid_mask(u.grid, margin, false);
  if (std::none_of(d.valid.begin(), d.valid.end(), [](auto v) { return v != 0; }))
    throw Error(ErrorKind::locality, "no node lies farther than the flow radius from the edge");
  d.defect = ScalarField(u.grid);
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!d.valid[i]) continue;
    d.defect.values[i] = std::abs(a.values[i] - b.values[i]);
    d.max_defect = std::max(d.max_defect, d.defect.values[i]);
  }
  return d;
}

bool on_lattice(const ScalarField& u) {
  for (double v : u.values)
    if (std::abs(v) >= 1 << 15 || lattice_round(v) != v) return false;
  return true;
}

FlowLawReport verify_flow_laws(const ScalarField& u, const FlowParams& fp, const ScalarField* v,
                               double c) {
  if (!fp.H) throw Error(ErrorKind::input, "flow parameters carry no Hamiltonian");
  Stencil st = build_stencil(*fp.H, u.grid, fp.t, fp.radius);
  ScalarField up, dn, upd, dnu;
  apply_up(st, u, up);
  apply_down(st, u, dn);
  apply_up(st, dn, upd);
  apply_down(st, up, dnu);
  FlowLawReport rep;
  rep.nodes_checked = u.size();
  const double umin = u.min();
  auto flag = [&](const char* law, std::size_t i, double amt) {
    if (amt > 0) rep.violations.push_back({law, i, amt});
  };
  for (std::size_t i = 0; i < u.size(); ++i) {
    flag("inf u <= T_t u", i, umin - dn.values[i]);
    flag("T_t u <= u", i, dn.values[i] - u.values[i]);
    flag("u <= T^t u", i, u.values[i] - up.values[i]);
    flag("T^t T_t u <= u", i, upd.values[i] - u.values[i]);
    flag("u <= T_t T^t u", i, u.values[i] - dnu.values[i]);
  }
  if (v) {
    if (!v->grid.same_as(u.grid)) throw Error(ErrorKind::grid_mismatch, "v grid differs from u");
    ScalarField vu, vd;
    apply_up(st, *v, vu);
    apply_down(st, *v, vd);
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (u.values[i] > v->values[i]) continue;
      flag("monotone T^t", i, up.values[i] - vu.values[i]);
      flag("monotone T_t", i, dn.values[i] - vd.values[i]);
    }
  }
  ScalarField shifted = u;
  for (double& x : shifted.values) x += c;
  if (on_lattice(u) && on_lattice(shifted) && lattice_round(c) == c) {
    rep.commutation_checked = true;
    ScalarField su, sd;
    apply_up(st, shifted, su);
    apply_down(st, shifted, sd);
    for (std::size_t i = 0; i < u.size(); ++i) {
      flag("T^t(u+c) = T^t u + c", i, std::abs(su.values[i] - (up.values[i] + c)));
      flag("T_t(u+c) = T_t u + c", i, std::abs(sd.values[i] - (dn.values[i] + c)));
    }
  }
  return rep;
}

}  // namespace hlx
