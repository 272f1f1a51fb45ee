#include "hlx/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <fstream>
#include <map>
#include <sstream>

#include "hlx/error.hpp"
#include "hlx/extreal.hpp"
#include "hlx/parallel.hpp"

namespace hlx {

namespace {

constexpr std::size_t kMaxWitnesses = 16;

void add_witness(CriterionSection& s, Witness w) {
  s.pass = false;
  s.worst = std::max(s.worst, w.amount);
  s.witnesses.push_back(std::move(w));
  std::sort(s.witnesses.begin(), s.witnesses.end(),
            [](const Witness& a, const Witness& b) { return a.amount > b.amount; });
  if (s.witnesses.size() > kMaxWitnesses) s.witnesses.resize(kMaxWitnesses);
}

std::vector<Vec> defect_gradients(int dims, double K) {
  std::vector<Vec> ps;
  const int mags = 12;
  auto dirs = sphere_directions(dims, dims == 1 ? 2 : 48);
  for (int m = 1; m <= mags; ++m)
    for (const auto& d : dirs) ps.push_back(d * (K * m / mags));
  return ps;
}

// Neighbour lists: 2 in 1D, 8 in 2D.
template <class F>
void for_neighbours(const Grid& g, std::size_t i, F&& f) {
  auto c = g.coords(i);
  const int r1 = g.dims > 1 ? 1 : 0;
  for (int a = -1; a <= 1; ++a)
    for (int b = -r1; b <= r1; ++b) {
      if (a == 0 && b == 0) continue;
      int i0 = c[0] + a, i1 = c[1] + b;
      if (i0 < 0 || i0 >= g.n[0]) continue;
      if (g.dims > 1 && (i1 < 0 || i1 >= g.n[1])) continue;
      f(g.index(i0, g.dims > 1 ? i1 : 0));
    }
}

double node_distance(const Grid& g, std::size_t a, std::size_t b) {
  auto pa = g.point(a), pb = g.point(b);
  return std::hypot(pa[0] - pb[0], pa[1] - pb[1]);
}

// C_k over integer lattice offsets in [-D0, D0] x [-D1, D1].
struct ConeTable {
  int D0 = 0, D1 = 0;
  std::vector<double> v;
  double K_k = 0.0;
  double gap = 0.0;  // relative undershoot of the sampled level set, 1 - cos(half the widest angle gap)
  double at(int a, int b) const { return v[static_cast<std::size_t>(a + D0) * (2 * D1 + 1) + (b + D1)]; }
};

ConeTable cone_table(const HamiltonianModel& H, const Grid& g, double k, int D0, int D1,
                     int directions) {
  ConeOptions co;
  co.directions = directions;
  ConeData cd = cone_data(H, k, co);
  ConeTable t;
  t.D0 = D0;
  t.D1 = g.dims > 1 ? D1 : 0;
  t.K_k = cd.K_k;
  if (g.dims > 1 && cd.level_set.size() > 1) {
    std::vector<double> ang;
    for (const auto& p : cd.level_set) ang.push_back(std::atan2(p[1], p[0]));
    std::sort(ang.begin(), ang.end());
    double widest = ang.front() + 2 * std::numbers::pi - ang.back();
    for (std::size_t i = 1; i < ang.size(); ++i) widest = std::max(widest, ang[i] - ang[i - 1]);
    t.gap = 1 - std::cos(std::min(widest, std::numbers::pi) / 2);
  }
  t.v.resize(static_cast<std::size_t>(2 * t.D0 + 1) * (2 * t.D1 + 1));
  parallel_for(static_cast<std::size_t>(2 * t.D0 + 1), [&](std::size_t b, std::size_t e) {
    for (std::size_t ia = b; ia < e; ++ia)
      for (int bb = -t.D1; bb <= t.D1; ++bb) {
        int a = static_cast<int>(ia) - t.D0;
        t.v[ia * (2 * t.D1 + 1) + (bb + t.D1)] = cd.value(a * g.h[0], g.dims > 1 ? bb * g.h[1] : 0.0);
      }
  });
  return t;
}

std::vector<double> default_k_grid() { return {0.0, 0.125, 0.25, 0.5, 1.0, 2.0}; }

}  // namespace

std::string CriterionSection::summary_line() const {
  std::ostringstream os;
  os << criterion << ',' << (pass ? "pass" : "fail") << ',' << format_double(worst) << ',';
  if (witnesses.empty()) {
    os << "none";
  } else {
    const Witness& w = witnesses.front();
    os << w.kind << ":node=" << w.node;
    if (w.t_b > 0) os << ";t=" << format_double(w.t_a) << '/' << format_double(w.t_b);
    if (w.kind.rfind("cone", 0) == 0)
      os << ";k=" << format_double(w.k) << ";V=" << w.square[0] << '-' << w.square[1] << 'x'
         << w.square[2] << '-' << w.square[3] << ";x0=" << w.vertex_cell[0] << ' '
         << w.vertex_cell[1];
  }
  return os.str();
}

double lattice_defect(const HamiltonianModel& H, const Stencil& st, const Grid& g, double K) {
  double worst = 0;
  for (const Vec& p : defect_gradients(g.dims, K)) {
    if (!H.box().contains(p)) continue;
    double best = -kInf;
    for (std::size_t k = 0; k < st.size(); ++k) {
      if (is_inf(st.up[k])) continue;
      double pz = p[0] * st.d0[k] * g.h[0] + (g.dims > 1 ? p[1] * st.d1[k] * g.h[1] : 0.0);
      best = std::max(best, pz - st.up[k]);
    }
    worst = std::max(worst, st.t * H(p) - best);
  }
  return std::max(worst, 0.0);
}

std::vector<double> default_ladder(const HamiltonianModel& H, const CoercivityProfile& prof,
                                   const ScalarField& u, const CriteriaConfig& cfg) {
  const Grid& g = u.grid;
  const double h = g.hmax();
  const double K = std::max(discrete_lipschitz(u), 1e-12);
  const double R = cfg.ladder_radius > 0 ? cfg.ladder_radius : g.diameter();
  const double tz = t_zero(std::max(u.oscillation(), 1e-12), R, prof);
  int m_lo = 0;
  for (int m = 1; m <= 64; ++m) {
    double t = m * h;
    if (t >= tz) break;
    Stencil st = build_stencil(H, g, t, prof.lipschitz_reach(K) * t);
    if (lattice_defect(H, st, g, K) / t <= cfg.resolution) {
      m_lo = m;
      break;
    }
  }
  if (m_lo == 0)
    throw Error(ErrorKind::resolution, "no multiple of h below t_zero resolves the flow slope");
  const int step = std::max(1, m_lo / 2);
  std::vector<double> ladder;
  for (int i = 0; i < cfg.ladder_points; ++i) {
    double t = (m_lo + i * step) * h;
    if (t >= tz) break;
    ladder.push_back(t);
  }
  if (ladder.size() < 3)
    throw Error(ErrorKind::resolution, "fewer than three ladder times fit below t_zero");
  return ladder;
}

SPlusField s_plus(const HamiltonianModel& H, const CoercivityProfile& prof, const ScalarField& u,
                  const CriteriaConfig& cfg) {
  for (double v : u.values)
    if (!std::isfinite(v) || is_inf(std::abs(v))) throw Error(ErrorKind::input, "field must be finite");
  SPlusField sp;
  sp.ladder = cfg.ladder.empty() ? default_ladder(H, prof, u, cfg) : cfg.ladder;
  if (sp.ladder.empty()) throw Error(ErrorKind::input, "ladder is empty");
  std::sort(sp.ladder.begin(), sp.ladder.end());
  if (!(sp.ladder.front() > 0)) throw Error(ErrorKind::input, "ladder times must be positive");
  const Grid& g = u.grid;
  const double R = cfg.ladder_radius > 0 ? cfg.ladder_radius : g.diameter();
  if (!(sp.ladder.back() < t_zero(std::max(u.oscillation(), 1e-12), R, prof)))
    throw Error(ErrorKind::locality, "ladder exceeds t_zero(osc u, R)");

  sp.lipschitz = discrete_lipschitz(u);
  const double K = std::max(sp.lipschitz, 1e-12) * (1 + 1e-9);
  const double reach = prof.lipschitz_reach(K);
  const std::size_t n = u.size(), L = sp.ladder.size();

  // Edge-masked copy: a flow that changes when edge sources disappear had its
  // maximiser on the grid edge, so the node is not resolved inside the grid.
  ScalarField masked = u;
  for (std::size_t i = 0; i < n; ++i)
    if (g.edge_distance(i) <= 0) masked.values[i] = -kInf;
  sp.valid.assign(n, 1);
  for (std::size_t i = 0; i < n; ++i)
    if (g.edge_distance(i) <= 0) sp.valid[i] = 0;
  for (double t : sp.ladder) {
    Stencil st = build_stencil(H, g, t, reach * t);
    sp.radius = std::max(sp.radius, st.radius);
    ScalarField f, fm;
    apply_up(st, u, f);
    apply_up(st, masked, fm);
    for (std::size_t i = 0; i < n; ++i)
      if (f.values[i] != fm.values[i]) sp.valid[i] = 0;
    sp.defect.push_back(lattice_defect(H, st, g, K));
    sp.flows.push_back(std::move(f));
  }
  sp.resolution = sp.defect.front() / sp.ladder.front();
  sp.min_prefix = std::max<int>(2, static_cast<int>((L + 1) / 2));

  sp.value = ScalarField(g);
  sp.approximate.assign(n, 0);
  sp.saturated.assign(n, 0);
  sp.prefix.assign(n, 0);
  sp.worst_triple.assign(n, 0.0);
  sp.worst_index.assign(n, 0);
  // Points (t_0 = 0, u), (t_i, T^{t_i} u). Triples centred at j use the
  // neighbours j-1, j+1 and the origin with j+1 (slope monotonicity).
  std::vector<double> ts(L + 1), es(L + 1);
  ts[0] = 0;
  es[0] = 0;
  for (std::size_t i = 0; i < L; ++i) {
    ts[i + 1] = sp.ladder[i];
    es[i + 1] = sp.defect[i];
  }
  auto triple = [&](const std::vector<double>& v, std::size_t a, std::size_t b, std::size_t c) {
    double wa = (ts[c] - ts[b]) / (ts[c] - ts[a]), wc = (ts[b] - ts[a]) / (ts[c] - ts[a]);
    double tol = cfg.base_tol + cfg.defect_factor * (wa * es[a] + wc * es[c]);
    return v[b] - (wa * v[a] + wc * v[c]) - tol;
  };
  parallel_for(n, [&](std::size_t b, std::size_t e) {
    std::vector<double> v(L + 1);
    for (std::size_t i = b; i < e; ++i) {
      v[0] = u.values[i];
      for (std::size_t j = 0; j < L; ++j) v[j + 1] = sp.flows[j].values[i];
      int prefix = static_cast<int>(L);
      double worst = 0;
      std::size_t widx = 0;
      for (std::size_t j = 1; j < L; ++j) {
        double d = std::max(triple(v, j - 1, j, j + 1), triple(v, 0, j, j + 1));
        if (d > 0 && prefix == static_cast<int>(L)) prefix = static_cast<int>(j);
        if (d > worst) {
          worst = d;
          widx = j;
        }
      }
      sp.prefix[i] = prefix;
      sp.worst_triple[i] = worst;
      sp.worst_index[i] = widx;
      double vmax = *std::max_element(v.begin() + prefix, v.end());
      double vmin = *std::min_element(v.begin() + prefix, v.end());
      sp.saturated[i] = vmax - vmin <= cfg.base_tol ? 1 : 0;
      if (prefix >= sp.min_prefix || sp.saturated[i]) {
        double s = kInf;
        for (int j = 1; j <= prefix; ++j) s = std::min(s, (v[j] - v[0]) / ts[j]);
        sp.value.values[i] = s;
      } else {
        double s1 = (v[1] - v[0]) / ts[1], s2 = (v[2] - v[0]) / ts[2];
        sp.value.values[i] = s1 - ts[1] * (s2 - s1) / (ts[2] - ts[1]);
        sp.approximate[i] = 1;
      }
    }
  });
  sp.mode_note = "min over the convex ladder prefix; Richardson on the two smallest times when the prefix is shorter than min_prefix";
  return sp;
}

CriterionSection check_convexity_criterion(const SPlusField& sp, const std::vector<std::uint8_t>& V) {
  CriterionSection s;
  s.criterion = "convexity";
  const std::size_t n = sp.value.size();
  if (!V.empty() && V.size() != n) throw Error(ErrorKind::grid_mismatch, "node subset size differs");
  s.node_pass.assign(n, 0);
  const int L = static_cast<int>(sp.ladder.size());
  for (std::size_t i = 0; i < n; ++i) {
    bool in = V.empty() ? sp.valid[i] != 0 : V[i] != 0;
    if (!in) continue;
    if (!sp.valid[i])
      throw Error(ErrorKind::margin, "node " + std::to_string(i) + " lacks the flow margin");
    ++s.checked;
    bool node_ok = sp.prefix[i] >= sp.min_prefix || sp.saturated[i];
    s.node_pass[i] = node_ok ? 1 : 0;
    if (sp.prefix[i] < L) {
      Witness w;
      w.kind = node_ok ? "delta" : "convexity";
      w.node = i;
      std::size_t j = sp.worst_index[i];
      w.t_a = j >= 1 ? sp.ladder[j - 1] : 0.0;
      w.t_b = sp.ladder[std::min<std::size_t>(j + 1, L - 1)];
      w.amount = sp.worst_triple[i];
      add_witness(s, w);
    }
  }
  if (s.checked == 0) throw Error(ErrorKind::margin, "no node has the flow margin for the ladder");
  s.tol = sp.defect.empty() ? 0.0 : *std::max_element(sp.defect.begin(), sp.defect.end());
  return s;
}

LipschitzFromCones lipschitz_from_cones(const HamiltonianModel& H, const ScalarField& u, double R) {
  if (!(R > 0)) throw Error(ErrorKind::input, "R must be positive");
  const double osc = u.oscillation();
  if (!std::isfinite(osc)) throw Error(ErrorKind::input, "oscillation must be finite");
  for (double k : cone_k_table()) {
    std::pair<double, double> mk;
    try {
      mk = cone_constants(H, k);
    } catch (const Error&) {
      break;
    }
    if (osc / R <= mk.first * (1 + 1e-12) + 1e-15) return {k, mk.first, mk.second};
  }
  throw Error(ErrorKind::resolution, "k-table exhausted before M_k reached osc/R");
}

std::vector<double> cone_k_table() {
  std::vector<double> ks{0.0};
  for (int j = -64; j <= 64; ++j) ks.push_back(std::exp2(j / 4.0));
  return ks;
}

CriterionSection check_pointwise_criterion(const HamiltonianModel& H, const SPlusField& sp,
                                           const ScalarField& u, const CriteriaConfig& cfg) {
  CriterionSection s = check_convexity_criterion(sp);
  s.criterion = "pointwise";
  // Only nodes failing the per-node test are convexity witnesses here.
  auto wit = std::move(s.witnesses);
  s.witnesses.clear();
  s.pass = true;
  s.worst = 0;
  for (auto& w : wit)
    if (w.kind == "convexity") add_witness(s, w);
  const Grid& g = u.grid;
  double slope = cfg.usc_slope;
  if (!(slope > 0)) slope = lipschitz_from_cones(H, u, g.diameter() / 2).A_R;
  const double tol = cfg.usc_tol + 2 * sp.resolution + slope * g.hmax() + cfg.base_tol;
  s.tol = tol;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!sp.valid[i]) continue;
    double nb = -kInf;
    for_neighbours(g, i, [&](std::size_t j) {
      if (sp.valid[j]) nb = std::max(nb, sp.value.values[j]);
    });
    if (is_neg_inf(nb)) continue;
    double d = nb - sp.value.values[i] - tol;
    if (d > 0) {
      s.node_pass[i] = 0;
      Witness w;
      w.kind = "usc";
      w.node = i;
      w.amount = d;
      add_witness(s, w);
    }
  }
  return s;
}

namespace {

struct Square {
  int a0, b0, a1, b1;  // inclusive node ranges
};

CriterionSection cone_comparison(const HamiltonianModel& H, const ScalarField& u,
                                 const CriteriaConfig& cfg, bool above) {
  CriterionSection s;
  s.criterion = above ? "cone_above" : "cone_below";
  const Grid& g = u.grid;
  const bool two = g.dims > 1;
  const double lip = discrete_lipschitz(u);
  std::vector<double> ks = cfg.k_grid.empty() ? default_k_grid() : cfg.k_grid;
  const int smax = *std::max_element(cfg.sides.begin(), cfg.sides.end());
  const int D = 3 * smax;
  s.node_pass.assign(u.size(), 1);

  std::vector<Square> squares;
  for (int side : cfg.sides) {
    if (side < 2) throw Error(ErrorKind::input, "square side must be at least two cells");
    const int stride = std::max(1, side / 2);
    const int n1 = two ? g.n[1] : 1;
    for (int a = 0; a + side < g.n[0]; a += stride)
      for (int b = 0; two ? b + side < n1 : b == 0; b += stride) {
        Square q{a, a + side, two ? b : 0, two ? b + side : 0};
        bool touches = false;
        for (int i0 = q.a0; i0 <= q.b0 && !touches; ++i0)
          for (int i1 = q.a1; i1 <= q.b1; ++i1)
            if (u.boundary[g.index(i0, i1)]) {
              touches = true;
              break;
            }
        if (!touches) squares.push_back(q);
      }
  }
  if (squares.empty()) throw Error(ErrorKind::input, "no test square avoids the boundary mask");

  for (double k : ks) {
    ConeTable ct;
    try {
      ct = cone_table(H, g, k, D, D, cfg.cone_directions);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::level) continue;
      throw;
    }
    const double tol = cfg.cone_tol + (lip + ct.K_k) * g.hmax() / 2;
    s.tol = std::max(s.tol, tol);
    std::vector<CriterionSection> partial(squares.size());
    parallel_for(squares.size(), [&](std::size_t qb, std::size_t qe) {
      for (std::size_t qi = qb; qi < qe; ++qi) {
        const Square& q = squares[qi];
        const int side = q.b0 - q.a0;
        for (int j0 = -2; j0 <= 3; ++j0)
          for (int j1 = two ? -2 : 0; j1 <= (two ? 3 : 0); ++j1) {
            const int x0 = q.a0 + j0 * side, x1 = q.a1 + j1 * side;
            double in_best = -kInf, bd_best = -kInf;
            std::size_t in_node = 0;
            for (int i0 = q.a0; i0 <= q.b0; ++i0)
              for (int i1 = q.a1; i1 <= q.b1; ++i1) {
                const std::size_t idx = g.index(i0, i1);
                const double c = above ? ct.at(i0 - x0, i1 - x1) : ct.at(x0 - i0, x1 - i1);
                const double w = above ? u.values[idx] - c : -(u.values[idx] + c);
                const bool bd = i0 == q.a0 || i0 == q.b0 || (two && (i1 == q.a1 || i1 == q.b1));
                if (bd) {
                  bd_best = std::max(bd_best, w);
                } else if (w > in_best) {
                  in_best = w;
                  in_node = idx;
                }
              }
            ++partial[qi].checked;
            const double d = in_best - bd_best - tol;
            if (d > 0) {
              Witness w;
              w.kind = above ? "cone_above" : "cone_below";
              w.node = in_node;
              w.k = k;
              w.square = {q.a0, q.b0, q.a1, q.b1};
              w.vertex_cell = {x0, x1};
              w.amount = d;
              add_witness(partial[qi], w);
            }
          }
      }
    });
    for (auto& p : partial) {
      s.checked += p.checked;
      for (auto& w : p.witnesses) {
        s.node_pass[w.node] = 0;
        add_witness(s, w);
      }
    }
  }
  return s;
}

}  // namespace

CriterionSection check_cone_comparison_above(const HamiltonianModel& H, const ScalarField& u,
                                             const CriteriaConfig& cfg) {
  return cone_comparison(H, u, cfg, true);
}

CriterionSection check_cone_comparison_below(const HamiltonianModel& H, const ScalarField& u,
                                             const CriteriaConfig& cfg) {
  return cone_comparison(H, u, cfg, false);
}

GradientConeReport gradient_cone_equivalence(const HamiltonianModel& H, const ScalarField& u,
                                             double k, const GradientConeOptions& opt) {
  GradientConeReport rep;
  rep.k = k;
  const Grid& g = u.grid;
  const bool two = g.dims > 1;
  const double cap = opt.chord_cap > 0 ? opt.chord_cap : g.diameter() / 4;
  const int D0 = static_cast<int>(std::floor(cap / g.h[0] + 1e-9));
  const int D1 = two ? static_cast<int>(std::floor(cap / g.h[1] + 1e-9)) : 0;
  ConeTable ct = cone_table(H, g, k, D0, D1, 0);

  // Direction A: u(x) - u(y) <= C_k(x - y) on chords up to the cap.
  for (std::size_t x = 0; x < u.size(); ++x) {
    auto cx = g.coords(x);
    for (int a = -D0; a <= D0; ++a)
      for (int b = -D1; b <= D1; ++b) {
        if (a == 0 && b == 0) continue;
        if (std::hypot(a * g.h[0], two ? b * g.h[1] : 0.0) > cap * (1 + 1e-12)) continue;
        int y0 = cx[0] - a, y1 = cx[1] - b;
        if (y0 < 0 || y0 >= g.n[0] || (two && (y1 < 0 || y1 >= g.n[1]))) continue;
        std::size_t y = g.index(y0, two ? y1 : 0);
        double len = node_distance(g, x, y);
        double d = u.values[x] - u.values[y] - ct.at(a, b) - opt.tol - (ct.gap + 1e-9) * ct.K_k * len;
        if (d > rep.chord_worst) {
          rep.chord_worst = d;
          rep.chord_x = x;
          rep.chord_y = y;
        }
      }
  }
  rep.chord_holds = rep.chord_worst <= 0;

  // Direction B: every one-sided difference combination mapped through H.
  const double slack = k + opt.slope_c * std::max(1.0, ct.K_k * ct.K_k) * g.hmax() + opt.tol;
  std::size_t interior = 0, bad = 0;
  for (std::size_t x = 0; x < u.size(); ++x) {
    auto c = g.coords(x);
    bool edge = c[0] == 0 || c[0] == g.n[0] - 1 || (two && (c[1] == 0 || c[1] == g.n[1] - 1));
    if (edge) continue;
    ++interior;
    double f0 = (u.values[g.index(c[0] + 1, c[1])] - u.values[x]) / g.h[0];
    double b0 = (u.values[x] - u.values[g.index(c[0] - 1, c[1])]) / g.h[0];
    double worst = -kInf;
    if (two) {
      double f1 = (u.values[g.index(c[0], c[1] + 1)] - u.values[x]) / g.h[1];
      double b1 = (u.values[x] - u.values[g.index(c[0], c[1] - 1)]) / g.h[1];
      for (double p0 : {f0, b0})
        for (double p1 : {f1, b1}) {
          Vec p(2);
          p << p0, p1;
          worst = std::max(worst, H.box().contains(p) ? H(p) : kInf);
        }
    } else {
      for (double p0 : {f0, b0}) {
        Vec p(1);
        p << p0;
        worst = std::max(worst, H.box().contains(p) ? H(p) : kInf);
      }
    }
    double d = worst - slack;
    if (d > 0) ++bad;
    if (d > rep.gradient_worst) {
      rep.gradient_worst = d;
      rep.gradient_node = x;
    }
  }
  rep.violating_fraction = interior ? static_cast<double>(bad) / interior : 0.0;
  const double allowed = opt.fraction > 0 ? opt.fraction : 4 * g.hmax() / g.diameter();
  rep.gradient_holds = rep.violating_fraction <= allowed;
  rep.agree = rep.chord_holds == rep.gradient_holds;
  return rep;
}

SlopeCheck increasing_slope_check(const HamiltonianModel& H, const ScalarField& u,
                                  const SPlusField& sp, std::size_t node, std::size_t ladder_index,
                                  double tol) {
  if (ladder_index >= sp.ladder.size()) throw Error(ErrorKind::input, "ladder index out of range");
  if (node >= u.size() || !sp.valid[node])
    throw Error(ErrorKind::margin, "node lacks the flow margin");
  const double t = sp.ladder[ladder_index];
  const double K = std::max(sp.lipschitz, 1e-12) * (1 + 1e-9);
  Stencil st = build_stencil(H, u.grid, t, sp.radius);
  ArgFlow af = apply_up_at(st, u, node);
  SlopeCheck c;
  c.argmax = af.arg;
  if (!sp.valid[af.arg]) throw Error(ErrorKind::margin, "flow argmax lies outside the valid region");
  c.slope = (af.value - u.values[node]) / t;
  c.splus_at_argmax = sp.value.values[af.arg];
  c.tol = tol + sp.resolution + sp.defect[ladder_index] / t + 1e-9 * (1 + K);
  c.pass = c.slope <= c.splus_at_argmax + c.tol;
  return c;
}

EquivalenceReport check_equivalences(const HamiltonianModel& H, const CoercivityProfile& prof,
                                     const ScalarField& u, const CriteriaConfig& cfg) {
  EquivalenceReport r;
  r.splus = s_plus(H, prof, u, cfg);
  r.cone = check_cone_comparison_above(H, u, cfg);
  r.convexity = check_convexity_criterion(r.splus);
  r.pointwise = check_pointwise_criterion(H, r.splus, u, cfg);
  r.agree = r.cone.pass == r.convexity.pass && r.convexity.pass == r.pointwise.pass;
  r.verdict = !r.agree ? "disagree" : r.cone.pass ? "pass" : "fail";
  return r;
}

void write_splus_csv(const std::string& path, const SPlusField& sp) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorKind::input, "cannot write " + path);
  os << "node,x,y,valid,splus,approximate,saturated,prefix\n";
  for (std::size_t i = 0; i < sp.value.size(); ++i) {
    auto p = sp.value.grid.point(i);
    os << i << ',' << format_double(p[0]) << ',' << format_double(p[1]) << ','
       << int(sp.valid[i]) << ',' << format_double(sp.value.values[i]) << ','
       << int(sp.approximate[i]) << ',' << int(sp.saturated[i]) << ',' << sp.prefix[i] << '\n';
  }
}

}  // namespace hlx
