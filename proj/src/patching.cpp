#include "hlx/patching.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <queue>
#include <sstream>

#include "hlx/error.hpp"
#include "hlx/extreal.hpp"
#include "hlx/geometry.hpp"
#include "hlx/hopflax.hpp"
#include "hlx/parallel.hpp"

namespace hlx {

namespace {

struct Step {
  int d0, d1;
  double cost;  // C_gamma of the step, direction of travel
  double back;  // C_gamma of the reverse step
};

// Primitive offsets with max-norm <= R; R = 1 gives the 8 (2D) or 2 (1D) neighbours.
std::vector<Step> neighbour_steps(const Grid& g, const ConeData& cd, int R) {
  std::vector<Step> s;
  const bool two = g.dims > 1;
  if (!two) R = 1;
  for (int a = -R; a <= R; ++a)
    for (int b = two ? -R : 0; b <= (two ? R : 0); ++b) {
      if (std::gcd(a, b) != 1) continue;
      double z0 = a * g.h[0], z1 = two ? b * g.h[1] : 0.0;
      s.push_back({a, b, cd.value(z0, z1), cd.value(-z0, -z1)});
    }
  return s;
}

bool inside(const Grid& g, int i0, int i1) {
  return i0 >= 0 && i0 < g.n[0] && (g.dims == 1 || (i1 >= 0 && i1 < g.n[1]));
}

// Least chain cost from 0 to each offset in [-S, S]^d using unit steps.
std::vector<double> chain_costs(const Grid& g, const std::vector<Step>& steps, int S) {
  const bool two = g.dims > 1;
  const int W = 2 * S + 1;
  const int H1 = two ? W : 1;
  std::vector<double> d(static_cast<std::size_t>(W) * H1, kInf);
  auto at = [&](int a, int b) -> double& { return d[static_cast<std::size_t>(a + S) * H1 + (two ? b + S : 0)]; };
  at(0, 0) = 0;
  for (int pass = 0; pass < 4 * W; ++pass) {
    bool changed = false;
    for (int a = -S; a <= S; ++a)
      for (int b = two ? -S : 0; b <= (two ? S : 0); ++b) {
        double cur = at(a, b);
        if (is_inf(cur)) continue;
        for (const auto& s : steps) {
          int a2 = a + s.d0, b2 = b + s.d1;
          if (std::abs(a2) > S || std::abs(b2) > S) continue;
          if (cur + s.cost < at(a2, b2)) {
            at(a2, b2) = cur + s.cost;
            changed = true;
          }
        }
      }
    if (!changed) break;
  }
  return d;
}

// Largest H over the one-sided difference gradients at an interior node.
double upwind_slope(const HamiltonianModel& H, const ScalarField& u, std::size_t x) {
  const Grid& g = u.grid;
  auto c = g.coords(x);
  double best = -kInf;
  std::vector<double> d[2];
  for (int a = 0; a < g.dims; ++a)
    for (int s : {-1, 1}) {
      int i0 = c[0] + (a == 0 ? s : 0), i1 = c[1] + (a == 1 ? s : 0);
      if (!inside(g, i0, i1)) continue;
      d[a].push_back(s * (u[g.index(i0, g.dims > 1 ? i1 : 0)] - u[x]) / g.h[a]);
    }
  Vec p(g.dims);
  for (double a : d[0]) {
    p[0] = a;
    if (g.dims == 1) {
      best = std::max(best, H(p));
      continue;
    }
    for (double b : d[1]) {
      p[1] = b;
      best = std::max(best, H(p));
    }
  }
  return best;
}

void check_inputs(const ScalarField& u, double gamma) {
  if (!(gamma > 0) || !std::isfinite(gamma)) throw Error(ErrorKind::input, "gamma must be positive");
  for (double v : u.values)
    if (!std::isfinite(v)) throw Error(ErrorKind::input, "field has non-finite values");
}

}  // namespace

std::string PatchClaims::summary_line(double gamma) const {
  std::ostringstream os;
  os << "patch,gamma=" << format_double(gamma) << ',' << (all() ? "pass" : "fail")
     << ",below=" << format_double(below_worst) << ",boundary=" << (boundary_equal ? 1 : 0)
     << ",cone=" << format_double(cone_worst) << ",flow_identity=" << format_double(flow_identity_worst)
     << ",flow_equal=" << format_double(flow_equal_worst) << ",splus_min=" << format_double(splus_min)
     << ",pointwise=" << (pointwise ? 1 : 0);
  return os.str();
}

PatchResult patch(const HamiltonianModel& H, const CoercivityProfile& prof, const ScalarField& u_in,
                  double gamma, const PatchOptions& opt, const SPlusField* splus) {
  check_inputs(u_in, gamma);
  ScalarField u = u_in;
  if (std::none_of(u.boundary.begin(), u.boundary.end(), [](auto b) { return b != 0; }))
    u.mark_edge_boundary();
  const Grid& g = u.grid;
  const bool two = g.dims > 1;

  SPlusField own;
  if (!splus) {
    own = s_plus(H, prof, u, opt.criteria);
    splus = &own;
  }
  if (!splus->value.grid.same_as(g)) throw Error(ErrorKind::grid_mismatch, "S+ field grid differs");
  if (opt.require_pointwise) {
    auto pw = check_pointwise_criterion(H, *splus, u, opt.criteria);
    if (!pw.pass) throw Error(ErrorKind::precondition, "pointwise criterion fails: " + pw.summary_line());
  }

  PatchResult r;
  r.gamma = gamma;
  const std::size_t N = g.size();
  r.V.assign(N, 0);
  r.closure.assign(N, 0);
  r.dV.assign(N, 0);
  r.margin = opt.margin >= 0 ? opt.margin : splus->resolution;
  for (std::size_t i = 0; i < N; ++i) {
    if (u.boundary[i]) continue;
    double s = splus->valid[i] ? splus->value[i] + r.margin : upwind_slope(H, u, i);
    r.V[i] = s < gamma;
  }

  ConeData cd = cone_data(H, gamma);
  const auto unit = neighbour_steps(g, cd, 1);
  const auto steps = neighbour_steps(g, cd, std::max(1, opt.step_reach));
  auto nbr = [&](std::size_t i, const Step& s, std::size_t* j) {
    auto c = g.coords(i);
    int a = c[0] + s.d0, b = c[1] + s.d1;
    if (!inside(g, a, b)) return false;
    *j = g.index(a, two ? b : 0);
    return true;
  };
  for (std::size_t i = 0; i < N; ++i) {
    if (!r.V[i]) continue;
    r.closure[i] = 1;
    std::size_t j;
    for (const auto& s : unit)
      if (nbr(i, s, &j) && !r.V[j]) r.dV[j] = r.closure[j] = 1;
  }
  // Long steps must pass between closure nodes.
  auto step_ok = [&](std::size_t i, const Step& s, std::size_t* j) {
    if (!nbr(i, s, j) || !r.closure[*j]) return false;
    auto c = g.coords(i);
    const int L = std::max(std::abs(s.d0), std::abs(s.d1));
    for (int k = 1; k < L; ++k) {
      double f0 = c[0] + s.d0 * double(k) / L, f1 = c[1] + s.d1 * double(k) / L;
      for (int q0 : {int(std::floor(f0)), int(std::ceil(f0))})
        for (int q1 : {int(std::floor(f1)), int(std::ceil(f1))})
          if (!r.closure[g.index(q0, two ? q1 : 0)]) return false;
    }
    return true;
  };

  // Components of V.
  std::vector<int> comp(N, -1);
  std::vector<std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < N; ++i) {
    if (!r.V[i] || comp[i] >= 0) continue;
    const int id = static_cast<int>(members.size());
    members.emplace_back();
    std::vector<std::size_t> stack{i};
    comp[i] = id;
    while (!stack.empty()) {
      std::size_t x = stack.back();
      stack.pop_back();
      members[id].push_back(x);
      std::size_t j;
      for (const auto& s : unit)
        if (nbr(x, s, &j) && r.V[j] && comp[j] < 0) {
          comp[j] = id;
          stack.push_back(j);
        }
    }
  }
  r.components = members.size();

  // w = -v; w(x) = min_y w(y) + C(y - x) over closure neighbours, w = -u on dV.
  std::vector<double> w(N, kInf);
  std::vector<std::uint8_t> orphan(members.size(), 0);
  parallel_for(members.size(), [&](std::size_t cb, std::size_t ce) {
    using Item = std::pair<double, std::size_t>;
    for (std::size_t c = cb; c < ce; ++c) {
      std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
      std::vector<std::size_t> sources;
      for (std::size_t x : members[c]) {
        std::size_t j;
        for (const auto& s : steps)
          if (step_ok(x, s, &j) && r.dV[j]) sources.push_back(j);
      }
      std::sort(sources.begin(), sources.end());
      sources.erase(std::unique(sources.begin(), sources.end()), sources.end());
      if (sources.empty()) {
        orphan[c] = 1;
        continue;
      }
      for (std::size_t b : sources) pq.push({-u[b], b});
      while (!pq.empty()) {
        auto [key, y] = pq.top();
        pq.pop();
        if (r.V[y] && key > w[y]) continue;
        std::size_t x;
        for (const auto& s : steps) {
          // x = y + s, so the step x -> y is -s
          if (!step_ok(y, s, &x) || comp[x] != static_cast<int>(c)) continue;
          double cand = key + s.back;
          if (cand < w[x]) {
            w[x] = cand;
            pq.push({cand, x});
          }
        }
      }
    }
  });
  for (std::size_t c = 0; c < members.size(); ++c)
    if (orphan[c])
      throw Error(ErrorKind::topology, "low-slope component without boundary neighbours");

  r.v_gamma = ScalarField(g, -kInf);
  r.v_gamma.boundary = u.boundary;
  r.u_gamma = u;
  for (std::size_t i = 0; i < N; ++i) {
    if (r.dV[i]) r.v_gamma[i] = u[i];
    if (r.V[i]) {
      if (is_inf(w[i])) throw Error(ErrorKind::topology, "low-slope node unreachable");
      r.v_gamma[i] = -w[i];
      r.u_gamma[i] = -w[i];
    }
  }
  r.u_gamma.invalidate();
  for (std::size_t i = 0; i < N; ++i) r.max_change = std::max(r.max_change, std::abs(u[i] - r.u_gamma[i]));
  if (!opt.verify) return r;

  PatchClaims& c = r.claims;
  c.verified = true;
  c.tol = opt.tol > 0 ? opt.tol : 5 * g.hmax();

  // Claim 1.
  c.below_worst = -kInf;
  for (std::size_t i = 0; i < N; ++i) {
    c.below_worst = std::max(c.below_worst, r.u_gamma[i] - u[i]);
    if (u.boundary[i] && r.u_gamma[i] != u[i]) c.boundary_equal = false;
  }
  c.below = c.below_worst <= 0;

  // Claim 2 on offsets up to segment_cells, segment sampled at nearest nodes.
  // Tolerance: excess of the 8-neighbour chain metric over C_gamma.
  const int S = std::max(1, opt.segment_cells);
  const int S1 = two ? S : 0;
  auto chain = chain_costs(g, unit, S);
  c.cone_tol = 1e-9;
  for (int a = -S; a <= S; ++a)
    for (int b = -S1; b <= S1; ++b) {
      if (a == 0 && b == 0) continue;
      double ch = chain[static_cast<std::size_t>(a + S) * (two ? 2 * S + 1 : 1) + (two ? b + S : 0)];
      c.cone_tol = std::max(c.cone_tol, ch - cd.value(a * g.h[0], b * g.h[1]) + 1e-9);
    }
  c.cone_worst = -kInf;
  for (std::size_t x = 0; x < N; ++x) {
    if (!r.V[x]) continue;
    auto cx = g.coords(x);
    for (int a = -S; a <= S; ++a)
      for (int b = -S1; b <= S1; ++b) {
        if (a == 0 && b == 0) continue;
        if (!inside(g, cx[0] + a, cx[1] + b)) continue;
        std::size_t y = g.index(cx[0] + a, two ? cx[1] + b : 0);
        if (!r.closure[y]) continue;
        bool seg = true;
        for (int k = 1; k < 2 * S && seg; ++k) {
          int p0 = cx[0] + static_cast<int>(std::lround(a * k / (2.0 * S)));
          int p1 = cx[1] + static_cast<int>(std::lround(b * k / (2.0 * S)));
          seg = r.closure[g.index(p0, two ? p1 : 0)] != 0;
        }
        if (!seg) continue;
        ++c.cone_pairs;
        double z0 = a * g.h[0], z1 = two ? b * g.h[1] : 0.0;
        c.cone_worst = std::max(c.cone_worst, r.v_gamma[x] - r.v_gamma[y] - cd.value(-z0, -z1));
        c.cone_worst = std::max(c.cone_worst, r.v_gamma[y] - r.v_gamma[x] - cd.value(z0, z1));
      }
  }
  if (c.cone_pairs == 0) c.cone_worst = 0;
  c.cone_bound = c.cone_worst <= c.cone_tol;

  SPlusField sg = s_plus(H, prof, r.u_gamma, opt.criteria);

  // Claims 3 and 4 at one flow time.
  c.t = opt.flow_t > 0 ? opt.flow_t : sg.ladder.front();
  const double K = std::max(discrete_lipschitz(u), discrete_lipschitz(r.u_gamma));
  Stencil st = build_stencil(H, g, c.t, prof.lipschitz_reach(K * (1 + 1e-9)) * c.t);
  ScalarField Tu(g), Tg(g);
  apply_up(st, u, Tu);
  apply_up(st, r.u_gamma, Tg);
  auto ball_ok = valid_mask(g, st.radius, false);
  for (std::size_t x = 0; x < N; ++x) {
    if (!ball_ok[x] || u.boundary[x]) continue;
    if (!r.V[x]) {
      c.flow_equal_worst = std::max(c.flow_equal_worst, std::abs(Tg[x] - Tu[x]) / c.t);
      continue;
    }
    auto cx = g.coords(x);
    bool in = true;
    for (std::size_t o = 0; o < st.size() && in; ++o) {
      if (is_inf(st.up[o])) continue;
      in = inside(g, cx[0] + st.d0[o], cx[1] + st.d1[o]) &&
           r.closure[g.index(cx[0] + st.d0[o], two ? cx[1] + st.d1[o] : 0)];
    }
    if (!in) continue;
    ++c.flow_identity_nodes;
    c.flow_identity_worst = std::max(c.flow_identity_worst, std::abs((Tg[x] - r.u_gamma[x]) / c.t - gamma));
  }
  c.flow_identity = c.flow_identity_worst <= c.tol;
  c.flow_equal = c.flow_equal_worst <= c.tol;

  // Slope bound and pointwise criterion on the patched field.
  c.splus_min = kInf;
  for (std::size_t i = 0; i < N; ++i)
    if (sg.valid[i] && !u.boundary[i]) c.splus_min = std::min(c.splus_min, sg.value[i]);
  c.slope = !is_inf(c.splus_min) && c.splus_min >= gamma - c.tol;
  c.pointwise = check_pointwise_criterion(H, sg, r.u_gamma, opt.criteria).pass;
  return r;
}

namespace {

// Unit vector orthogonal to every sampled zero of H.
Vec zero_set_normal(const HamiltonianModel& H) {
  const int dim = H.dim();
  const double half = H.box_half();
  const int n = dim == 1 ? 401 : 81;
  const double step = 2 * half / (n - 1);
  std::vector<Vec> zeros;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < (dim > 1 ? n : 1); ++j) {
      Vec p(dim);
      p[0] = -half + i * step;
      if (dim > 1) p[1] = -half + j * step;
      if (p.norm() > step / 2 && H(p) <= 1e-12) zeros.push_back(p);
    }
  Vec q = Vec::Zero(dim);
  q[0] = 1;
  if (zeros.empty()) return q;
  if (dim == 1) throw Error(ErrorKind::precondition, "zero set of H spans the line");
  auto far = *std::max_element(zeros.begin(), zeros.end(),
                               [](const Vec& a, const Vec& b) { return a.norm() < b.norm(); });
  q[0] = -far[1];
  q[1] = far[0];
  q /= q.norm();
  for (const auto& z : zeros)
    if (std::abs(q.dot(z)) > step)
      throw Error(ErrorKind::precondition, "no direction orthogonal to the zero set of H");
  return q;
}

double cone_pair(const HamiltonianModel& H, double k, const Vec& q) {
  try {
    return std::max(support_value(H, k, q), support_value(H, k, Vec(-q)));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::level) return kInf;
    throw;
  }
}

}  // namespace

double prepatch_bound(const HamiltonianModel& H, double diam, double eps) {
  if (!(diam > 0) || !(eps > 0)) throw Error(ErrorKind::input, "diam and eps must be positive");
  const Vec q = zero_set_normal(H);
  const double target = eps / (2 * diam);
  if (cone_pair(H, 0.0, q) > target) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (cone_pair(H, hi, q) <= target) {
    lo = hi;
    hi *= 2;
    if (hi > 65536) return lo;
  }
  for (int it = 0; it < 100 && hi - lo > 1e-13 * hi; ++it) {
    double mid = 0.5 * (lo + hi);
    (cone_pair(H, mid, q) <= target ? lo : hi) = mid;
  }
  return lo;
}

double prepatch_eps(const HamiltonianModel& H, double diam, double k) {
  if (!(diam > 0) || !(k >= 0)) throw Error(ErrorKind::input, "diam must be positive, k >= 0");
  double c = cone_pair(H, k, zero_set_normal(H));
  if (is_inf(c)) throw Error(ErrorKind::level, "level set of H at k leaves the box");
  return 2 * diam * c;
}

void write_patch(const std::string& prefix, const PatchResult& r) {
  write_csv(prefix + "_u_gamma.csv", r.u_gamma);
  write_csv(prefix + "_v_gamma.csv", r.v_gamma);
  write_csv(prefix + "_V_gamma.csv", mask_field(r.u_gamma.grid, r.V));
  std::ofstream os(prefix + "_claims.txt");
  if (!os) throw Error(ErrorKind::input, "cannot write " + prefix + "_claims.txt");
  os << r.claims.summary_line(r.gamma) << '\n';
}

}  // namespace hlx
