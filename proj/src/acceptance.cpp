#include "hlx/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <memory>
#include <random>
#include <sstream>

#include "hlx/aronsson.hpp"
#include "hlx/criteria.hpp"
#include "hlx/error.hpp"
#include "hlx/extreal.hpp"
#include "hlx/geometry.hpp"
#include "hlx/hopflax.hpp"
#include "hlx/patching.hpp"
#include "hlx/solver.hpp"

namespace hlx {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

class Detail {
 public:
  void add(const std::string& k, double v) { put(k, num(v)); }
  void add(const std::string& k, const std::string& v) { put(k, v); }
  void check(const std::string& what, bool ok) {
    if (!ok) {
      pass_ = false;
      put("failed", what);
    }
  }
  bool pass() const { return pass_; }
  std::string str() const { return os_.str(); }

 private:
  void put(const std::string& k, const std::string& v) {
    if (!os_.str().empty()) os_ << ' ';
    os_ << k << '=' << v;
  }
  std::ostringstream os_;
  bool pass_ = true;
};

double max_diff(const ScalarField& a, const ScalarField& b) {
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

bool bit_equal(const ScalarField& a, const ScalarField& b) {
  return a.size() == b.size() &&
         std::memcmp(a.values.data(), b.values.data(), a.size() * sizeof(double)) == 0;
}

ScalarField edge_data(const Grid& g, const std::function<double(double, double)>& f) {
  ScalarField u = sample(g, f);
  u.mark_edge_boundary();
  return u;
}

double exemplar(double x, double y) {
  return std::pow(std::abs(x - .5), 4. / 3) - std::pow(std::abs(y - .5), 4. / 3);
}

const HamiltonianModel& quad2() {
  static const auto H = HamiltonianModel::power(2, 2.0);
  return H;
}
const CoercivityProfile& quad2_prof() {
  static const auto p = coercivity_profile(quad2());
  return p;
}

// Solver runs shared by criteria 6 to 8.
struct Shared {
  std::map<int, SolveResult> solved;
  std::optional<SolveResult> low_slope;
  std::map<std::string, std::vector<PatchResult>> patched;
  std::string dir;

  const SolveResult& solve_exemplar(int n) {
    auto it = solved.find(n);
    if (it != solved.end()) return it->second;
    auto g = edge_data(Grid::square(n, n, 0.6, 1.6, 0.6, 1.6), exemplar);
    SolveConfig cfg;
    cfg.t = 0.25 * std::sqrt(g.grid.h[0]);
    auto r = solve_dirichlet(quad2(), quad2_prof(), g, cfg);
    if (!dir.empty()) write_csv(dir + "/exemplar_" + std::to_string(n) + ".csv", r.u);
    return solved.emplace(n, std::move(r)).first->second;
  }

  // Slope below 0.4 on the left part of the square, so V_gamma is not empty.
  const SolveResult& solve_low_slope() {
    if (low_slope) return *low_slope;
    auto g = edge_data(Grid::square(33, 33, 0, 1, 0, 1), [](double x, double y) {
      double s = std::max(x - 0.6, 0.0);
      return 0.2 * x + 0.1 * y * y + 2.5 * s * s;
    });
    low_slope = solve_dirichlet(quad2(), quad2_prof(), g, {});
    if (!dir.empty()) write_csv(dir + "/low_slope.csv", low_slope->u);
    return *low_slope;
  }
};

// 1. Legendre round trip, fast/brute agreement and speed.
void legendre_round_trip(Detail& d) {
  // Each Hamiltonian is sliced along the two coordinate axes: p -> H(s e).
  struct Slice {
    std::string name;
    std::function<double(double)> f;
  };
  std::vector<Slice> slices{
      {"half_square", [](double s) { return 0.5 * s * s; }},
      {"aniso_e1", [](double s) { return 0.5 * s * s; }},
      {"aniso_e2", [](double s) { return 2.0 * s * s; }},
      {"norm", [](double s) { return std::abs(s); }},
  };
  double worst_ratio = 0;
  for (int n : {257, 1025, 4097}) {
    Grid g = Grid::line(n, -2, 2);
    Grid dual = Grid::line(2 * n - 1, -9, 9);
    const double h = g.h[0];
    for (const auto& sl : slices) {
      ScalarField f = sample(g, [&](double x, double) { return sl.f(x); });
      ScalarField cc = legendre_transform(legendre_transform(f, dual), g);
      double err = 0;
      for (std::size_t i = 0; i < g.size(); ++i)
        if (std::abs(g.point(i)[0]) <= 1.5) err = std::max(err, std::abs(cc[i] - f[i]));
      worst_ratio = std::max(worst_ratio, err / h);
      d.check("biconjugate_" + sl.name + "_" + std::to_string(n), err <= 3 * h);
    }
  }
  d.add("biconj_err_over_h", worst_ratio);

  {
    Grid g = Grid::line(257, -2, 2);
    Grid dual = Grid::line(513, -9, 9);
    bool same = true;
    for (const auto& sl : slices) {
      ScalarField f = sample(g, [&](double x, double) { return sl.f(x); });
      same = same && bit_equal(legendre_transform(f, dual, LegendreMode::fast),
                               legendre_transform(f, dual, LegendreMode::brute));
    }
    d.add("bit_exact_257", same ? "yes" : "no");
    d.check("bit_exact_257", same);
  }

  Grid g = Grid::line(4096, -2, 2);
  ScalarField f = sample(g, [](double x, double) { return 0.5 * x * x; });
  auto best_of = [&](LegendreMode m, int reps) {
    double best = kInf;
    for (int r = 0; r < reps; ++r) {
      auto t0 = Clock::now();
      auto c = legendre_transform(f, g, m);
      best = std::min(best, seconds_since(t0));
    }
    return best;
  };
  double fast = best_of(LegendreMode::fast, 5), brute = best_of(LegendreMode::brute, 2);
  d.add("speedup_4096", brute / fast);
  d.check("speedup_4096", brute >= 20 * fast);
}

// 2. T^t C_k = C_k + k t.
void cone_flow(Detail& d) {
  Grid g = Grid::square(65, 65, -1, 1, -1, 1);
  const double h = g.hmax();
  double worst_ratio = 0;
  for (const auto& H : {HamiltonianModel::power(2, 2.0), HamiltonianModel::power(2, 1.0)}) {
    auto prof = coercivity_profile(H);
    for (double k : {0.5, 1.0, 2.0}) {
      auto cone = cone_data(H, k);
      ScalarField u = sample(g, [&](double x, double y) { return cone.value(x, y); });
      for (double t : {0.05, 0.1}) {
        auto fp = FlowParams::from_lipschitz(H, prof, cone.K_k * (1 + 1e-9), t);
        auto up = flow_up(u, fp);
        auto valid = valid_mask(g, fp.radius, false);
        double err = 0;
        std::size_t nodes = 0;
        for (std::size_t i = 0; i < u.size(); ++i)
          if (valid[i]) {
            err = std::max(err, std::abs(up[i] - (u[i] + k * t)));
            ++nodes;
          }
        worst_ratio = std::max(worst_ratio, err / (cone.K_k * h));
        std::string tag = (H.exponent() == 2.0 ? "quad" : "norm") + std::string("_k") + num(k) + "_t" + num(t);
        d.check(tag, nodes > 0 && err <= 5 * cone.K_k * h);
      }
    }
  }
  d.add("err_over_Kh", worst_ratio);
}

ScalarField random_lattice(const Grid& g, std::mt19937_64& rng, double amp) {
  std::uniform_int_distribution<long> U(0, 1 << 20);
  ScalarField f(g);
  for (auto& v : f.values) v = amp * static_cast<double>(U(rng)) / (1 << 20);
  return f;
}

// 3. Exact flow laws and the semigroup defect.
void flow_laws(Detail& d, std::uint64_t seed) {
  Grid g = Grid::square(17, 17, 0, 1, 0, 1);
  const double h = g.hmax();
  Eigen::MatrixXd A(2, 2);
  A << 1, 0, 0, 2;
  std::vector<HamiltonianModel> Hs{HamiltonianModel::power(2, 2.0), HamiltonianModel::quadratic(A),
                                   HamiltonianModel::power(2, 1.0)};
  std::vector<CoercivityProfile> profs;
  for (const auto& H : Hs) profs.push_back(coercivity_profile(H));
  std::mt19937_64 rng(seed);
  std::size_t violations = 0, commutation = 0;
  double defect = 0;
  std::size_t defect_nodes = 0;
  for (int s = 0; s < 100; ++s) {
    const auto& H = Hs[s % Hs.size()];
    auto u = random_lattice(g, rng, 0.25);
    auto v = u;
    auto bump = random_lattice(g, rng, 0.1);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += bump[i];
    auto rep = verify_flow_laws(u, FlowParams::with_radius(H, 1.0 / 32, 0.3), &v, 5.0);
    violations += rep.violations.size();
    commutation += rep.commutation_checked;
    // Oscillation-based radii at t + s = 3/64 leave no margin-interior node on the unit square.
    auto sd = semigroup_defect(H, profs[s % Hs.size()], u, 1.0 / 64, 1.0 / 128);
    defect = std::max(defect, sd.max_defect);
    defect_nodes += std::count(sd.valid.begin(), sd.valid.end(), 1);
  }
  d.add("violations", static_cast<double>(violations));
  d.add("commutation_checked", static_cast<double>(commutation));
  d.add("semigroup_defect_over_h", defect / h);
  d.check("flow_laws", violations == 0 && commutation == 100);
  d.check("semigroup_defect", defect_nodes > 0 && defect <= 3 * h);
}

// 4. Equivalence suite and the -|x| signature.
void equivalences(Detail& d, std::uint64_t seed) {
  Grid g = Grid::square(25, 25, 0.6, 1.6, 0.6, 1.6);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1, 1);
  auto cone = cone_data(quad2(), 0.5);
  double a = U(rng), b = U(rng), c = 0.3 * U(rng), w0 = U(rng), w1 = U(rng);
  // Positive definite Hessian diag(1 + a^2, 1 + b^2) plus a small mixed term.
  auto convex = [=](double x, double y) {
    return 0.5 * ((1 + a * a) * x * x + 2 * c * x * y + (1 + b * b) * y * y) + w0 * x + w1 * y;
  };
  struct Canon {
    std::string name;
    std::function<double(double, double)> f;
    std::string expect;
  };
  std::vector<Canon> fields{
      {"affine", [](double x, double y) { return 0.3 * x - 0.7 * y; }, "pass"},
      {"cone", [&](double x, double y) { return cone.value(x - 0.3, y - 1.9); }, "pass"},
      {"exemplar", exemplar, "pass"},
      {"convex", convex, "pass"},
      {"concave", [&](double x, double y) { return -convex(x, y); }, "fail"},
  };
  std::string verdicts;
  for (const auto& f : fields) {
    auto r = check_equivalences(quad2(), quad2_prof(), sample(g, f.f));
    verdicts += (verdicts.empty() ? "" : ",") + f.name + ":" + r.verdict;
    d.check(f.name, r.agree && r.verdict == f.expect);
  }
  d.add("verdicts", verdicts);

  auto H = HamiltonianModel::power(1, 1.0);
  auto prof = coercivity_profile(H);
  auto u = sample(Grid::line(33, -1, 1), [](double x, double) { return -std::abs(x); });
  const double h = u.grid.h[0];
  CriteriaConfig cfg;
  cfg.ladder = {h, 2 * h, 4 * h, 8 * h};
  auto sp = s_plus(H, prof, u, cfg);
  const std::size_t origin = 16;
  double pattern = 0;
  bool per_node = true;
  for (std::size_t i = 1; i + 1 < u.size(); ++i) {
    if (!sp.valid[i]) {
      pattern = kInf;
      continue;
    }
    pattern = std::max(pattern, std::abs(sp.value[i] - (i == origin ? 0.0 : 1.0)));
  }
  auto conv = check_convexity_criterion(sp);
  for (std::size_t i = 1; i + 1 < u.size(); ++i) per_node = per_node && conv.node_pass[i];
  auto pw = check_pointwise_criterion(H, sp, u, cfg);
  bool usc_at_origin = !pw.pass && !pw.witnesses.empty();
  for (const auto& w : pw.witnesses) usc_at_origin = usc_at_origin && w.kind == "usc" && w.node == origin;
  d.add("negabs_splus_pattern_err", pattern);
  d.check("negabs_splus_pattern", pattern <= 0.05);
  d.check("negabs_per_node_convexity", per_node);
  d.check("negabs_usc_at_origin", usc_at_origin);
}

// 5. Affine exactness and uniqueness across initialisations.
void solver_uniqueness(Detail& d, std::uint64_t seed) {
  double affine_err = 0;
  for (const auto& H : {HamiltonianModel::power(1, 2.0), HamiltonianModel::power(1, 1.0)}) {
    auto prof = coercivity_profile(H);
    auto g = edge_data(Grid::line(33, 0, 1), [](double x, double) { return 0.7 * x - 0.2; });
    SolveConfig cfg;
    auto r = solve_dirichlet(H, prof, g, cfg);
    affine_err = std::max(affine_err, max_diff(r.u, g));
    d.check("affine_1d", r.report.converged && r.report.residual <= cfg.tolerance &&
                             max_diff(r.u, g) <= 10 * cfg.tolerance);
  }
  for (const auto& H : {HamiltonianModel::power(2, 2.0), HamiltonianModel::power(2, 1.0)}) {
    auto prof = coercivity_profile(H);
    auto g = edge_data(Grid::square(17, 17, 0, 1, 0, 1),
                       [](double x, double y) { return 0.4 * x - 0.8 * y + 0.2; });
    SolveConfig cfg;
    auto r = solve_dirichlet(H, prof, g, cfg);
    affine_err = std::max(affine_err, max_diff(r.u, g));
    d.check("affine_2d", r.report.converged && r.report.residual <= cfg.tolerance &&
                             max_diff(r.u, g) <= 10 * cfg.tolerance);
  }
  d.add("affine_err", affine_err);

  auto g = edge_data(Grid::square(33, 33, 0, 1, 0, 1),
                     [](double x, double y) { return x + 0.3 * std::sin(4 * y) + 0.5 * x * x; });
  std::vector<ScalarField> outs;
  double iters = 0;
  for (auto init : {InitMode::boundary_min, InitMode::boundary_max, InitMode::random}) {
    SolveConfig cfg;
    cfg.init = init;
    cfg.seed = seed;
    auto r = solve_dirichlet(quad2(), quad2_prof(), g, cfg);
    d.check("converged", r.report.converged);
    iters = std::max(iters, static_cast<double>(r.report.iterations));
    outs.push_back(std::move(r.u));
  }
  const double tol10 = 10 * SolveConfig{}.tolerance;
  double diff = 0, gap = -kInf;
  for (const auto& a : outs)
    for (const auto& b : outs) {
      diff = std::max(diff, max_diff(a, b));
      gap = std::max(gap, comparison_gap(a, b));
    }
  d.add("max_iters", iters);
  d.add("init_diff", diff);
  d.add("comparison_gap", gap);
  d.check("init_diff", diff <= tol10);
  d.check("comparison_gap", gap <= tol10);
}

// 6. Exemplar convergence.
void exemplar_convergence(Detail& d, Shared& sh) {
  double prev = kInf;
  for (int n : {33, 65}) {
    const auto& r = sh.solve_exemplar(n);
    const double h = r.u.grid.h[0];
    double err = 0;
    for (std::size_t i = 0; i < r.u.size(); ++i) {
      auto p = r.u.grid.point(i);
      err = std::max(err, std::abs(r.u[i] - exemplar(p[0], p[1])));
    }
    d.add("err_h" + std::to_string(n - 1), err);
    d.check("converged_" + std::to_string(n), r.report.converged);
    d.check("err_bound_" + std::to_string(n), err <= 10 * std::pow(h, 2.0 / 3));
    d.check("err_decreases", err < prev);
    prev = err;
  }
}

// Patch claims over the gamma ladder on one solver output.
void patch_family(Detail& d, Shared& sh, const std::string& name, const ScalarField& u) {
  const double h = u.grid.h[0];
  auto sp = s_plus(quad2(), quad2_prof(), u);
  double prev = kInf;
  std::vector<PatchResult> out;
  std::string vsizes, changes;
  for (double gamma : {0.4, 0.2, 0.1, 0.05}) {
    auto r = patch(quad2(), quad2_prof(), u, gamma, {}, &sp);
    const auto& c = r.claims;
    std::string tag = name + "_g" + num(gamma);
    d.check(tag + "_below", c.below && c.below_worst <= 0.0);
    d.check(tag + "_boundary", c.boundary_equal);
    d.check(tag + "_splus", c.splus_min >= gamma - 5 * h);
    d.check(tag + "_decreasing", r.max_change <= prev);
    double eps = prepatch_eps(quad2(), u.grid.diameter(), gamma + r.margin);
    d.check(tag + "_eps", r.max_change <= eps);
    vsizes += (vsizes.empty() ? "" : "/") + std::to_string(std::count(r.V.begin(), r.V.end(), 1));
    changes += (changes.empty() ? "" : "/") + num(r.max_change);
    prev = r.max_change;
    if (!sh.dir.empty()) write_patch(sh.dir + "/patch_" + name + "_" + num(gamma), r);
    out.push_back(std::move(r));
  }
  d.add(name + "_V_sizes", vsizes);
  d.add(name + "_max_change", changes);
  sh.patched[name] = std::move(out);
}

ScalarField zero_line(int n) {
  ScalarField z(Grid::line(n, 0, 1));
  z.mark_edge_boundary();
  return z;
}

// 7. Patching claims on the exemplar solver output and the 1D zero field.
void patching_claims(Detail& d, Shared& sh) {
  patch_family(d, sh, "exemplar", sh.solve_exemplar(33).u);
  patch_family(d, sh, "low_slope", sh.solve_low_slope().u);

  auto H1 = HamiltonianModel::power(1, 2.0);
  auto p1 = coercivity_profile(H1);
  auto z = zero_line(33);
  double worst = 0;
  for (double gamma : {0.4, 0.2, 0.1, 0.05}) {
    auto r = patch(H1, p1, z, gamma);
    for (std::size_t i = 0; i < z.size(); ++i) {
      double x = z.grid.point(i)[0];
      worst = std::max(worst, std::abs(r.u_gamma[i] + std::sqrt(2 * gamma) * std::min(x, 1 - x)));
    }
  }
  d.add("zero_line_err_over_h", worst / z.grid.h[0]);
  d.check("zero_line", worst <= 3 * z.grid.h[0]);
}

// 8. Stationary-point diagnostic on patched outputs, and the bump rejection.
void stationary(Detail& d, Shared& sh, std::uint64_t seed) {
  if (sh.patched.size() < 2) {
    Detail scratch;
    patching_claims(scratch, sh);
  }
  const double tol = 1e-6;
  std::size_t cert = 0, x0 = 0, other = 0;
  for (const auto& [name, u] : {std::pair<std::string, const ScalarField*>{"exemplar", &sh.solve_exemplar(33).u},
                                {"low_slope", &sh.solve_low_slope().u}}) {
    const double h = u->grid.h[0];
    const double r = 4 * h;
    std::vector<const ScalarField*> fields{u};
    for (const auto& p : sh.patched.at(name)) fields.push_back(&p.u_gamma);
    double osc = 0;
    for (auto* f : fields) osc = std::max(osc, f->oscillation());
    const double t = 0.5 * t_zero(osc, r, quad2_prof());
    for (auto* f : fields)
      for (auto* g : fields) {
        if (f == g) continue;
        try {
          auto res = stationary_point_search(quad2(), quad2_prof(), *f, *g, t, r, tol);
          if (res.outcome == StationaryOutcome::certificate) ++cert;
          else if (res.outcome == StationaryOutcome::stationary_point) ++x0;
          else ++other;
        } catch (const Error& e) {
          ++other;
          d.add(name + "_error", "\"" + std::string(e.what()) + "\"");
        }
      }
  }
  d.add("pairs", static_cast<double>(cert + x0 + other));
  d.add("certificates", static_cast<double>(cert));
  d.add("x0", static_cast<double>(x0));
  d.check("x0_never", x0 == 0);
  d.check("certificate", other == 0);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.35, 0.65);
  const double cx = U(rng), cy = U(rng);
  Grid g = Grid::square(25, 25, 0, 1, 0, 1);
  auto bump = edge_data(g, [&](double x, double y) {
    return std::exp(-((x - cx) * (x - cx) + (y - cy) * (y - cy)) / 0.01);
  });
  ScalarField zero(g);
  zero.mark_edge_boundary();
  bool rejected = false;
  try {
    stationary_point_search(quad2(), quad2_prof(), bump, zero, 0.005, 0.125, tol);
  } catch (const Error& e) {
    rejected = e.kind() == ErrorKind::precondition;
  }
  d.add("bump_rejected", rejected ? "yes" : "no");
  d.check("bump_rejected", rejected);
}

// 9. Aronsson residual on the exemplar and on -|x|^2.
void aronsson(Detail& d, std::uint64_t seed) {
  auto g = Grid::square(65, 65, 0.6, 1.6, 0.6, 1.6);
  auto u = sample(g, exemplar);
  const double h = g.h[0];
  double floor_margin = kInf;
  for (double rho : {3 * h, 4 * h, 6 * h}) {
    auto nodes = aronsson_sample_nodes(u, rho, 100, seed);
    const double floor = -10 * (rho + h * h / (rho * rho));
    for (const auto& r : aronsson_sweep(quad2(), u, nodes, rho))
      floor_margin = std::min(floor_margin, r.residual - floor);
    d.check("exemplar_rho" + num(rho / h), nodes.size() == 100 && floor_margin >= 0);
  }
  d.add("exemplar_floor_margin", floor_margin);

  auto gn = Grid::square(65, 65, -1, 1, -1, 1);
  auto un = sample(gn, [](double x, double y) { return -(x * x + y * y); });
  const double rho = 3 * gn.h[0];
  std::vector<std::size_t> nodes;
  for (std::size_t i = 0; i < gn.size(); ++i) {
    auto p = gn.point(i);
    if (std::hypot(p[0], p[1]) < 0.5) continue;
    if (p[0] - rho < -1 || p[0] + rho > 1 || p[1] - rho < -1 || p[1] + rho > 1) continue;
    nodes.push_back(i);
  }
  double worst = -kInf;
  for (const auto& r : aronsson_sweep(quad2(), un, nodes, rho)) worst = std::max(worst, r.residual);
  d.add("neg_paraboloid_max", worst);
  d.add("neg_paraboloid_nodes", static_cast<double>(nodes.size()));
  d.check("neg_paraboloid", !nodes.empty() && worst <= -0.5);
}

}  // namespace

std::string AcceptanceLine::line() const {
  char head[96];
  std::snprintf(head, sizeof head, "criterion %d %s %.2fs/%gs %s:", id, pass ? "PASS" : "FAIL", seconds,
                budget, name.c_str());
  std::string s = head;
  if (!detail.empty()) s += " " + detail;
  if (!error.empty()) s += " error=\"" + error + "\"";
  return s;
}

std::vector<AcceptanceLine> run_acceptance(const AcceptanceOptions& opt) {
  Shared sh;
  sh.dir = opt.artifact_dir;
  if (!sh.dir.empty()) std::filesystem::create_directories(sh.dir);
  const std::uint64_t seed = opt.seed;
  struct Entry {
    int id;
    const char* name;
    double budget;
    std::function<void(Detail&)> run;
  };
  std::vector<Entry> all{
      {1, "legendre_round_trip", 5, legendre_round_trip},
      {2, "cone_flow_identity", 10, cone_flow},
      {3, "flow_laws", 30, [&](Detail& d) { flow_laws(d, seed); }},
      {4, "equivalences", 60, [&](Detail& d) { equivalences(d, seed); }},
      {5, "solver_uniqueness", 120, [&](Detail& d) { solver_uniqueness(d, seed); }},
      {6, "exemplar_convergence", 120, [&](Detail& d) { exemplar_convergence(d, sh); }},
      {7, "patching", 60, [&](Detail& d) { patching_claims(d, sh); }},
      {8, "stationary_point", 30, [&](Detail& d) { stationary(d, sh, seed); }},
      {9, "aronsson_residual", 30, [&](Detail& d) { aronsson(d, seed); }},
  };
  std::vector<AcceptanceLine> out;
  for (const auto& e : all) {
    if (!opt.only.empty() && std::find(opt.only.begin(), opt.only.end(), e.id) == opt.only.end()) continue;
    AcceptanceLine l;
    l.id = e.id;
    l.name = e.name;
    l.budget = e.budget;
    Detail d;
    auto t0 = Clock::now();
    try {
      e.run(d);
      l.pass = d.pass();
    } catch (const std::exception& ex) {
      l.pass = false;
      l.error = ex.what();
    }
    l.seconds = seconds_since(t0);
    l.detail = d.str();
    if (l.seconds > l.budget) l.pass = false;
    out.push_back(std::move(l));
  }
  return out;
}

}  // namespace hlx
