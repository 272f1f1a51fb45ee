#include "hlx/harness.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "hlx/acceptance.hpp"
#include "hlx/aronsson.hpp"
#include "hlx/criteria.hpp"
#include "hlx/error.hpp"
#include "hlx/extreal.hpp"
#include "hlx/geometry.hpp"
#include "hlx/hopflax.hpp"
#include "hlx/patching.hpp"
#include "hlx/solver.hpp"

namespace hlx {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

const std::map<Task, const char*> kTaskNames{
    {Task::validate, "validate"}, {Task::legendre, "legendre"}, {Task::flow, "flow"},
    {Task::criteria, "criteria"}, {Task::patch, "patch"},       {Task::solve, "solve"},
    {Task::compare, "compare"},   {Task::aronsson, "aronsson"}, {Task::acceptance, "acceptance"},
};

const std::map<std::string, std::set<std::string>> kKnownKeys{
    {"run", {"out", "seed"}},
    {"hamiltonian", {"kind", "dim", "exponent", "matrix", "ball", "table", "box_half"}},
    {"grid", {"n", "lo", "hi"}},
    {"data", {"family", "slope", "offset", "k", "vertex", "amplitude", "modes", "path"}},
    {"tolerances", {"solver", "validation", "resolution", "legendre", "aronsson_floor"}},
    {"legendre", {"n", "lo", "hi", "dual_n", "dual_lo", "dual_hi", "mode"}},
    {"flow", {"t", "truncation", "radius"}},
    {"criteria", {"ladder_points"}},
    {"solve", {"t", "init", "max_iters", "stop", "damping"}},
    {"compare", {"t"}},
    {"patch", {"gammas", "source", "step_reach"}},
    {"aronsson", {"rho", "samples", "source"}},
    {"acceptance", {"only"}},
};

// Effective values are recorded in the manifest whether or not the config sets them.
const std::map<std::string, double> kDefaultTolerances{
    {"solver", 1e-8}, {"validation", 1e-9}, {"resolution", 0.05}, {"legendre", 3.0}, {"aronsson_floor", 10.0}};

double parse_number(const std::string& key, std::string s) {
  s.erase(0, s.find_first_not_of(" \t"));
  s.erase(s.find_last_not_of(" \t") + 1);
  double v = 0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw Error(ErrorKind::input, "config key " + key + ": bad number '" + s + "'");
  return v;
}

// Numbers separated by blanks or commas.
std::vector<double> parse_list(const std::string& key, const std::string& s) {
  std::vector<double> out;
  std::string tok;
  for (char c : s + " ") {
    if (c == ' ' || c == ',' || c == '\t' || c == ';') {
      if (!tok.empty()) out.push_back(parse_number(key, tok));
      tok.clear();
    } else {
      tok += c;
    }
  }
  return out;
}

std::string resolve(const std::string& base, const std::string& p) {
  if (p.empty()) return p;
  fs::path q(p);
  if (q.is_relative()) q = fs::path(base) / q;
  return fs::weakly_canonical(fs::absolute(q)).string();
}

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

double exemplar(double x, double y) {
  return std::pow(std::abs(x - .5), 4. / 3) - std::pow(std::abs(y - .5), 4. / 3);
}

Vec point_vec(const Grid& g, std::size_t i) {
  auto p = g.point(i);
  Vec v(g.dims);
  for (int a = 0; a < g.dims; ++a) v[a] = p[a];
  return v;
}

Vec to_vec(const std::vector<double>& x, int dim, const std::string& what) {
  if (static_cast<int>(x.size()) < dim) throw Error(ErrorKind::input, what + " needs " + std::to_string(dim) + " entries");
  Vec v(dim);
  for (int a = 0; a < dim; ++a) v[a] = x[a];
  return v;
}

double max_abs_diff(const ScalarField& a, const ScalarField& b) {
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

// Values along the middle row (2D) or the whole line (1D).
std::pair<std::vector<double>, std::vector<double>> slice(const ScalarField& f) {
  const Grid& g = f.grid;
  std::vector<double> x, y;
  const int mid = g.dims > 1 ? g.n[1] / 2 : 0;
  for (int i = 0; i < g.n[0]; ++i) {
    std::size_t idx = g.index(i, mid);
    x.push_back(g.point(idx)[0]);
    y.push_back(f[idx]);
  }
  return {x, y};
}

class Runner {
 public:
  Runner(const ExperimentConfig& cfg, RunResult& res) : cfg_(cfg), res_(res), out_(cfg.out_dir) {}

  void run() {
    switch (cfg_.task) {
      case Task::validate: validate(); break;
      case Task::legendre: legendre(); break;
      case Task::flow: flow(); break;
      case Task::criteria: criteria(); break;
      case Task::patch: patch_task(); break;
      case Task::solve: solve(); break;
      case Task::compare: compare(); break;
      case Task::aronsson: aronsson(); break;
      case Task::acceptance: acceptance(); break;
    }
  }

 private:
  const ExperimentConfig& cfg_;
  RunResult& res_;
  fs::path out_;
  std::optional<HamiltonianModel> H_;
  std::optional<CoercivityProfile> prof_;

  const HamiltonianModel& H() {
    if (!H_) H_ = make_hamiltonian(cfg_.hamiltonian);
    return *H_;
  }
  const CoercivityProfile& prof() {
    if (!prof_) prof_ = coercivity_profile(H());
    return *prof_;
  }
  ScalarField data() {
    if (cfg_.data.family == "file") {
      auto f = read_csv(cfg_.data.path);
      f.mark_edge_boundary();
      if (f.grid.dims != H().dim()) throw Error(ErrorKind::input, "data file and H dimensions differ");
      return f;
    }
    Grid g = make_grid(cfg_.grid);
    if (g.dims != H().dim()) throw Error(ErrorKind::input, "grid and H dimensions differ");
    return make_data(cfg_.data, g, H(), cfg_.seed);
  }
  std::string header() const {
    return "# task=" + std::string(to_string(cfg_.task)) + " seed=" + std::to_string(cfg_.seed) + "\n";
  }

  std::string path(const std::string& name) {
    res_.artifacts.push_back(name);
    return (out_ / name).string();
  }
  void field(const std::string& name, const ScalarField& f) { write_csv(path(name), f); }
  void text(const std::string& name, const std::string& body) {
    std::ofstream os(path(name), std::ios::binary);
    if (!os) throw Error(ErrorKind::input, "cannot write " + name);
    os << header() << body;
  }
  void xy(const std::string& name, const std::string& cols, const std::vector<double>& x,
          const std::vector<double>& y) {
    write_xy(path(name), "task=" + std::string(to_string(cfg_.task)) + " seed=" + std::to_string(cfg_.seed) + " " + cols, x, y);
  }
  void xy(const std::string& name, const std::string& cols, const ScalarField& f) {
    auto [x, y] = slice(f);
    xy(name, cols, x, y);
  }
  double tol(const std::string& name) const {
    return cfg_.number("tolerances." + name, kDefaultTolerances.at(name));
  }
  void check(const std::string& name, bool pass, const std::string& detail) {
    res_.checks.push_back({name, pass, detail});
  }

  void validate() {
    const double vtol = tol("validation");
    auto rep = validate_hamiltonian(H(), vtol);
    std::ostringstream os;
    os << "hamiltonian," << H().describe() << "\ncheck,verdict,witnesses,worst\n";
    for (const auto& c : rep.checks) {
      double worst = 0;
      for (const auto& w : c.witnesses) worst = std::max(worst, w.violation);
      os << c.name << ',' << (c.pass ? "pass" : "fail") << ',' << c.witnesses.size() << ','
         << format_double(worst) << '\n';
      std::string detail = c.witnesses.empty() ? "" : "witness=" + format_double(c.witnesses.front().point[0]);
      check(c.name, c.pass, detail);
    }
    if (rep.pass()) {
      const auto& p = prof();
      os << "profile,R0=" << format_double(p.R0) << ",k0=" << format_double(p.k0) << '\n';
    }
    text("validation.txt", os.str());
  }

  void legendre() {
    const int dim = H().dim();
    const double lo = cfg_.number("legendre.lo", -2), hi = cfg_.number("legendre.hi", 2);
    const int n = static_cast<int>(cfg_.number("legendre.n", 257));
    const double dlo = cfg_.number("legendre.dual_lo", lo / 2), dhi = cfg_.number("legendre.dual_hi", hi / 2);
    const int dn = static_cast<int>(cfg_.number("legendre.dual_n", n));
    const std::string mode = cfg_.text("legendre.mode", "fast");
    if (mode != "fast" && mode != "brute") throw Error(ErrorKind::input, "legendre.mode must be fast or brute");
    Grid primal = dim == 1 ? Grid::line(n, lo, hi) : Grid::square(n, n, lo, hi, lo, hi);
    Grid dual = dim == 1 ? Grid::line(dn, dlo, dhi) : Grid::square(dn, dn, dlo, dhi, dlo, dhi);
    auto f = sample_hamiltonian(H(), primal);
    auto conj = legendre_transform(f, dual, mode == "fast" ? LegendreMode::fast : LegendreMode::brute);
    ScalarField err(dual);
    double worst = 0;
    std::size_t mismatch = 0;
    for (std::size_t j = 0; j < dual.size(); ++j) {
      double L = H().lagrangian(point_vec(dual, j));
      if (is_inf(L) != is_inf(conj[j])) {
        ++mismatch;
        err[j] = kInf;
      } else if (!is_inf(L)) {
        err[j] = std::abs(conj[j] - L);
        worst = std::max(worst, err[j]);
      }
    }
    const double bound = tol("legendre") * primal.hmax();
    field("conjugate.csv", conj);
    xy("conjugate.dat", "s conjugate", conj);
    xy("conjugate_error.dat", "s abs_error", err);
    text("legendre.txt", "max_error=" + format_double(worst) + "\nsentinel_mismatches=" +
                             std::to_string(mismatch) + "\nbound=" + format_double(bound) + "\n");
    check("max_error", worst <= bound && mismatch == 0,
          "max_error=" + format_double(worst) + " mismatches=" + std::to_string(mismatch));
  }

  void flow() {
    auto u = data();
    const double t = cfg_.number("flow.t", 4 * u.grid.hmax());
    const std::string trunc = cfg_.text("flow.truncation", "oscillation");
    FlowParams fp;
    if (trunc == "oscillation") fp = FlowParams::from_oscillation(H(), prof(), u.oscillation(), t);
    else if (trunc == "lipschitz") fp = FlowParams::from_lipschitz(H(), prof(), discrete_lipschitz(u), t);
    else if (trunc == "full") fp = FlowParams::with_radius(H(), t, cfg_.number("flow.radius", u.grid.diameter()));
    else throw Error(ErrorKind::input, "flow.truncation must be oscillation, lipschitz or full");
    auto up = flow_up(u, fp);
    auto down = flow_down(u, fp);
    auto valid = valid_mask(u.grid, fp.radius, false);
    auto laws = verify_flow_laws(u, fp);
    field("u.csv", u);
    field("up.csv", up);
    field("down.csv", down);
    field("valid.csv", mask_field(u.grid, valid));
    xy("u_slice.dat", "x u", u);
    xy("up_slice.dat", "x T^t_u", up);
    xy("down_slice.dat", "x T_t_u", down);
    std::ostringstream os;
    os << "t=" << format_double(t) << "\nradius=" << format_double(fp.radius)
       << "\nvalid_nodes=" << std::count(valid.begin(), valid.end(), 1)
       << "\nlaw_violations=" << laws.violations.size() << '\n';
    text("flow.txt", os.str());
    check("flow_laws", laws.ok(), "violations=" + std::to_string(laws.violations.size()));
  }

  void criteria() {
    auto u = data();
    CriteriaConfig cc;
    cc.resolution = tol("resolution");
    cc.ladder_points = static_cast<int>(cfg_.number("criteria.ladder_points", cc.ladder_points));
    auto rep = check_equivalences(H(), prof(), u, cc);
    write_splus_csv(path("splus.csv"), rep.splus);
    xy("splus_slice.dat", "x splus", rep.splus.value);
    text("criteria.txt", rep.cone.summary_line() + "\n" + rep.convexity.summary_line() + "\n" +
                             rep.pointwise.summary_line() + "\nequivalence," + rep.verdict + "\n");
    check("agree", rep.agree, "verdict=" + rep.verdict);
  }

  SolveConfig solve_config() {
    SolveConfig sc;
    sc.t = cfg_.number("solve.t", 0.0);
    sc.tolerance = tol("solver");
    sc.max_iters = static_cast<int>(cfg_.number("solve.max_iters", sc.max_iters));
    sc.damping = cfg_.number("solve.damping", sc.damping);
    sc.seed = cfg_.seed;
    const std::string init = cfg_.text("solve.init", "min");
    if (init == "min") sc.init = InitMode::boundary_min;
    else if (init == "max") sc.init = InitMode::boundary_max;
    else if (init == "random") sc.init = InitMode::random;
    else throw Error(ErrorKind::input, "solve.init must be min, max or random");
    const std::string stop = cfg_.text("solve.stop", "contraction");
    if (stop == "contraction") sc.stop = StopRule::contraction;
    else if (stop == "residual") sc.stop = StopRule::residual;
    else throw Error(ErrorKind::input, "solve.stop must be contraction or residual");
    return sc;
  }

  void solve() {
    auto g = data();
    auto r = solve_dirichlet(H(), prof(), g, solve_config());
    field("u.csv", r.u);
    xy("u_slice.dat", "x u", r.u);
    std::vector<double> it, hist;
    for (std::size_t i = 0; i < r.report.history.size(); ++i) {
      it.push_back(static_cast<double>(i + 1));
      hist.push_back(r.report.history[i]);
    }
    xy("residual.dat", "iteration residual", it, hist);
    std::ostringstream os;
    os << "verdict=" << r.report.verdict << "\niterations=" << r.report.iterations
       << "\nresidual=" << format_double(r.report.residual) << "\nt=" << format_double(r.report.t)
       << "\nradius=" << format_double(r.report.radius) << '\n';
    std::string detail = "iterations=" + std::to_string(r.report.iterations) +
                         " residual=" + format_double(r.report.residual);
    if (auto ex = exact_solution(cfg_.data, r.u.grid, H())) {
      double e = max_abs_diff(*ex, r.u);
      os << "max_error_vs_closed_form=" << format_double(e) << '\n';
      detail += " max_error=" + format_double(e);
    }
    for (const auto& w : r.report.warnings) os << "warning=" << w << '\n';
    text("solve.txt", os.str());
    check("converged", r.report.converged, detail);
  }

  void compare() {
    auto g = data();
    SolveConfig base = solve_config();
    base.t = cfg_.number("compare.t", base.t);
    std::vector<std::pair<std::string, ScalarField>> outs;
    for (auto [name, mode] : {std::pair{"min", InitMode::boundary_min}, {"max", InitMode::boundary_max},
                              {"random", InitMode::random}}) {
      SolveConfig sc = base;
      sc.init = mode;
      auto r = solve_dirichlet(H(), prof(), g, sc);
      if (!r.report.converged) check(std::string("converged_") + name, false, r.report.verdict);
      field(std::string("u_") + name + ".csv", r.u);
      outs.emplace_back(name, std::move(r.u));
    }
    double diff = 0, gap = -kInf;
    std::ostringstream os;
    os << "pair,max_abs_diff,comparison_gap\n";
    for (const auto& [na, a] : outs)
      for (const auto& [nb, b] : outs) {
        if (&a == &b) continue;
        double d = max_abs_diff(a, b), cg = comparison_gap(a, b);
        diff = std::max(diff, d);
        gap = std::max(gap, cg);
        os << na << '-' << nb << ',' << format_double(d) << ',' << format_double(cg) << '\n';
      }
    text("compare.txt", os.str());
    const double bound = 10 * base.tolerance;
    check("init_diff", diff <= bound, "max=" + format_double(diff));
    check("comparison_gap", gap <= bound, "max=" + format_double(gap));
  }

  ScalarField source(const std::string& key, const std::string& fallback) {
    const std::string src = cfg_.text(key, fallback);
    if (src == "data") return data();
    if (src != "solve") throw Error(ErrorKind::input, key + " must be data or solve");
    auto r = solve_dirichlet(H(), prof(), data(), solve_config());
    if (!r.report.converged) throw Error(ErrorKind::resolution, "solver did not converge: " + r.report.verdict);
    field("u.csv", r.u);
    return r.u;
  }

  void patch_task() {
    auto u = source("patch.source", "solve");
    auto gammas = cfg_.numbers("patch.gammas", {0.4, 0.2, 0.1, 0.05});
    PatchOptions po;
    po.step_reach = static_cast<int>(cfg_.number("patch.step_reach", po.step_reach));
    po.criteria.resolution = tol("resolution");
    auto sp = s_plus(H(), prof(), u, po.criteria);
    std::vector<double> gs, changes;
    bool closeness = true;
    double prev = kInf, prev_gamma = kInf;
    std::ostringstream os;
    for (double gamma : gammas) {
      auto r = patch(H(), prof(), u, gamma, po, &sp);
      std::string prefix = "patch_g" + format_double(gamma);
      write_patch((out_ / prefix).string(), r);
      for (const char* suffix : {"_u_gamma.csv", "_v_gamma.csv", "_V_gamma.csv", "_claims.txt"})
        res_.artifacts.push_back(prefix + suffix);
      const auto& c = r.claims;
      bool held = c.below && c.boundary_equal && c.cone_bound && c.flow_identity && c.flow_equal && c.slope;
      check("patch_gamma=" + format_double(gamma), held, c.summary_line(gamma));
      double eps = prepatch_eps(H(), u.grid.diameter(), gamma + r.margin);
      if (gamma < prev_gamma) closeness = closeness && r.max_change <= prev;
      closeness = closeness && r.max_change <= eps;
      os << "gamma=" << format_double(gamma) << ",max_change=" << format_double(r.max_change)
         << ",eps=" << format_double(eps) << ",V=" << std::count(r.V.begin(), r.V.end(), 1) << '\n';
      gs.push_back(gamma);
      changes.push_back(r.max_change);
      prev = r.max_change;
      prev_gamma = gamma;
    }
    xy("max_change.dat", "gamma max_abs_change", gs, changes);
    text("patch.txt", os.str());
    check("closeness", closeness, "max_change monotone in gamma and below the prepatch eps");
  }

  void aronsson() {
    auto u = source("aronsson.source", "data");
    const double h = u.grid.hmax();
    const double rho = cfg_.number("aronsson.rho", 4) * h;
    const auto count = static_cast<std::size_t>(cfg_.number("aronsson.samples", 100));
    auto nodes = aronsson_sample_nodes(u, rho, count, cfg_.seed);
    auto rs = aronsson_sweep(H(), u, nodes, rho);
    write_aronsson_csv(path("aronsson.csv"), rs);
    std::vector<double> gx, ry;
    double worst = kInf;
    for (const auto& r : rs) {
      gx.push_back(r.fit.grad.norm());
      ry.push_back(r.residual);
      worst = std::min(worst, r.residual);
    }
    xy("residual.dat", "grad_norm residual", gx, ry);
    const double floor = -tol("aronsson_floor") * (rho + h * h / (rho * rho));
    text("aronsson.txt", "min_residual=" + format_double(worst) + "\nfloor=" + format_double(floor) +
                             "\nsamples=" + std::to_string(rs.size()) + "\n");
    check("residual_floor", worst >= floor, "min=" + format_double(worst) + " floor=" + format_double(floor));
  }

  void acceptance() {
    AcceptanceOptions opt;
    for (double id : cfg_.numbers("acceptance.only", {})) opt.only.push_back(static_cast<int>(id));
    opt.seed = cfg_.seed;
    opt.artifact_dir = (out_ / "acceptance").string();
    std::ostringstream os;
    for (const auto& l : run_acceptance(opt)) {
      os << "criterion " << l.id << ' ' << l.name << ' ' << (l.pass ? "PASS" : "FAIL") << '\n';
      check("criterion_" + std::to_string(l.id), l.pass,
            l.detail + (l.error.empty() ? "" : " error=" + l.error) + " seconds=" + format_double(l.seconds));
    }
    std::vector<std::string> files;
    for (const auto& e : fs::directory_iterator(opt.artifact_dir))
      files.push_back("acceptance/" + e.path().filename().string());
    std::sort(files.begin(), files.end());
    res_.artifacts.insert(res_.artifacts.end(), files.begin(), files.end());
    text("acceptance.txt", os.str());
  }
};

json manifest_inputs(const ExperimentConfig& cfg) {
  const auto& h = cfg.hamiltonian;
  const auto& d = cfg.data;
  json j;
  j["hamiltonian"] = {{"kind", h.kind}, {"dim", h.dim}, {"exponent", h.exponent}, {"matrix", h.matrix},
                      {"ball", h.ball}, {"table", h.table}, {"box_half", h.box_half}};
  j["grid"] = {{"n", cfg.grid.n}, {"lo", cfg.grid.lo}, {"hi", cfg.grid.hi}};
  j["data"] = {{"family", d.family}, {"slope", d.slope}, {"offset", d.offset}, {"k", d.k},
               {"vertex", d.vertex}, {"amplitude", d.amplitude}, {"modes", d.modes}, {"path", d.path}};
  json p = json::object();
  for (const auto& [k, v] : cfg.params)
    if (k.rfind("tolerances.", 0) != 0) p[k] = v;
  j["parameters"] = p;
  return j;
}

}  // namespace

std::optional<Task> parse_task(const std::string& name) {
  for (const auto& [t, n] : kTaskNames)
    if (name == n) return t;
  return std::nullopt;
}

const char* to_string(Task t) { return kTaskNames.at(t); }

double ExperimentConfig::number(const std::string& key, double fallback) const {
  auto it = params.find(key);
  return it == params.end() ? fallback : parse_number(key, it->second);
}

std::string ExperimentConfig::text(const std::string& key, const std::string& fallback) const {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

std::vector<double> ExperimentConfig::numbers(const std::string& key, const std::vector<double>& fallback) const {
  auto it = params.find(key);
  return it == params.end() ? fallback : parse_list(key, it->second);
}

ExperimentConfig parse_config(std::istream& is, Task task, const std::string& base_dir) {
  boost::property_tree::ptree pt;
  try {
    boost::property_tree::ini_parser::read_ini(is, pt);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw Error(ErrorKind::input, std::string("config: ") + e.what());
  }
  ExperimentConfig cfg;
  cfg.task = task;
  std::map<std::string, std::string> kv;
  for (const auto& [section, body] : pt) {
    auto known = kKnownKeys.find(section);
    if (known == kKnownKeys.end()) throw Error(ErrorKind::input, "config: unknown section [" + section + "]");
    if (body.empty() && !body.data().empty())
      throw Error(ErrorKind::input, "config: key " + section + " outside a section");
    for (const auto& [key, val] : body) {
      if (!known->second.count(key))
        throw Error(ErrorKind::input, "config: unknown key " + key + " in [" + section + "]");
      kv[section + "." + key] = val.data();
    }
  }
  auto take = [&](const std::string& k) -> std::optional<std::string> {
    auto it = kv.find(k);
    if (it == kv.end()) return std::nullopt;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  auto num = [&](const std::string& k, double& dst) {
    if (auto v = take(k)) dst = parse_number(k, *v);
  };
  auto list = [&](const std::string& k, std::vector<double>& dst) {
    if (auto v = take(k)) dst = parse_list(k, *v);
  };

  if (auto v = take("run.out")) cfg.out_dir = *v;
  if (auto v = take("run.seed")) {
    auto r = std::from_chars(v->data(), v->data() + v->size(), cfg.seed);
    if (r.ec != std::errc() || r.ptr != v->data() + v->size())
      throw Error(ErrorKind::input, "config: run.seed must be an unsigned integer");
  }

  auto& h = cfg.hamiltonian;
  if (auto v = take("hamiltonian.kind")) h.kind = *v;
  double dim = h.dim;
  num("hamiltonian.dim", dim);
  h.dim = static_cast<int>(dim);
  num("hamiltonian.exponent", h.exponent);
  list("hamiltonian.matrix", h.matrix);
  list("hamiltonian.ball", h.ball);
  if (auto v = take("hamiltonian.table")) h.table = resolve(base_dir, *v);
  num("hamiltonian.box_half", h.box_half);

  std::vector<double> n;
  list("grid.n", n);
  if (!n.empty()) {
    cfg.grid.n.clear();
    for (double x : n) cfg.grid.n.push_back(static_cast<int>(x));
    if (n.size() == 1) cfg.grid.lo.resize(1), cfg.grid.hi.resize(1);
  }
  list("grid.lo", cfg.grid.lo);
  list("grid.hi", cfg.grid.hi);

  auto& d = cfg.data;
  if (auto v = take("data.family")) d.family = *v;
  list("data.slope", d.slope);
  num("data.offset", d.offset);
  num("data.k", d.k);
  list("data.vertex", d.vertex);
  num("data.amplitude", d.amplitude);
  double modes = d.modes;
  num("data.modes", modes);
  d.modes = static_cast<int>(modes);
  if (auto v = take("data.path")) d.path = resolve(base_dir, *v);

  cfg.params = std::move(kv);
  cfg.out_dir = fs::absolute(fs::path(cfg.out_dir)).lexically_normal().string();
  return cfg;
}

ExperimentConfig load_config(const std::string& path, Task task) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorKind::input, "cannot read config " + path);
  auto base = fs::absolute(fs::path(path)).parent_path().string();
  auto cfg = parse_config(is, task, base);
  cfg.config_path = fs::absolute(fs::path(path)).lexically_normal().string();
  return cfg;
}

HamiltonianModel make_hamiltonian(const HamiltonianSpec& s) {
  if (s.dim < 1 || s.dim > 2) throw Error(ErrorKind::input, "hamiltonian.dim must be 1 or 2");
  if (s.kind == "power") return HamiltonianModel::power(s.dim, s.exponent, s.box_half);
  if (s.kind == "quadratic") {
    if (static_cast<int>(s.matrix.size()) != s.dim * s.dim)
      throw Error(ErrorKind::input, "hamiltonian.matrix needs dim^2 entries");
    Eigen::MatrixXd A(s.dim, s.dim);
    for (int r = 0; r < s.dim; ++r)
      for (int c = 0; c < s.dim; ++c) A(r, c) = s.matrix[r * s.dim + c];
    return HamiltonianModel::quadratic(A, s.box_half);
  }
  if (s.kind == "polygon") {
    if (s.ball.empty() || s.ball.size() % s.dim != 0)
      throw Error(ErrorKind::input, "hamiltonian.ball needs a multiple of dim entries");
    std::vector<Vec> pts;
    for (std::size_t i = 0; i < s.ball.size(); i += s.dim) {
      Vec p(s.dim);
      for (int a = 0; a < s.dim; ++a) p[a] = s.ball[i + a];
      pts.push_back(p);
    }
    return HamiltonianModel::sampled_norm(pts, s.box_half);
  }
  if (s.kind == "table") {
    if (s.table.empty()) throw Error(ErrorKind::input, "hamiltonian.table path missing");
    return HamiltonianModel::table(read_csv(s.table));
  }
  throw Error(ErrorKind::input, "hamiltonian.kind must be power, quadratic, polygon or table");
}

Grid make_grid(const GridSpec& s) {
  const std::size_t d = s.n.size();
  if (d < 1 || d > 2 || s.lo.size() != d || s.hi.size() != d)
    throw Error(ErrorKind::input, "grid.n, grid.lo and grid.hi need 1 or 2 matching entries");
  for (std::size_t a = 0; a < d; ++a)
    if (s.n[a] < 2 || !(s.hi[a] > s.lo[a])) throw Error(ErrorKind::input, "grid needs n >= 2 and hi > lo");
  if (d == 1) return Grid::line(s.n[0], s.lo[0], s.hi[0]);
  return Grid::square(s.n[0], s.n[1], s.lo[0], s.hi[0], s.lo[1], s.hi[1]);
}

ScalarField make_data(const DataSpec& s, const Grid& g, const HamiltonianModel& H, std::uint64_t seed) {
  ScalarField u;
  if (s.family == "affine") {
    Vec p = to_vec(s.slope, g.dims, "data.slope");
    u = ScalarField(g);
    for (std::size_t i = 0; i < g.size(); ++i) u[i] = p.dot(point_vec(g, i)) + s.offset;
  } else if (s.family == "cone") {
    Vec v = to_vec(s.vertex, g.dims, "data.vertex");
    auto cd = cone_data(H, s.k);
    u = ScalarField(g);
    for (std::size_t i = 0; i < g.size(); ++i) u[i] = cd.value(Vec(point_vec(g, i) - v)) + s.offset;
  } else if (s.family == "aronsson-exemplar") {
    if (g.dims != 2) throw Error(ErrorKind::input, "the exemplar family is two-dimensional");
    u = sample(g, exemplar);
  } else if (s.family == "random-seeded") {
    // Smooth trigonometric sum with seeded frequencies and phases.
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> W(-4, 4), P(0, 2 * std::numbers::pi);
    std::vector<std::array<double, 3>> m(std::max(1, s.modes));
    for (auto& c : m) c = {W(rng), W(rng), P(rng)};
    u = sample(g, [&](double x, double y) {
      double v = 0;
      for (std::size_t j = 0; j < m.size(); ++j)
        v += s.amplitude / static_cast<double>(j + 1) * std::sin(m[j][0] * x + m[j][1] * y + m[j][2]);
      return v;
    });
  } else {
    throw Error(ErrorKind::input, "data.family must be affine, cone, aronsson-exemplar, random-seeded or file");
  }
  u.mark_edge_boundary();
  return u;
}

std::optional<ScalarField> exact_solution(const DataSpec& s, const Grid& g, const HamiltonianModel& H) {
  if (s.family == "affine") return make_data(s, g, H, 0);
  if (s.family == "cone") {
    Vec v = to_vec(s.vertex, g.dims, "data.vertex");
    for (int a = 0; a < g.dims; ++a)
      if (v[a] < g.lo(a) || v[a] > g.hi(a)) return make_data(s, g, H, 0);
    return std::nullopt;  // vertex inside: not a minimiser there
  }
  if (s.family == "aronsson-exemplar" && H.kind() == HamKind::power && H.exponent() == 2.0 && g.dims == 2) {
    for (int a = 0; a < 2; ++a)
      if (g.lo(a) <= 0.5 && g.hi(a) >= 0.5) return std::nullopt;  // crosses an axis of symmetry
    return make_data(s, g, H, 0);
  }
  return std::nullopt;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string fnv1a64_hex(const std::string& bytes) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

void write_xy(const std::string& path, const std::string& header, const std::vector<double>& x,
              const std::vector<double>& y) {
  if (x.size() != y.size()) throw Error(ErrorKind::input, "xy columns differ in length");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::input, "cannot write " + path);
  os << "# " << header << '\n';
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (is_inf(y[i]) || is_neg_inf(y[i])) continue;  // gnuplot breaks on the sentinel
    os << format_double(x[i]) << ' ' << format_double(y[i]) << '\n';
  }
}

RunResult run_experiment(const ExperimentConfig& cfg) {
  RunResult res;
  fs::create_directories(cfg.out_dir);
  std::string error_kind;
  try {
    Runner(cfg, res).run();
  } catch (const Error& e) {
    res.error = e.what();
    error_kind = to_string(e.kind());
  } catch (const std::exception& e) {
    res.error = e.what();
    error_kind = "internal";
  }
  const bool all_pass = std::all_of(res.checks.begin(), res.checks.end(), [](const auto& c) { return c.pass; });
  res.exit_code = res.error.empty() && all_pass ? 0 : 1;

  json m;
  m["task"] = to_string(cfg.task);
  m["seed"] = cfg.seed;
  if (!cfg.config_path.empty())
    m["config"] = {{"path", cfg.config_path}, {"fnv1a64", fnv1a64_hex(slurp(cfg.config_path))}};
  m["inputs"] = manifest_inputs(cfg);
  json tol = json::object();
  for (const auto& [k, v] : kDefaultTolerances) tol[k] = cfg.number("tolerances." + k, v);
  m["tolerances"] = tol;
  json arts = json::array();
  for (const auto& a : res.artifacts) {
    std::string bytes = slurp((fs::path(cfg.out_dir) / a).string());
    arts.push_back({{"file", a}, {"bytes", bytes.size()}, {"fnv1a64", fnv1a64_hex(bytes)}});
  }
  m["artifacts"] = arts;
  json checks = json::array();
  for (const auto& c : res.checks) checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  m["checks"] = checks;
  m["status"] = !res.error.empty() ? "error" : all_pass ? "pass" : "fail";
  if (!res.error.empty()) m["error"] = {{"kind", error_kind}, {"message", res.error}};
  res.manifest_path = (fs::path(cfg.out_dir) / "manifest.json").string();
  std::ofstream os(res.manifest_path, std::ios::binary);
  os << m.dump(2) << '\n';
  return res;
}

}  // namespace hlx
