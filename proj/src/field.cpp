#include "hlx/field.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hlx/error.hpp"
#include "hlx/extreal.hpp"

namespace hlx {

const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::evaluation: return "evaluation";
    case ErrorKind::input: return "input";
    case ErrorKind::resolution: return "resolution";
    case ErrorKind::locality: return "locality";
    case ErrorKind::degenerate_stencil: return "degenerate stencil";
    case ErrorKind::level: return "level";
    case ErrorKind::topology: return "topology";
    case ErrorKind::fit: return "fit";
    case ErrorKind::margin: return "margin";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::grid_mismatch: return "grid mismatch";
  }
  return "unknown";
}

Grid Grid::line(int n0, double lo, double hi) {
  if (n0 < 2) throw Error(ErrorKind::input, "grid needs at least 2 nodes");
  Grid g;
  g.dims = 1;
  g.n = {n0, 1};
  g.h = {(hi - lo) / (n0 - 1), 1.0};
  g.origin = {lo, 0.0};
  return g;
}

Grid Grid::square(int n0, int n1, double lo0, double hi0, double lo1, double hi1) {
  if (n0 < 2 || n1 < 2) throw Error(ErrorKind::input, "grid needs at least 2 nodes per axis");
  Grid g;
  g.dims = 2;
  g.n = {n0, n1};
  g.h = {(hi0 - lo0) / (n0 - 1), (hi1 - lo1) / (n1 - 1)};
  g.origin = {lo0, lo1};
  return g;
}

double Grid::diameter() const {
  double a = hi(0) - lo(0);
  if (dims == 1) return a;
  double b = hi(1) - lo(1);
  return std::sqrt(a * a + b * b);
}

double Grid::edge_distance(std::size_t idx) const {
  auto c = coords(idx);
  double d = std::min(c[0], n[0] - 1 - c[0]) * h[0];
  if (dims > 1) d = std::min(d, std::min(c[1], n[1] - 1 - c[1]) * h[1]);
  return d;
}

bool Grid::same_as(const Grid& o) const {
  if (dims != o.dims) return false;
  for (int a = 0; a < dims; ++a)
    if (n[a] != o.n[a] || h[a] != o.h[a] || origin[a] != o.origin[a]) return false;
  return true;
}

void ScalarField::mark_edge_boundary() {
  for (std::size_t i = 0; i < size(); ++i) {
    auto c = grid.coords(i);
    bool e = c[0] == 0 || c[0] == grid.n[0] - 1;
    if (grid.dims > 1) e = e || c[1] == 0 || c[1] == grid.n[1] - 1;
    boundary[i] = e ? 1 : 0;
  }
}

double ScalarField::min() const { return *std::min_element(values.begin(), values.end()); }
double ScalarField::max() const { return *std::max_element(values.begin(), values.end()); }

double ScalarField::oscillation() const {
  if (!osc_cache) osc_cache = max() - min();
  return *osc_cache;
}

std::string format_double(double x) {
  if (is_inf(x)) return "inf";
  if (is_neg_inf(x)) return "-inf";
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

void write_csv(std::ostream& os, const ScalarField& f) {
  const Grid& g = f.grid;
  os << g.dims;
  for (int a = 0; a < g.dims; ++a) os << ',' << g.n[a];
  for (int a = 0; a < g.dims; ++a) os << ',' << format_double(g.h[a]);
  for (int a = 0; a < g.dims; ++a) os << ',' << format_double(g.origin[a]);
  os << '\n';
  for (double v : f.values) os << format_double(v) << '\n';
}

void write_csv(const std::string& path, const ScalarField& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::input, "cannot write " + path);
  write_csv(os, f);
}

static double parse_value(const std::string& s) {
  if (s == "inf" || s == "+inf") return kInf;
  if (s == "-inf") return -kInf;
  double v = 0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw Error(ErrorKind::input, "bad number '" + s + "'");
  return v;
}

ScalarField read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorKind::input, "empty field file");
  std::vector<std::string> tok;
  std::stringstream ss(line);
  for (std::string t; std::getline(ss, t, ',');) tok.push_back(t);
  if (tok.empty()) throw Error(ErrorKind::input, "empty header");
  int dims = static_cast<int>(parse_value(tok[0]));
  if (dims < 1 || dims > 2 || tok.size() != static_cast<std::size_t>(1 + 3 * dims))
    throw Error(ErrorKind::input, "bad field header");
  Grid g;
  g.dims = dims;
  for (int a = 0; a < dims; ++a) {
    g.n[a] = static_cast<int>(parse_value(tok[1 + a]));
    g.h[a] = parse_value(tok[1 + dims + a]);
    g.origin[a] = parse_value(tok[1 + 2 * dims + a]);
    if (g.n[a] < 1 || !(g.h[a] > 0)) throw Error(ErrorKind::input, "bad grid in header");
  }
  ScalarField f(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!std::getline(is, line)) throw Error(ErrorKind::input, "field file truncated");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    f.values[i] = parse_value(line);
  }
  return f;
}

ScalarField read_csv(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorKind::input, "cannot read " + path);
  return read_csv(is);
}

ScalarField mask_field(const Grid& g, const std::vector<std::uint8_t>& mask) {
  ScalarField f(g);
  for (std::size_t i = 0; i < g.size(); ++i) f.values[i] = mask[i] ? 1.0 : 0.0;
  return f;
}

}  // namespace hlx
