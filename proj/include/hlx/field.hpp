#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hlx {

// Rectangular node grid in 1 or 2 dimensions. Node (i0, i1) sits at
// origin + (i0*h0, i1*h1); storage is row-major with the last axis fastest.
struct Grid {
  int dims = 1;
  std::array<int, 2> n{1, 1};
  std::array<double, 2> h{1.0, 1.0};
  std::array<double, 2> origin{0.0, 0.0};

  static Grid line(int n0, double lo, double hi);
  static Grid square(int n0, int n1, double lo0, double hi0, double lo1, double hi1);

  std::size_t size() const { return static_cast<std::size_t>(n[0]) * (dims > 1 ? n[1] : 1); }
  int stride0() const { return dims > 1 ? n[1] : 1; }
  std::size_t index(int i0, int i1 = 0) const {
    return static_cast<std::size_t>(i0) * stride0() + i1;
  }
  std::array<int, 2> coords(std::size_t idx) const {
    if (dims == 1) return {static_cast<int>(idx), 0};
    return {static_cast<int>(idx / n[1]), static_cast<int>(idx % n[1])};
  }
  std::array<double, 2> point(std::size_t idx) const {
    auto c = coords(idx);
    return {origin[0] + c[0] * h[0], dims > 1 ? origin[1] + c[1] * h[1] : 0.0};
  }
  double lo(int a) const { return origin[a]; }
  double hi(int a) const { return origin[a] + (n[a] - 1) * h[a]; }
  double hmax() const { return dims > 1 ? std::max(h[0], h[1]) : h[0]; }
  double diameter() const;
  // Euclidean distance from node to the grid box edge.
  double edge_distance(std::size_t idx) const;
  bool same_as(const Grid& o) const;
};

struct ScalarField {
  Grid grid;
  std::vector<double> values;
  std::vector<std::uint8_t> boundary;
  mutable std::optional<double> osc_cache;

  ScalarField() = default;
  explicit ScalarField(const Grid& g, double fill = 0.0)
      : grid(g), values(g.size(), fill), boundary(g.size(), 0) {}

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }

  // Marks every node on the grid box edge as boundary.
  void mark_edge_boundary();
  double oscillation() const;
  double min() const;
  double max() const;
  void invalidate() { osc_cache.reset(); }
};

template <class F>
ScalarField sample(const Grid& g, F&& f) {
  ScalarField out(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto p = g.point(i);
    out.values[i] = f(p[0], p[1]);
  }
  return out;
}

void write_csv(std::ostream& os, const ScalarField& f);
void write_csv(const std::string& path, const ScalarField& f);
ScalarField read_csv(std::istream& is);
ScalarField read_csv(const std::string& path);
ScalarField mask_field(const Grid& g, const std::vector<std::uint8_t>& mask);

// Shortest round-trip decimal text; +inf sentinel printed as "inf".
std::string format_double(double x);

}  // namespace hlx
