#include <cmath>

#include "hlx/simd.hpp"

namespace hlx::simd::scalar {

void shifted_max_sub(double* out, const double* in, std::size_t n, double c) {
  for (std::size_t i = 0; i < n; ++i) {
    double v = in[i] - c;
    if (v > out[i]) out[i] = v;
  }
}

void shifted_min_add(double* out, const double* in, std::size_t n, double c) {
  for (std::size_t i = 0; i < n; ++i) {
    double v = in[i] + c;
    if (v < out[i]) out[i] = v;
  }
}

double conj_max(const double* x, const double* f, std::size_t n, double s, std::size_t* arg) {
  double best = -1e308;
  std::size_t bi = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double p = s * x[i];
    double v = p - f[i];
    if (v > best) {
      best = v;
      bi = i;
    }
  }
  if (arg) *arg = bi;
  return best;
}

double max_abs_diff(const double* a, const double* b, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double d = std::fabs(a[i] - b[i]);
    if (d > m) m = d;
  }
  return m;
}

void relax(double* out, const double* u, const double* a, const double* b, std::size_t n,
           double lambda) {
  if (lambda == 1.0) {
    for (std::size_t i = 0; i < n; ++i) out[i] = 0.5 * (a[i] + b[i]);
    return;
  }
  double keep = 1.0 - lambda;
  for (std::size_t i = 0; i < n; ++i) {
    double m = 0.5 * (a[i] + b[i]);
    double x = keep * u[i];
    double y = lambda * m;
    out[i] = x + y;
  }
}

}  // namespace hlx::simd::scalar
