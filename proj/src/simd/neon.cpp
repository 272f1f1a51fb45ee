#if defined(__aarch64__)

#include <arm_neon.h>

#include "hlx/simd.hpp"

namespace hlx::simd::neon {

void shifted_max_sub(double* out, const double* in, std::size_t n, double c) {
  const float64x2_t vc = vdupq_n_f64(c);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t v = vsubq_f64(vld1q_f64(in + i), vc);
    vst1q_f64(out + i, vmaxq_f64(vld1q_f64(out + i), v));
  }
  for (; i < n; ++i) {
    double v = in[i] - c;
    if (v > out[i]) out[i] = v;
  }
}

void shifted_min_add(double* out, const double* in, std::size_t n, double c) {
  const float64x2_t vc = vdupq_n_f64(c);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t v = vaddq_f64(vld1q_f64(in + i), vc);
    vst1q_f64(out + i, vminq_f64(vld1q_f64(out + i), v));
  }
  for (; i < n; ++i) {
    double v = in[i] + c;
    if (v < out[i]) out[i] = v;
  }
}

double conj_max(const double* x, const double* f, std::size_t n, double s, std::size_t* arg) {
  const float64x2_t vs = vdupq_n_f64(s);
  float64x2_t best = vdupq_n_f64(-1e308);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t p = vmulq_f64(vs, vld1q_f64(x + i));
    best = vmaxq_f64(best, vsubq_f64(p, vld1q_f64(f + i)));
  }
  double m = vmaxvq_f64(best);
  for (std::size_t j = i; j < n; ++j) {
    double v = s * x[j] - f[j];
    if (v > m) m = v;
  }
  if (arg) {
    std::size_t bi = 0;
    for (std::size_t j = 0; j < n; ++j) {
      double p = s * x[j];
      if (p - f[j] == m) {
        bi = j;
        break;
      }
    }
    *arg = bi;
  }
  return m;
}

double max_abs_diff(const double* a, const double* b, std::size_t n) {
  float64x2_t m = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) m = vmaxq_f64(m, vabdq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  double r = vmaxvq_f64(m);
  for (; i < n; ++i) {
    double d = a[i] - b[i];
    d = d < 0 ? -d : d;
    if (d > r) r = d;
  }
  return r;
}

void relax(double* out, const double* u, const double* a, const double* b, std::size_t n,
           double lambda) {
  const float64x2_t half = vdupq_n_f64(0.5);
  std::size_t i = 0;
  if (lambda == 1.0) {
    for (; i + 2 <= n; i += 2)
      vst1q_f64(out + i, vmulq_f64(half, vaddq_f64(vld1q_f64(a + i), vld1q_f64(b + i))));
    for (; i < n; ++i) out[i] = 0.5 * (a[i] + b[i]);
    return;
  }
  const double keep = 1.0 - lambda;
  const float64x2_t vk = vdupq_n_f64(keep);
  const float64x2_t vl = vdupq_n_f64(lambda);
  for (; i + 2 <= n; i += 2) {
    float64x2_t m = vmulq_f64(half, vaddq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    float64x2_t x = vmulq_f64(vk, vld1q_f64(u + i));
    vst1q_f64(out + i, vaddq_f64(x, vmulq_f64(vl, m)));
  }
  for (; i < n; ++i) {
    double m = 0.5 * (a[i] + b[i]);
    double x = keep * u[i];
    double y = lambda * m;
    out[i] = x + y;
  }
}

}  // namespace hlx::simd::neon

#endif
