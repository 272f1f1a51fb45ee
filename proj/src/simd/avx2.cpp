#if defined(__x86_64__) || defined(__i386__)

#include <immintrin.h>

#include "hlx/simd.hpp"

#define HLX_AVX2 __attribute__((target("avx2")))

namespace hlx::simd::avx2 {

HLX_AVX2 void shifted_max_sub(double* out, const double* in, std::size_t n, double c) {
  const __m256d vc = _mm256_set1_pd(c);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_sub_pd(_mm256_loadu_pd(in + i), vc);
    __m256d o = _mm256_loadu_pd(out + i);
    _mm256_storeu_pd(out + i, _mm256_max_pd(v, o));
  }
  for (; i < n; ++i) {
    double v = in[i] - c;
    if (v > out[i]) out[i] = v;
  }
}

HLX_AVX2 void shifted_min_add(double* out, const double* in, std::size_t n, double c) {
  const __m256d vc = _mm256_set1_pd(c);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_add_pd(_mm256_loadu_pd(in + i), vc);
    __m256d o = _mm256_loadu_pd(out + i);
    _mm256_storeu_pd(out + i, _mm256_min_pd(v, o));
  }
  for (; i < n; ++i) {
    double v = in[i] + c;
    if (v < out[i]) out[i] = v;
  }
}

HLX_AVX2 double conj_max(const double* x, const double* f, std::size_t n, double s,
                         std::size_t* arg) {
  const __m256d vs = _mm256_set1_pd(s);
  __m256d best = _mm256_set1_pd(-1e308);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d p = _mm256_mul_pd(vs, _mm256_loadu_pd(x + i));
    best = _mm256_max_pd(_mm256_sub_pd(p, _mm256_loadu_pd(f + i)), best);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, best);
  double m = lanes[0];
  for (int l = 1; l < 4; ++l)
    if (lanes[l] > m) m = lanes[l];
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

HLX_AVX2 double max_abs_diff(const double* a, const double* b, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    m = _mm256_max_pd(m, _mm256_andnot_pd(sign, d));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, m);
  double r = lanes[0];
  for (int l = 1; l < 4; ++l)
    if (lanes[l] > r) r = lanes[l];
  for (; i < n; ++i) {
    double d = a[i] - b[i];
    d = d < 0 ? -d : d;
    if (d > r) r = d;
  }
  return r;
}

HLX_AVX2 void relax(double* out, const double* u, const double* a, const double* b,
                    std::size_t n, double lambda) {
  const __m256d half = _mm256_set1_pd(0.5);
  std::size_t i = 0;
  if (lambda == 1.0) {
    for (; i + 4 <= n; i += 4) {
      __m256d s = _mm256_add_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
      _mm256_storeu_pd(out + i, _mm256_mul_pd(half, s));
    }
    for (; i < n; ++i) out[i] = 0.5 * (a[i] + b[i]);
    return;
  }
  const double keep = 1.0 - lambda;
  const __m256d vk = _mm256_set1_pd(keep);
  const __m256d vl = _mm256_set1_pd(lambda);
  for (; i + 4 <= n; i += 4) {
    __m256d m = _mm256_mul_pd(half, _mm256_add_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    __m256d x = _mm256_mul_pd(vk, _mm256_loadu_pd(u + i));
    _mm256_storeu_pd(out + i, _mm256_add_pd(x, _mm256_mul_pd(vl, m)));
  }
  for (; i < n; ++i) {
    double m = 0.5 * (a[i] + b[i]);
    double x = keep * u[i];
    double y = lambda * m;
    out[i] = x + y;
  }
}

}  // namespace hlx::simd::avx2

#endif
