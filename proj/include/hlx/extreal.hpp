#pragma once

#include <cmath>

// Extended reals. +inf is carried as a large finite constant so that SIMD
// max/min reductions never see NaN or IEEE infinities.
namespace hlx {

inline constexpr double kInf = 1e300;

inline bool is_inf(double x) { return x >= 0.5 * kInf; }
inline bool is_neg_inf(double x) { return x <= -0.5 * kInf; }

inline double sat(double x) {
  if (x >= kInf) return kInf;
  if (x <= -kInf) return -kInf;
  return x;
}

inline double sat_add(double a, double b) {
  if (is_inf(a) || is_inf(b)) return kInf;
  if (is_neg_inf(a) || is_neg_inf(b)) return -kInf;
  return sat(a + b);
}

inline double sat_mul(double t, double a) {
  if (is_inf(a)) return kInf;
  return sat(t * a);
}

}  // namespace hlx
