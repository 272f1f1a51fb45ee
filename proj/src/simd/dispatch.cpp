#include <atomic>
#include <cfenv>
#include <cstdlib>
#include <cstring>

#include "hlx/simd.hpp"

namespace hlx::simd {

namespace {

Backend detect() {
  if (const char* env = std::getenv("HLX_SIMD")) {
    if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
  }
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2")) return Backend::avx2;
#elif defined(__aarch64__)
  return Backend::neon;
#endif
  return Backend::scalar;
}

std::atomic<int> g_forced{-1};

Backend current() {
  int f = g_forced.load(std::memory_order_relaxed);
  if (f >= 0) return static_cast<Backend>(f);
  static const Backend detected = detect();
  return detected;
}

}  // namespace

const char* name(Backend b) {
  switch (b) {
    case Backend::scalar: return "scalar";
    case Backend::avx2: return "avx2";
    case Backend::neon: return "neon";
  }
  return "?";
}

bool available(Backend b) {
  switch (b) {
    case Backend::scalar: return true;
    case Backend::avx2:
#if defined(__x86_64__) || defined(__i386__)
      __builtin_cpu_init();
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Backend::neon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Backend active() { return current(); }

void force(std::optional<Backend> b) {
  if (b && !available(*b)) b = Backend::scalar;
  g_forced.store(b ? static_cast<int>(*b) : -1, std::memory_order_relaxed);
}

#if defined(__x86_64__) || defined(__i386__)
#define HLX_DISPATCH(fn, ...)                                  \
  switch (current()) {                                         \
    case Backend::avx2: return avx2::fn(__VA_ARGS__);          \
    default: return scalar::fn(__VA_ARGS__);                   \
  }
#elif defined(__aarch64__)
#define HLX_DISPATCH(fn, ...)                                  \
  switch (current()) {                                         \
    case Backend::neon: return neon::fn(__VA_ARGS__);          \
    default: return scalar::fn(__VA_ARGS__);                   \
  }
#else
#define HLX_DISPATCH(fn, ...) return scalar::fn(__VA_ARGS__);
#endif

void shifted_max_sub(double* out, const double* in, std::size_t n, double c) {
  HLX_DISPATCH(shifted_max_sub, out, in, n, c)
}
void shifted_min_add(double* out, const double* in, std::size_t n, double c) {
  HLX_DISPATCH(shifted_min_add, out, in, n, c)
}
double conj_max(const double* x, const double* f, std::size_t n, double s, std::size_t* arg) {
  HLX_DISPATCH(conj_max, x, f, n, s, arg)
}
double max_abs_diff(const double* a, const double* b, std::size_t n) {
  HLX_DISPATCH(max_abs_diff, a, b, n)
}
void relax(double* out, const double* u, const double* a, const double* b, std::size_t n,
           double lambda) {
  HLX_DISPATCH(relax, out, u, a, b, n, lambda)
}

RoundingScope::RoundingScope(Rounding r) : saved_(std::fegetround()) {
  int mode = FE_TONEAREST;
  if (r == Rounding::upward) mode = FE_UPWARD;
  if (r == Rounding::downward) mode = FE_DOWNWARD;
  std::fesetround(mode);
}

RoundingScope::~RoundingScope() { std::fesetround(saved_); }

}  // namespace hlx::simd
