#pragma once

#include <cstddef>
#include <optional>

// Data-parallel inner loops of the flows and the discrete conjugate.
// Every backend produces bit-identical results to the scalar reference.
namespace hlx::simd {

enum class Backend { scalar, avx2, neon };

const char* name(Backend b);
bool available(Backend b);
Backend active();
// Pins dispatch to one backend (tests); nullopt restores auto-detection.
void force(std::optional<Backend> b);

// out[i] = max(out[i], in[i] - c)
void shifted_max_sub(double* out, const double* in, std::size_t n, double c);
// out[i] = min(out[i], in[i] + c)
void shifted_min_add(double* out, const double* in, std::size_t n, double c);
// max_i (s*x[i] - f[i]), lowest index on ties; returns the value and writes the index.
double conj_max(const double* x, const double* f, std::size_t n, double s, std::size_t* arg);
double max_abs_diff(const double* a, const double* b, std::size_t n);
// out[i] = (1-lambda)*u[i] + lambda*0.5*(a[i]+b[i]); lambda == 1 gives 0.5*(a[i]+b[i]).
void relax(double* out, const double* u, const double* a, const double* b, std::size_t n,
           double lambda);

enum class Rounding { nearest, upward, downward };

class RoundingScope {
 public:
  explicit RoundingScope(Rounding r);
  ~RoundingScope();
  RoundingScope(const RoundingScope&) = delete;
  RoundingScope& operator=(const RoundingScope&) = delete;

 private:
  int saved_;
};

namespace scalar {
void shifted_max_sub(double* out, const double* in, std::size_t n, double c);
void shifted_min_add(double* out, const double* in, std::size_t n, double c);
double conj_max(const double* x, const double* f, std::size_t n, double s, std::size_t* arg);
double max_abs_diff(const double* a, const double* b, std::size_t n);
void relax(double* out, const double* u, const double* a, const double* b, std::size_t n,
           double lambda);
}  // namespace scalar

#if defined(__x86_64__) || defined(__i386__)
namespace avx2 {
void shifted_max_sub(double* out, const double* in, std::size_t n, double c);
void shifted_min_add(double* out, const double* in, std::size_t n, double c);
double conj_max(const double* x, const double* f, std::size_t n, double s, std::size_t* arg);
double max_abs_diff(const double* a, const double* b, std::size_t n);
void relax(double* out, const double* u, const double* a, const double* b, std::size_t n,
           double lambda);
}  // namespace avx2
#endif

#if defined(__aarch64__)
namespace neon {
void shifted_max_sub(double* out, const double* in, std::size_t n, double c);
void shifted_min_add(double* out, const double* in, std::size_t n, double c);
double conj_max(const double* x, const double* f, std::size_t n, double s, std::size_t* arg);
double max_abs_diff(const double* a, const double* b, std::size_t n);
void relax(double* out, const double* u, const double* a, const double* b, std::size_t n,
           double lambda);
}  // namespace neon
#endif

}  // namespace hlx::simd
