// Dense numeric inner loops: scalar reference implementations plus AVX2
// variants selected at runtime off cpuid. Only genuinely data-parallel
// arithmetic lives here (spectral estimation, full-array reductions); the
// event-driven simulation core is branchy and stays scalar.
#pragma once

#include <cstddef>
#include <cstdint>

namespace spinlab::kernels {

struct Impl {
  const char* name;
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*sum)(const double* a, std::size_t n);
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);  // y += alpha*x
  void (*scal)(double alpha, double* x, std::size_t n);                   // x *= alpha
  void (*shift)(double delta, double* x, std::size_t n);                  // x += delta
  double (*abs_diff_sum)(const double* a, const double* b, std::size_t n);
  std::int64_t (*sum_i8)(const std::int8_t* s, std::size_t n);
};

const Impl& scalar();
const Impl& active();  // AVX2 when compiled in and the CPU supports it
bool avx2_active();

inline double dot(const double* a, const double* b, std::size_t n) { return active().dot(a, b, n); }
inline double sum(const double* a, std::size_t n) { return active().sum(a, n); }
inline void axpy(double alpha, const double* x, double* y, std::size_t n) { active().axpy(alpha, x, y, n); }
inline void scal(double alpha, double* x, std::size_t n) { active().scal(alpha, x, n); }
inline void shift(double delta, double* x, std::size_t n) { active().shift(delta, x, n); }
inline double abs_diff_sum(const double* a, const double* b, std::size_t n) { return active().abs_diff_sum(a, b, n); }
inline std::int64_t sum_i8(const std::int8_t* s, std::size_t n) { return active().sum_i8(s, n); }

}  // namespace spinlab::kernels
