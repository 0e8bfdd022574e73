#include "spinlab/kernels.hpp"

#include <cmath>

namespace spinlab::kernels {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum_scalar(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i];
  return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scal_scalar(double alpha, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

void shift_scalar(double delta, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] += delta;
}

double abs_diff_sum_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += std::fabs(a[i] - b[i]);
  return acc;
}

std::int64_t sum_i8_scalar(const std::int8_t* s, std::size_t n) {
  std::int64_t acc = 0;
  for (std::size_t i = 0; i < n; ++i) acc += s[i];
  return acc;
}

const Impl kScalar = {
    "scalar",       dot_scalar,          sum_scalar,    axpy_scalar,
    scal_scalar,    shift_scalar,        abs_diff_sum_scalar, sum_i8_scalar,
};

}  // namespace

const Impl& scalar() { return kScalar; }

#if defined(SPINLAB_BUILD_AVX2)
const Impl* avx2_impl();  // defined in kernels_avx2.cpp
#endif

const Impl& active() {
#if defined(SPINLAB_BUILD_AVX2)
  static const Impl* chosen =
      __builtin_cpu_supports("avx2") ? avx2_impl() : &kScalar;
  return *chosen;
#else
  return kScalar;
#endif
}

bool avx2_active() { return &active() != &kScalar; }

}  // namespace spinlab::kernels
