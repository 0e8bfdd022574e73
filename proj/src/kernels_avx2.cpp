// AVX2 kernel variants. This TU is compiled with -mavx2 -mfma; nothing here
// runs unless cpuid reported avx2 at dispatch time.
#include <immintrin.h>

#include <cmath>

#include "spinlab/kernels.hpp"

namespace spinlab::kernels {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum_avx2(const double* a, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
  double s = hsum(acc);
  for (; i < n; ++i) s += a[i];
  return s;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void scal_avx2(double alpha, double* x, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) x[i] *= alpha;
}

void shift_avx2(double delta, double* x, std::size_t n) {
  const __m256d vd = _mm256_set1_pd(delta);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(x + i, _mm256_add_pd(vd, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) x[i] += delta;
}

double abs_diff_sum_avx2(const double* a, const double* b, std::size_t n) {
  const __m256d signmask = _mm256_set1_pd(-0.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d diff = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_add_pd(acc, _mm256_andnot_pd(signmask, diff));
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += std::fabs(a[i] - b[i]);
  return s;
}

std::int64_t sum_i8_avx2(const std::int8_t* s, std::size_t n) {
  // Widen signed bytes to 16-bit, accumulate with madd against ones. Inner
  // block is capped so the 16/32-bit lanes cannot overflow.
  const __m256i ones16 = _mm256_set1_epi16(1);
  std::int64_t total = 0;
  std::size_t i = 0;
  while (i + 16 <= n) {
    std::size_t block_end = i + ((n - i) & ~std::size_t(15));
    if (block_end - i > std::size_t(1) << 20) block_end = i + (std::size_t(1) << 20);
    __m256i acc32 = _mm256_setzero_si256();
    for (; i + 16 <= block_end; i += 16) {
      __m128i bytes = _mm_loadu_si128(reinterpret_cast<const __m128i*>(s + i));
      __m256i w16 = _mm256_cvtepi8_epi16(bytes);
      acc32 = _mm256_add_epi32(acc32, _mm256_madd_epi16(w16, ones16));
    }
    alignas(32) std::int32_t lanes[8];
    _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), acc32);
    for (int k = 0; k < 8; ++k) total += lanes[k];
  }
  for (; i < n; ++i) total += s[i];
  return total;
}

const Impl kAvx2 = {
    "avx2",    dot_avx2,   sum_avx2,          axpy_avx2,
    scal_avx2, shift_avx2, abs_diff_sum_avx2, sum_i8_avx2,
};

}  // namespace

const Impl* avx2_impl() { return &kAvx2; }

}  // namespace spinlab::kernels
