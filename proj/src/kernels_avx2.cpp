// Compiled with -mavx2. Only reached through avx2_table() after a CPU check.

#include <immintrin.h>

#include "hetcache/kernels.hpp"

namespace hetcache::kernels {

namespace {

// (l0 + l2) + (l1 + l3), matching the scalar reference.
inline double combine(__m256d acc) {
  const __m128d lo = _mm256_castpd256_pd128(acc);   // l0 l1
  const __m128d hi = _mm256_extractf128_pd(acc, 1);  // l2 l3
  const __m128d pair = _mm_add_pd(lo, hi);           // l0+l2, l1+l3
  return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

double sum_ratio(const double* num, const double* den, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  const std::size_t n4 = n - n % 4;
  for (std::size_t i = 0; i < n4; i += 4)
    acc = _mm256_add_pd(acc, _mm256_div_pd(_mm256_loadu_pd(num + i), _mm256_loadu_pd(den + i)));
  double s = combine(acc);
  for (std::size_t i = n4; i < n; ++i) s += num[i] / den[i];
  return s;
}

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  const std::size_t n4 = n - n % 4;
  for (std::size_t i = 0; i < n4; i += 4)
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  double s = combine(acc);
  for (std::size_t i = n4; i < n; ++i) s += a[i] * b[i];
  return s;
}

double sum_where_greater(const double* values, const double* keys, double threshold, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  const __m256d t = _mm256_set1_pd(threshold);
  const std::size_t n4 = n - n % 4;
  for (std::size_t i = 0; i < n4; i += 4) {
    const __m256d mask = _mm256_cmp_pd(_mm256_loadu_pd(keys + i), t, _CMP_GT_OQ);
    acc = _mm256_add_pd(acc, _mm256_and_pd(mask, _mm256_loadu_pd(values + i)));
  }
  double s = combine(acc);
  for (std::size_t i = n4; i < n; ++i)
    if (keys[i] > threshold) s += values[i];
  return s;
}

double sum_where_at_most(const double* values, const double* keys, double threshold, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  const __m256d t = _mm256_set1_pd(threshold);
  const std::size_t n4 = n - n % 4;
  for (std::size_t i = 0; i < n4; i += 4) {
    const __m256d mask = _mm256_cmp_pd(_mm256_loadu_pd(keys + i), t, _CMP_LE_OQ);
    acc = _mm256_add_pd(acc, _mm256_and_pd(mask, _mm256_loadu_pd(values + i)));
  }
  double s = combine(acc);
  for (std::size_t i = n4; i < n; ++i)
    if (keys[i] <= threshold) s += values[i];
  return s;
}

void divide(const double* num, const double* den, double* out, std::size_t n) {
  const std::size_t n4 = n - n % 4;
  for (std::size_t i = 0; i < n4; i += 4)
    _mm256_storeu_pd(out + i, _mm256_div_pd(_mm256_loadu_pd(num + i), _mm256_loadu_pd(den + i)));
  for (std::size_t i = n4; i < n; ++i) out[i] = num[i] / den[i];
}

void benefit_ratios(const double* rl, const double* r0, double backhaul, double* rho1, double* rho0,
                    std::size_t n) {
  const __m256d b = _mm256_set1_pd(backhaul);
  const std::size_t n4 = n - n % 4;
  for (std::size_t i = 0; i < n4; i += 4) {
    const __m256d pico = _mm256_loadu_pd(rl + i);
    const __m256d r1 = _mm256_div_pd(pico, _mm256_loadu_pd(r0 + i));
    _mm256_storeu_pd(rho1 + i, r1);
    _mm256_storeu_pd(rho0 + i, _mm256_sub_pd(r1, _mm256_div_pd(pico, b)));
  }
  for (std::size_t i = n4; i < n; ++i) {
    rho1[i] = rl[i] / r0[i];
    rho0[i] = rho1[i] - rl[i] / backhaul;
  }
}

constexpr Table kAvx2{sum_ratio, dot, sum_where_greater, sum_where_at_most, divide, benefit_ratios};

}  // namespace

const Table* avx2_table_impl() { return &kAvx2; }

}  // namespace hetcache::kernels
