#pragma once

// Data-parallel inner loops shared by the sampling and solver modules.
//
// Every kernel has a scalar reference implementation and, on x86-64, an AVX2
// variant picked at runtime. Reductions follow one canonical order in both:
// element i of the vectorizable prefix (length n - n % 4) is accumulated into
// lane i % 4, the lanes are combined as (l0 + l2) + (l1 + l3), and the tail is
// added sequentially. The two backends therefore return identical bits.

#include <cstddef>
#include <span>
#include <string_view>

namespace hetcache::kernels {

enum class Backend { scalar, avx2 };

std::string_view to_string(Backend b);

struct Table {
  /// sum_i num[i] / den[i]
  double (*sum_ratio)(const double* num, const double* den, std::size_t n);
  /// sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  /// sum of values[i] over entries with keys[i] > threshold
  double (*sum_where_greater)(const double* values, const double* keys, double threshold, std::size_t n);
  /// sum of values[i] over entries with keys[i] <= threshold
  double (*sum_where_at_most)(const double* values, const double* keys, double threshold, std::size_t n);
  /// out[i] = num[i] / den[i]
  void (*divide)(const double* num, const double* den, double* out, std::size_t n);
  /// rho1[i] = rl[i] / r0[i];  rho0[i] = rho1[i] - rl[i] / backhaul
  void (*benefit_ratios)(const double* rl, const double* r0, double backhaul, double* rho1,
                         double* rho0, std::size_t n);
};

const Table& scalar_table();
/// nullptr when AVX2 is unavailable at compile time or run time.
const Table* avx2_table();

bool backend_available(Backend b);
/// Forces a backend; throws DomainError if it is unavailable on this machine.
void select_backend(Backend b);
/// Resets to automatic selection (AVX2 when the CPU supports it).
void select_auto();
Backend active_backend();
const Table& active();

// Convenience wrappers over the active backend.
inline double sum_ratio(std::span<const double> num, std::span<const double> den) {
  return active().sum_ratio(num.data(), den.data(), num.size());
}
inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}
inline double sum_where_greater(std::span<const double> values, std::span<const double> keys,
                                double threshold) {
  return active().sum_where_greater(values.data(), keys.data(), threshold, values.size());
}
inline double sum_where_at_most(std::span<const double> values, std::span<const double> keys,
                                double threshold) {
  return active().sum_where_at_most(values.data(), keys.data(), threshold, values.size());
}
double sum(std::span<const double> values);

}  // namespace hetcache::kernels
