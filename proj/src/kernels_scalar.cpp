#include "hetcache/kernels.hpp"

namespace hetcache::kernels {

namespace {

double combine(const double lane[4]) { return (lane[0] + lane[2]) + (lane[1] + lane[3]); }

double sum_ratio(const double* num, const double* den, std::size_t n) {
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  const std::size_t n4 = n - n % 4;
  for (std::size_t i = 0; i < n4; ++i) lane[i % 4] += num[i] / den[i];
  double s = combine(lane);
  for (std::size_t i = n4; i < n; ++i) s += num[i] / den[i];
  return s;
}

double dot(const double* a, const double* b, std::size_t n) {
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  const std::size_t n4 = n - n % 4;
  for (std::size_t i = 0; i < n4; ++i) lane[i % 4] += a[i] * b[i];
  double s = combine(lane);
  for (std::size_t i = n4; i < n; ++i) s += a[i] * b[i];
  return s;
}

double sum_where_greater(const double* values, const double* keys, double threshold, std::size_t n) {
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  const std::size_t n4 = n - n % 4;
  for (std::size_t i = 0; i < n4; ++i)
    if (keys[i] > threshold) lane[i % 4] += values[i];
  double s = combine(lane);
  for (std::size_t i = n4; i < n; ++i)
    if (keys[i] > threshold) s += values[i];
  return s;
}

double sum_where_at_most(const double* values, const double* keys, double threshold, std::size_t n) {
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  const std::size_t n4 = n - n % 4;
  for (std::size_t i = 0; i < n4; ++i)
    if (keys[i] <= threshold) lane[i % 4] += values[i];
  double s = combine(lane);
  for (std::size_t i = n4; i < n; ++i)
    if (keys[i] <= threshold) s += values[i];
  return s;
}

void divide(const double* num, const double* den, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = num[i] / den[i];
}

void benefit_ratios(const double* rl, const double* r0, double backhaul, double* rho1, double* rho0,
                    std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    rho1[i] = rl[i] / r0[i];
    rho0[i] = rho1[i] - rl[i] / backhaul;
  }
}

constexpr Table kScalar{sum_ratio, dot, sum_where_greater, sum_where_at_most, divide, benefit_ratios};

}  // namespace

const Table& scalar_table() { return kScalar; }

}  // namespace hetcache::kernels
