#include "hetcache/kernels.hpp"

#include <atomic>
#include <vector>

#include "hetcache/errors.hpp"

namespace hetcache::kernels {

#if defined(HETCACHE_HAVE_AVX2)
const Table* avx2_table_impl();
#endif

namespace {

bool cpu_has_avx2() {
#if defined(HETCACHE_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const bool has = __builtin_cpu_supports("avx2");
  return has;
#else
  return false;
#endif
}

std::atomic<const Table*> g_forced{nullptr};

}  // namespace

std::string_view to_string(Backend b) { return b == Backend::avx2 ? "avx2" : "scalar"; }

const Table* avx2_table() {
#if defined(HETCACHE_HAVE_AVX2)
  return cpu_has_avx2() ? avx2_table_impl() : nullptr;
#else
  return nullptr;
#endif
}

bool backend_available(Backend b) { return b == Backend::scalar || avx2_table() != nullptr; }

void select_backend(Backend b) {
  if (!backend_available(b)) throw DomainError("kernel backend '" + std::string(to_string(b)) + "' is unavailable");
  g_forced.store(b == Backend::avx2 ? avx2_table() : &scalar_table());
}

void select_auto() { g_forced.store(nullptr); }

const Table& active() {
  if (const Table* t = g_forced.load()) return *t;
  if (const Table* t = avx2_table()) return *t;
  return scalar_table();
}

Backend active_backend() { return &active() == &scalar_table() ? Backend::scalar : Backend::avx2; }

double sum(std::span<const double> values) {
  // canonical lane order, same as the table kernels
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  const std::size_t n = values.size();
  const std::size_t n4 = n - n % 4;
  for (std::size_t i = 0; i < n4; ++i) lane[i % 4] += values[i];
  double s = (lane[0] + lane[2]) + (lane[1] + lane[3]);
  for (std::size_t i = n4; i < n; ++i) s += values[i];
  return s;
}

}  // namespace hetcache::kernels
