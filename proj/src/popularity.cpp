#include "hetcache/popularity.hpp"

#include <cmath>
#include <string>

#include "hetcache/errors.hpp"

namespace hetcache {

Popularity::Popularity(std::vector<double> p) : p_(std::move(p)) {
  if (p_.empty()) throw DomainError("popularity needs at least one file");
  prefix_.assign(p_.size() + 1, 0.0);
  for (std::size_t n = 0; n < p_.size(); ++n) {
    if (!(p_[n] >= 0.0)) throw DomainError("popularity entries must be non-negative");
    if (n > 0 && p_[n] > p_[n - 1]) throw DomainError("popularity must be non-increasing");
    prefix_[n + 1] = prefix_[n] + p_[n];
  }
  if (std::abs(prefix_.back() - 1.0) > 1e-9)
    throw DomainError("popularity must sum to 1 (got " + std::to_string(prefix_.back()) + ")");
}

Popularity Popularity::zipf(std::size_t n_files, double gamma) {
  if (n_files == 0) throw DomainError("zipf popularity needs N >= 1");
  if (!(gamma >= 0.0)) throw DomainError("zipf exponent must be >= 0");
  std::vector<double> w(n_files);
  double total = 0.0;
  for (std::size_t n = 0; n < n_files; ++n) {
    w[n] = std::pow(static_cast<double>(n + 1), -gamma);
    total += w[n];
  }
  for (double& v : w) v /= total;
  // Rounding of n^-gamma can break monotonicity only for gamma == 0, where all entries are equal.
  return Popularity(std::move(w));
}

double Popularity::hit_mass(double cache_size) const {
  const double n = static_cast<double>(p_.size());
  if (!(cache_size >= 0.0 && cache_size <= n)) throw DomainError("cache size must lie in [0, N]");
  const double whole = std::floor(cache_size);
  const auto k = static_cast<std::size_t>(whole);
  if (k == p_.size()) return prefix_[k];
  return prefix_[k] + (cache_size - whole) * p_[k];
}

double Popularity::marginal(double cache_size) const {
  const double n = static_cast<double>(p_.size());
  if (!(cache_size > 0.0 && cache_size < n))
    throw DomainError("marginal popularity is defined on the open interval (0, N)");
  const auto idx = static_cast<std::size_t>(std::ceil(cache_size));
  return p_[idx - 1];
}

}  // namespace hetcache
