#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hetcache {

/// File popularity p_1 >= p_2 >= ... >= p_N with prefix sums.
class Popularity {
 public:
  /// Validates non-increasing order and unit mass (1e-9).
  explicit Popularity(std::vector<double> p);

  static Popularity zipf(std::size_t n_files, double gamma);

  std::size_t size() const { return p_.size(); }
  /// 1-based, as in p_n.
  double p(std::size_t n) const { return p_.at(n - 1); }
  std::span<const double> values() const { return p_; }

  /// S(C): mass of the C most popular files, linearly interpolated for fractional C.
  double hit_mass(double cache_size) const;

  /// p at index ceil(C), for 0 < C < N. At integer C the index is C itself.
  double marginal(double cache_size) const;

 private:
  std::vector<double> p_;
  std::vector<double> prefix_;  // prefix_[k] = p_1 + ... + p_k
};

}  // namespace hetcache
