#include "hetcache/subproblem.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "hetcache/csv.hpp"
#include "hetcache/errors.hpp"
#include "hetcache/kernels.hpp"

namespace hetcache {

namespace {

bool before(const CurveEntry& a, const CurveEntry& b, const PicoCell& cell) {
  if (a.rho != b.rho) return a.rho > b.rho;
  if (a.saving != b.saving) return a.saving > b.saving;
  const auto ia = cell.point_index[a.local], ib = cell.point_index[b.local];
  if (ia != ib) return ia < ib;
  return a.stream == Stream::cached && b.stream == Stream::uncached;
}

}  // namespace

LoadCurve::LoadCurve(const PicoCell& cell, double bandwidth, double hit_mass)
    : pico_(cell.pico), bandwidth_(bandwidth), hit_mass_(hit_mass), cell_size_(cell.size()) {
  if (!(bandwidth > 0.0)) throw DomainError("bandwidth must be positive");
  if (!(hit_mass >= 0.0 && hit_mass <= 1.0 + 1e-12)) throw DomainError("hit mass must lie in [0, 1]");
  hit_mass_ = std::min(hit_mass, 1.0);
  hit_mass = hit_mass_;

  const double s1 = hit_mass, s0 = 1.0 - hit_mass;
  full_load_ = cell.pico_total / bandwidth;
  macro_total_ = cell.macro_total / bandwidth;
  backhaul_total_ = cell.backhaul_total / bandwidth;
  dropped_cost_ = 0.0;

  auto cached = [&](std::uint32_t k) {
    const double m = s1 * cell.macro_unit[k] / bandwidth;
    return CurveEntry{cell.rho1[k], s1 * cell.pico_unit[k] / bandwidth, m, m, 0.0, Stream::cached, k};
  };
  auto uncached = [&](std::uint32_t k) {
    const double m = s0 * cell.macro_unit[k] / bandwidth;
    const double b = s0 * cell.backhaul_unit[k] / bandwidth;
    return CurveEntry{cell.rho0[k], s0 * cell.pico_unit[k] / bandwidth, m - b, m, b, Stream::uncached, k};
  };

  // Both per-stream orders are already sorted; merge them.
  std::vector<CurveEntry> a, b;
  if (s1 > 0.0) {
    a.reserve(cell.size());
    for (auto k : cell.order1) a.push_back(cached(k));
  }
  if (s0 > 0.0) {
    b.reserve(cell.size());
    for (auto k : cell.order0) {
      if (cell.rho0[k] > 0.0)
        b.push_back(uncached(k));
      else
        dropped_cost_ += s0 * cell.macro_unit[k] / bandwidth;
    }
  }
  entries_.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(entries_),
             [&](const CurveEntry& x, const CurveEntry& y) { return before(x, y, cell); });

  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const CurveEntry& e = entries_[i];
    max_entry_cost_ = std::max(max_entry_cost_, e.cost);
    if (values_.empty() || e.rho != values_.back()) {
      values_.push_back(e.rho);
      group_end_.push_back(i);
      group_cost_.push_back(0.0);
      group_served_.push_back(0.0);
      group_unserved_.push_back(0.0);
    }
    group_end_.back() = i + 1;
    group_cost_.back() += e.cost;
    group_served_.back() += e.served;
    group_unserved_.back() += e.unserved;
  }

  const std::size_t m = values_.size();
  cum_cost_.resize(m);
  cum_served_.resize(m);
  suffix_unserved_.assign(m + 1, 0.0);
  double c = 0.0, s = 0.0;
  for (std::size_t g = 0; g < m; ++g) {
    cum_cost_[g] = (c += group_cost_[g]);
    cum_served_[g] = (s += group_served_[g]);
  }
  for (std::size_t g = m; g-- > 0;) suffix_unserved_[g] = suffix_unserved_[g + 1] + group_unserved_[g];
}

std::pair<std::size_t, std::size_t> LoadCurve::group_range(std::size_t g) const {
  return {g == 0 ? 0 : group_end_.at(g - 1), group_end_.at(g)};
}

double LoadCurve::load(double rho) const {
  // Number of groups strictly above rho.
  const auto k = static_cast<std::size_t>(
      std::partition_point(values_.begin(), values_.end(), [rho](double v) { return v > rho; }) -
      values_.begin());
  return k == 0 ? 0.0 : cum_cost_[k - 1];
}

LoadCurve::Position LoadCurve::locate(double f) const {
  if (f < 0.0) throw DomainError("pico time must be non-negative");
  const auto j = static_cast<std::size_t>(std::upper_bound(cum_cost_.begin(), cum_cost_.end(), f) -
                                          cum_cost_.begin());
  // f̄_l and the last cumulative load agree only up to rounding; at or past either, everything is served.
  if (j == values_.size() || f >= full_load_) return {values_.size(), 0.0, 0.0};
  const double before = j == 0 ? 0.0 : cum_cost_[j - 1];
  const double frac = std::clamp((f - before) / group_cost_[j], 0.0, 1.0);
  return {j, frac, values_[j]};
}

double LoadCurve::rho_of_f(double f) const { return locate(f).threshold; }

double LoadCurve::rho_left(double f) const {
  if (f <= 0.0) return rho_of_f(0.0);
  if (f > full_load_) return 0.0;
  const auto j = static_cast<std::size_t>(std::lower_bound(cum_cost_.begin(), cum_cost_.end(), f) -
                                          cum_cost_.begin());
  return j == values_.size() ? 0.0 : values_[j];
}

double LoadCurve::tau(double f) const {
  const Position p = locate(f);
  const std::size_t j = p.group;
  double t = dropped_cost_ + (j == 0 ? 0.0 : cum_served_[j - 1]);
  if (j < values_.size())
    t += p.fraction * group_served_[j] + (1.0 - p.fraction) * group_unserved_[j] + suffix_unserved_[j + 1];
  return t;
}

double LoadCurve::used(double f) const { return std::min(f, saturation_load()); }

std::vector<std::size_t> CacheSet::files() const {
  std::vector<std::size_t> out(whole);
  for (std::size_t n = 0; n < whole; ++n) out[n] = n + 1;
  return out;
}

CacheSet cache_set_for(double cache_size) {
  if (!(cache_size >= 0.0)) throw DomainError("cache size must be non-negative");
  CacheSet c;
  const double whole = std::floor(cache_size);
  c.whole = static_cast<std::size_t>(whole);
  if (cache_size > whole) c.fraction = cache_size - whole;
  return c;
}

SubproblemSolution solve_subproblem(const LoadCurve& curve, const PicoCell& cell, double cache_size, double f) {
  if (cell.size() != curve.cell_size() || cell.pico != curve.pico())
    throw DomainError("load curve does not belong to this cell");
  const auto pos = curve.locate(f);

  SubproblemSolution sol;
  sol.pico = curve.pico();
  sol.f = f;
  sol.rho = pos.threshold;
  sol.tau = curve.tau(f);
  sol.pico_time_used = curve.used(f);
  sol.boundary_fraction = pos.fraction;
  sol.hit_mass = curve.hit_mass();
  sol.cache = cache_set_for(cache_size);

  // Threshold rule first; covers streams that carry no mass and dropped entries.
  const std::size_t n = cell.size();
  sol.x_cached.assign(n, 0.0);
  sol.x_uncached.assign(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    if (cell.rho1[k] > sol.rho) sol.x_cached[k] = 1.0;
    if (cell.rho0[k] > sol.rho && cell.rho0[k] > 0.0) sol.x_uncached[k] = 1.0;
  }
  if (pos.group < curve.thresholds().size()) {
    const auto [lo, hi] = curve.group_range(pos.group);
    for (std::size_t i = lo; i < hi; ++i) {
      const CurveEntry& e = curve.entries()[i];
      (e.stream == Stream::cached ? sol.x_cached : sol.x_uncached)[e.local] = pos.fraction;
    }
  }
  return sol;
}

SubproblemSolution solve_subproblem(const PicoCell& cell, double bandwidth, double cache_size,
                                    const Popularity& pop, double f) {
  const LoadCurve curve(cell, bandwidth, pop.hit_mass(cache_size));
  return solve_subproblem(curve, cell, cache_size, f);
}

double load_by_regions(const PicoCell& cell, double bandwidth, double hit_mass, double rho) {
  const double t = std::max(rho, 0.0);
  const double cached = kernels::sum_where_greater(cell.pico_unit, cell.rho1, t);
  const double uncached = kernels::sum_where_greater(cell.pico_unit, cell.rho0, t);
  return (hit_mass * cached + (1.0 - hit_mass) * uncached) / bandwidth;
}

double tau_by_regions(const PicoCell& cell, double bandwidth, double hit_mass, double rho, double f) {
  const double t = std::max(rho, 0.0);
  const double cached_out = kernels::sum_where_at_most(cell.macro_unit, cell.rho1, t);
  const double uncached_in = kernels::sum_where_greater(cell.backhaul_unit, cell.rho0, t);
  const double uncached_out = kernels::sum_where_at_most(cell.macro_unit, cell.rho0, t);
  const double base = (hit_mass * cached_out + (1.0 - hit_mass) * (uncached_in + uncached_out)) / bandwidth;
  return base - t * (f - load_by_regions(cell, bandwidth, hit_mass, t));
}

double dual_value(const PicoCell& cell, double bandwidth, double hit_mass, double rho, double f) {
  if (rho < 0.0) throw DomainError("multiplier must be non-negative");
  const double u1 = kernels::sum_where_greater(cell.pico_unit, cell.rho1, rho);
  const double m1 = kernels::sum_where_greater(cell.macro_unit, cell.rho1, rho);
  const double u0 = kernels::sum_where_greater(cell.pico_unit, cell.rho0, rho);
  const double m0 = kernels::sum_where_greater(cell.macro_unit, cell.rho0, rho);
  const double b0 = kernels::sum_where_greater(cell.backhaul_unit, cell.rho0, rho);
  const double cached = rho * u1 - m1;
  const double uncached = rho * u0 + b0 - m0;
  return (hit_mass * cached + (1.0 - hit_mass) * uncached + cell.macro_total) / bandwidth - rho * f;
}

void write_threshold_csv(std::ostream& out, std::span<const LoadCurve> curves, std::span<const double> f_grid) {
  std::vector<std::string> header{"f"};
  for (const auto& c : curves) header.push_back("rho_" + std::to_string(c.pico() + 1));
  for (const auto& c : curves) header.push_back("tau_" + std::to_string(c.pico() + 1));
  csv::Writer w(out, header);
  std::vector<csv::Cell> row;
  for (double f : f_grid) {
    row.assign(1, f);
    for (const auto& c : curves) row.emplace_back(c.rho_of_f(f));
    for (const auto& c : curves) row.emplace_back(c.tau(f));
    w.row(row);
  }
}

}  // namespace hetcache
