#pragma once

#include <algorithm>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "hetcache/cell.hpp"
#include "hetcache/popularity.hpp"

namespace hetcache {

/// Which class of files a curve entry belongs to.
enum class Stream : std::uint8_t { cached, uncached };

/// One breakpoint of the load curve: the cached or uncached demand of one point.
struct CurveEntry {
  double rho;      // benefit ratio rho_l(xi, s)
  double cost;     // pico time to serve it fully (seconds)
  double saving;   // macro time it saves when served
  double unserved; // macro time it costs when left to the macro BS
  double served;   // macro time it still costs when served (backhaul for uncached)
  Stream stream;
  std::uint32_t local;  // entry index in the PicoCell
};

/// g_l(rho): pico time needed to serve every entry with benefit ratio above rho.
///
/// A non-increasing right-continuous step function. Entries with rho <= 0 are
/// never served and do not appear. Built once per (cell, W, S_C); all
/// queries are O(log n).
class LoadCurve {
 public:
  LoadCurve(const PicoCell& cell, double bandwidth, double hit_mass);

  std::size_t pico() const { return pico_; }
  double bandwidth() const { return bandwidth_; }
  double hit_mass() const { return hit_mass_; }
  std::size_t cell_size() const { return cell_size_; }

  std::span<const CurveEntry> entries() const { return entries_; }
  /// Distinct breakpoint values, descending.
  std::span<const double> thresholds() const { return values_; }
  /// Cumulative pico time after each distinct threshold group (the kinks of tau_l).
  std::span<const double> breakpoint_loads() const { return cum_cost_; }

  /// g(rho) for rho >= 0.
  double load(double rho) const;
  /// inf { rho >= 0 : g(rho) <= f }.
  double rho_of_f(double f) const;
  /// Threshold on the segment just below f (left limit); equals rho_of_f(0) at f = 0.
  double rho_left(double f) const;
  /// tau_l(f): optimal macro time for this pico given pico time f.
  double tau(double f) const;
  /// Pico time actually used: min(f, g(0)).
  double used(double f) const;

  /// f̄_l: pico time to carry all traffic of the cell.
  double full_load() const { return full_load_; }
  /// g(0): pico time to carry every entry with a positive benefit (f̄_l when R_0 < B_l).
  double saturation_load() const { return cum_cost_.empty() ? 0.0 : std::min(cum_cost_.back(), full_load_); }
  /// Largest breakpoint (rho_of_f(0)); 0 for an empty curve.
  double max_threshold() const { return values_.empty() ? 0.0 : values_.front(); }
  /// Smallest positive breakpoint; 0 for an empty curve.
  double min_threshold() const { return values_.empty() ? 0.0 : values_.back(); }
  /// sum w / (W R_0) over the cell.
  double macro_total() const { return macro_total_; }
  /// sum w / (W B_l) over the cell.
  double backhaul_total() const { return backhaul_total_; }
  /// Largest single-entry pico time.
  double max_entry_cost() const { return max_entry_cost_; }

  struct Position {
    std::size_t group;     // number of fully served threshold groups
    double fraction;       // served fraction of the next group (0 when none)
    double threshold;      // rho_of_f
  };
  Position locate(double f) const;

  /// Index range [begin, end) of group g in entries().
  std::pair<std::size_t, std::size_t> group_range(std::size_t g) const;
  double group_cost(std::size_t g) const { return group_cost_.at(g); }

 private:
  std::size_t pico_;
  double bandwidth_;
  double hit_mass_;
  std::size_t cell_size_;
  double full_load_;
  double macro_total_;
  double backhaul_total_;
  double dropped_cost_;  // macro time of entries with rho <= 0
  double max_entry_cost_ = 0.0;

  std::vector<CurveEntry> entries_;
  // Per distinct threshold group g (descending rho):
  std::vector<double> values_;
  std::vector<std::size_t> group_end_;
  std::vector<double> group_cost_;
  std::vector<double> group_served_;
  std::vector<double> group_unserved_;
  std::vector<double> cum_cost_;        // cost of groups 0..g
  std::vector<double> cum_served_;      // served cost of groups 0..g
  std::vector<double> suffix_unserved_; // unserved cost of groups g..end, one extra trailing 0
};

/// Files stored at a pico: 1..whole, plus `fraction` of file whole+1 under the relaxation.
struct CacheSet {
  std::size_t whole = 0;
  std::optional<double> fraction;

  std::vector<std::size_t> files() const;
};

CacheSet cache_set_for(double cache_size);

/// Optimal caching and association of one pico for a given pico time.
struct SubproblemSolution {
  std::size_t pico = 0;
  double f = 0.0;
  double rho = 0.0;
  double tau = 0.0;
  double pico_time_used = 0.0;
  double boundary_fraction = 0.0;
  double hit_mass = 0.0;
  CacheSet cache;
  /// x for the cached and uncached file classes, indexed like the PicoCell entries.
  std::vector<double> x_cached;
  std::vector<double> x_uncached;
};

/// `cache_size` only shapes the reported cache set; the curve already carries S(C).
SubproblemSolution solve_subproblem(const LoadCurve& curve, const PicoCell& cell, double cache_size, double f);
SubproblemSolution solve_subproblem(const PicoCell& cell, double bandwidth, double cache_size,
                                    const Popularity& pop, double f);

/// Columns f, rho_<l>, tau_<l> for every curve, one row per grid value.
void write_threshold_csv(std::ostream& out, std::span<const LoadCurve> curves, std::span<const double> f_grid);

/// tau_l(f) through the closed-form sums over the strict regions A(rho,1), A(rho,0)
/// minus the boundary correction rho (f - g(rho)). Independent of LoadCurve::tau.
double tau_by_regions(const PicoCell& cell, double bandwidth, double hit_mass, double rho, double f);

/// g(rho) through masked sums over the cell (independent of LoadCurve::load).
double load_by_regions(const PicoCell& cell, double bandwidth, double hit_mass, double rho);

/// Lagrangian dual function at multiplier rho.
double dual_value(const PicoCell& cell, double bandwidth, double hit_mass, double rho, double f);

}  // namespace hetcache
