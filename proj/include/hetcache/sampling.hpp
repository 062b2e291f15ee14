#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "hetcache/cell.hpp"
#include "hetcache/scenario.hpp"

namespace hetcache {

inline constexpr std::int32_t kMacroOnly = -1;

/// One Monte Carlo sample of the arrival density lambda(dxi).
struct SamplePoint {
  Point2 position;
  std::int32_t pico_id = kMacroOnly;  // kMacroOnly: location in K_0
  double weight = 0.0;                // files/sec carried by this sample
  double r0 = 0.0;
  std::optional<double> rl;
  std::optional<double> rho0;
  std::optional<double> rho1;
};

/// Monte Carlo stand-in for every spatial integral. Immutable after construction.
class PointCloud {
 public:
  PointCloud(std::vector<SamplePoint> points, std::vector<double> backhaul, CoverageMode mode);

  std::size_t size() const { return points_.size(); }
  const SamplePoint& point(std::size_t i) const { return points_.at(i); }
  const std::vector<SamplePoint>& points() const { return points_; }

  std::size_t pico_count() const { return cells_.size(); }
  const PicoCell& cell(std::size_t l) const { return cells_.at(l); }
  const std::vector<PicoCell>& cells() const { return cells_; }
  double backhaul(std::size_t l) const { return backhaul_.at(l); }
  CoverageMode coverage_mode() const { return mode_; }

  /// sum over K_0 points of w / R_0 (tau_0 at W = 1).
  double macro_only_unit() const { return macro_only_unit_; }
  double total_weight() const { return total_weight_; }

 private:
  std::vector<SamplePoint> points_;
  std::vector<double> backhaul_;
  CoverageMode mode_;
  std::vector<PicoCell> cells_;
  double macro_only_unit_ = 0.0;
  double total_weight_ = 0.0;
};

/// Draws cfg.sample_count points from the hotspot mixture, deterministic in cfg.rng_seed.
/// Throws GeometryError after 10^6 consecutive rejections, and AssumptionError when
/// some sampled R_0 >= B_l under BackhaulAssumption::enforce.
PointCloud generate_cloud(const ScenarioConfig& cfg);

/// Throws AssumptionError naming the first pico whose cell has max R_0 >= B_l.
void check_backhaul_assumption(const PointCloud& cloud);

/// sum over selected points of w * integrand(point).
template <class Selector, class Integrand>
double integrate(const PointCloud& cloud, Selector&& select, Integrand&& integrand) {
  double s = 0.0;
  for (const auto& p : cloud.points())
    if (select(p)) s += p.weight * integrand(p);
  return s;
}

/// tau_0: macro time for the K_0 traffic.
double tau_zero(const PointCloud& cloud, double bandwidth);
/// f̄_l; throws ValidationError if pico l has no samples.
double full_load(const PointCloud& cloud, std::size_t l, double bandwidth);
/// f̄ = max_l f̄_l (0 when there are no picos).
double max_full_load(const PointCloud& cloud, double bandwidth);

/// Columnar dump: x,y,pico_id,w,r0,rl,rho0,rho1 (absent values left empty).
void write_cloud_csv(std::ostream& out, const PointCloud& cloud);
/// Reads a dump back; backhaul rates and coverage mode come from the scenario.
PointCloud read_cloud_csv(std::istream& in, const ScenarioConfig& cfg);

}  // namespace hetcache
