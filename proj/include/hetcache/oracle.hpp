#pragma once

// Reference solvers for small instances. Nothing here uses the threshold
// structure of the load curve: caching is found by enumerating every subset of
// files and association by ratio-greedy on each (file, point) item.

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "hetcache/popularity.hpp"
#include "hetcache/sampling.hpp"

namespace hetcache {

struct SmallPoint {
  double weight = 0.0;
  double r0 = 0.0;
  double rl = 0.0;                   // ignored for macro-only points
  std::int32_t pico = kMacroOnly;
};

struct SmallInstance {
  static constexpr std::size_t kMaxPoints = 200, kMaxFiles = 8, kMaxPicos = 3;

  std::vector<SmallPoint> points;
  std::vector<double> backhaul;       // per pico
  std::vector<double> popularity;     // descending, sums to 1
  std::vector<std::size_t> cache;     // per pico, whole files
  double bandwidth = 1.0;

  std::size_t pico_count() const { return backhaul.size(); }
  /// Throws DomainError when the enumeration bounds or basic shape do not hold.
  void check() const;
  PointCloud to_cloud() const;
  Popularity pop() const;
};

struct OracleSubproblem {
  double value = 0.0;
  std::vector<std::size_t> cache_set;  // 1-based file indices, ascending
  double most_popular_value = 0.0;     // value with files 1..C cached
  double pico_time_used = 0.0;
  /// x[n][k]: share of file n+1 demand at the k-th point of the pico served by the pico.
  std::vector<std::vector<double>> x;
};

/// Exact optimum of the per-pico problem at pico time f.
OracleSubproblem oracle_subproblem(const SmallInstance& inst, std::size_t pico, double f);

struct OracleMaster {
  double grid_f = 0.0, grid_tau = 0.0;  // best point of the dense grid
  double f_star = 0.0, tau_star = 0.0;  // grid refined with every kink of every per-pico value function
  double f_bar = 0.0;
};

/// tau(f) = f + tau_0 + sum_l oracle value, minimised over `grid_size` points on [0, f̄]
/// (grid_size >= 1000) and over the kinks of the per-pico value functions.
OracleMaster oracle_master(const SmallInstance& inst, std::size_t grid_size);

/// Single pico, two demand rings with hand-computable answers.
struct RingScenario {
  SmallInstance instance;
  struct Sample {
    double x, value;
  };
  std::vector<Sample> load;   // g(rho)
  std::vector<Sample> rho;    // rho(f)
  std::vector<Sample> tau;    // tau_1(f)
  double f_star = 0.0, tau_star = 0.0;
};
RingScenario ring_scenario();

struct RandomInstanceLimits {
  std::size_t max_picos = 2, max_files = 6, max_cache = 3, max_points = 40;
};
/// Rates log-uniform on [0.1, 10]; B_l = (max R_0 in the cell) * U(1.05, 3), so R_0 < B_l holds.
SmallInstance random_instance(std::uint64_t seed, const RandomInstanceLimits& lim = {});

/// Huge backhaul and slow macro links: the optimum gives picos all the time they can use.
SmallInstance all_pico_instance(std::uint64_t seed);

struct OracleCheck {
  std::size_t instance = 0, pico = 0;
  double f = 0.0;
  double solver_value = 0.0, oracle_value = 0.0, rel_gap = 0.0;
  bool cache_match = false;
  bool most_popular_optimal = false;
};

struct OracleSuite {
  std::vector<OracleCheck> checks;
  double max_gap = 0.0;
  std::size_t cache_mismatches = 0;
  std::size_t popular_beaten = 0;
  bool passed(double tolerance = 1e-9) const {
    return max_gap <= tolerance && cache_mismatches == 0 && popular_beaten == 0;
  }
};

/// `count` random instances; every pico at f in {0, 1/4, 1/2, 3/4, 1, 2} x f̄_l.
OracleSuite run_oracle_suite(std::size_t count, std::uint64_t seed, const RandomInstanceLimits& lim = {});

void write_oracle_csv(std::ostream& out, const OracleSuite& suite, double tolerance = 1e-9);

}  // namespace hetcache
