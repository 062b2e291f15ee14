// One PASS/FAIL line per acceptance check. Exit status is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "hetcache/master.hpp"
#include "hetcache/oracle.hpp"
#include "hetcache/sampling.hpp"
#include "hetcache/scenario.hpp"
#include "hetcache/sensitivity.hpp"

#ifndef HETCACHE_SCENARIO_DIR
#define HETCACHE_SCENARIO_DIR "scenarios"
#endif

using namespace hetcache;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail) {
  std::printf("%s  [%2d] %-28s %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double rel(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

ScenarioConfig scenario(const char* name) {
  return load_scenario_file(std::string(HETCACHE_SCENARIO_DIR) + "/" + name);
}

MasterState state_at(const PointCloud& cloud, const Popularity& pop, double W, double C) {
  const double c[1] = {C};
  return make_state(cloud, pop, W, c);
}

// ---------------------------------------------------------------------------

void oracle_checks() {
  RandomInstanceLimits lim;  // L <= 2, N <= 6, C <= 3, M <= 40
  const auto t0 = Clock::now();
  const OracleSuite suite = run_oracle_suite(100, 20240601, lim);
  const double secs = seconds_since(t0);
  report(1, "oracle equivalence", suite.max_gap <= 1e-9 && suite.cache_mismatches == 0 && secs < 10.0,
         std::to_string(suite.checks.size()) + " checks, max gap " + fmt("%.3g", suite.max_gap) +
             " (tol 1e-9), cache mismatches " + std::to_string(suite.cache_mismatches) + ", " +
             fmt("%.3f", secs) + " s (limit 10 s)");
  report(2, "most-popular caching", suite.popular_beaten == 0,
         "subsets beating files 1..C: " + std::to_string(suite.popular_beaten) + " of " +
             std::to_string(suite.checks.size()));
}

void master_vs_grid() {
  double worst_f = 0.0, worst_tau = 0.0;
  bool ok = true;
  int interior = 0;
  for (std::uint64_t i = 0; i < 20; ++i) {
    const SmallInstance inst = random_instance(777000 + i);
    const PointCloud cloud = inst.to_cloud();
    const Popularity pop = inst.pop();
    std::vector<double> c(inst.cache.begin(), inst.cache.end());
    const MasterState s = make_state(cloud, pop, inst.bandwidth, c);
    const MasterSolution sol = solve_master(s);
    const OracleMaster ref = oracle_master(inst, 10001);
    const double df = std::abs(sol.f_star - ref.f_star), dt = std::abs(sol.tau_star - ref.tau_star);
    const double f_tol = ref.f_bar / 1e4, t_tol = 1e-9 * std::max(1.0, ref.tau_star);
    ok = ok && df <= f_tol && dt <= t_tol;
    worst_f = std::max(worst_f, ref.f_bar > 0 ? df / f_tol : 0.0);
    worst_tau = std::max(worst_tau, dt / t_tol);
    if (sol.regime == Regime::interior) ++interior;
  }
  report(3, "master vs dense grid", ok,
         "20 instances (" + std::to_string(interior) + " interior), worst |df*|/(fbar/1e4) " + fmt("%.3g", worst_f) +
             ", worst |dtau*|/tol " + fmt("%.3g", worst_tau));
}

void endpoints() {
  double worst = 0.0;
  std::size_t n = 0;
  auto check = [&](const PicoCell& cell, double W, double S) {
    const LoadCurve curve(cell, W, S);
    double macro = 0.0, backhaul = 0.0, pico = 0.0;
    for (std::size_t k = 0; k < cell.size(); ++k) {
      macro += cell.weight[k] / (W * cell.r0[k]);
      backhaul += cell.weight[k] / (W * cell.backhaul);
      pico += cell.weight[k] / (W * cell.rl[k]);
    }
    worst = std::max(worst, rel(curve.tau(0.0), macro));
    worst = std::max(worst, rel(curve.tau(curve.full_load()), (1.0 - S) * backhaul));
    worst = std::max(worst, rel(curve.full_load(), pico));
    n += 3;
  };
  for (std::uint64_t i = 0; i < 100; ++i) {
    const SmallInstance inst = random_instance(5150 + i);
    const PointCloud cloud = inst.to_cloud();
    const Popularity pop = inst.pop();
    for (std::size_t l = 0; l < inst.pico_count(); ++l)
      check(cloud.cell(l), inst.bandwidth, pop.hit_mass(static_cast<double>(inst.cache[l])));
  }
  // A large cell that honours R_0 < B everywhere.
  RandomInstanceLimits big{1, 8, 4, 200};
  SmallInstance inst = random_instance(99, big);
  for (int rep = 0; rep < 4; ++rep) {
    const PointCloud cloud = inst.to_cloud();
    for (std::size_t l = 0; l < inst.pico_count(); ++l) check(cloud.cell(l), 1e6, 0.37);
    for (auto& p : inst.points) p.weight *= 1.7;
  }
  report(4, "endpoint closed forms", worst <= 1e-12,
         std::to_string(n) + " comparisons, worst relative error " + fmt("%.3g", worst) + " (tol 1e-12)");
}

void ring() {
  const RingScenario r = ring_scenario();
  const PointCloud cloud = r.instance.to_cloud();
  const Popularity pop = r.instance.pop();
  const MasterState s = state_at(cloud, pop, r.instance.bandwidth, static_cast<double>(r.instance.cache[0]));
  const LoadCurve& c = s.curves[0];
  double err = 0.0;
  for (const auto& p : r.load) err = std::max(err, std::abs(c.load(p.x) - p.value));
  for (const auto& p : r.rho) err = std::max(err, std::abs(c.rho_of_f(p.x) - p.value));
  for (const auto& p : r.tau) err = std::max(err, std::abs(c.tau(p.x) - p.value));
  const MasterSolution sol = solve_master(s);
  err = std::max({err, std::abs(sol.f_star - r.f_star), std::abs(sol.tau_star - r.tau_star)});
  report(5, "ring closed forms", err <= 1e-9,
         "g, rho, tau_1 at " + std::to_string(r.load.size() + r.rho.size() + r.tau.size()) +
             " points plus f*, tau*; max abs error " + fmt("%.3g", err) + " (tol 1e-9)");
}

void homogeneous() {
  const ScenarioConfig cfg = scenario("homogeneous.json");
  const PointCloud cloud = generate_cloud(cfg);
  const Popularity pop = make_popularity(cfg);
  const double target = 1.0 / 3.0;
  bool ok = true;
  double worst_dev = 0.0, worst_ratio = 0.0, worst_sum = 0.0;
  for (double W : {0.5e6, 1e6, 2e6})
    for (double C : {100.0, 200.0, 400.0}) {
      const MasterState s = state_at(cloud, pop, W, C);
      const MasterSolution sol = solve_master(s);
      double sum = 0.0;
      for (std::size_t l = 0; l < s.pico_count(); ++l) {
        const LoadCurve& c = s.curves[l];
        const double rho = sol.per_pico[l].rho;
        sum += rho;
        // Distance between the distinct breakpoint values either side of rho(f*).
        const auto v = c.thresholds();
        const auto it = std::lower_bound(v.begin(), v.end(), rho, std::greater<>());
        double quantum = 0.0;
        if (it != v.begin()) quantum = std::max(quantum, *(it - 1) - rho);
        if (it != v.end() && it + 1 != v.end()) quantum = std::max(quantum, rho - *(it + 1));
        const double dev = std::abs(rho - target);
        worst_dev = std::max(worst_dev, dev);
        worst_ratio = std::max(worst_ratio, quantum > 0 ? dev / quantum : INFINITY);
        ok = ok && dev <= quantum;
      }
      worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
    }
  report(6, "homogeneous threshold 1/L", ok,
         "3x3 grid, max |rho_l(f*) - 1/3| " + fmt("%.4f", worst_dev) + " = " + fmt("%.3g", worst_ratio) +
             " breakpoint quanta; max |sum rho_l - 1| " + fmt("%.2g", worst_sum));
}

void reference_and_surface() {
  const auto t0 = Clock::now();
  const ScenarioConfig cfg = scenario("heterogeneous.json");
  const PointCloud cloud = generate_cloud(cfg);
  const Popularity pop = make_popularity(cfg);

  const double a = solve_master(state_at(cloud, pop, 1e6, 0.0)).tau_star;
  const double b = solve_master(state_at(cloud, pop, 1e6, 200.0)).tau_star;
  const double c = solve_master(state_at(cloud, pop, 1.4e6, 0.0)).tau_star;
  const Surface s = sweep(cloud, pop, {0.5e6, 0.875e6, 1.25e6, 1.625e6, 2e6}, {0.0, 100.0, 200.0, 300.0, 400.0});
  const double secs = seconds_since(t0);

  const double red_c = 100.0 * (a - b) / a, red_w = 100.0 * (a - c) / a;
  const bool ok = rel(a, 0.2786) <= 0.05 && rel(b, 0.2059) <= 0.05 && rel(c, 0.1990) <= 0.05 &&
                  std::abs(red_c - 26.1) <= 3.0 && std::abs(red_w - 28.6) <= 3.0 && secs < 120.0;
  report(7, "reference values", ok,
         "tau* " + fmt("%.4f", a) + "/" + fmt("%.4f", b) + "/" + fmt("%.4f", c) + " vs 0.2786/0.2059/0.1990, " +
             "reductions " + fmt("%.1f", red_c) + "% and " + fmt("%.1f", red_w) + "% vs 26.1/28.6, " +
             fmt("%.2f", secs) + " s");
  report(8, "monotone surface", s.violations == 0 && s.non_strict == 0,
         "5x5 grid W 0.5..2 MHz, C 0..400: " + std::to_string(s.violations) + " violations beyond 0.1%, " +
             std::to_string(s.non_strict) + " non-strict steps");
}

void derivatives() {
  const ScenarioConfig cfg = scenario("heterogeneous.json");
  const PointCloud cloud = generate_cloud(cfg);
  const Popularity pop = make_popularity(cfg);

  struct Probe {
    std::size_t pico;
    double W, C, f_fraction;  // f as a fraction of g_l(0)
  };
  const Probe probes[] = {{0, 1e6, 200.5, 0.3},   {1, 1e6, 200.5, 0.3},  {2, 1e6, 200.5, 0.3},
                          {0, 0.8e6, 50.5, 0.5},  {1, 1.4e6, 350.5, 0.5}, {2, 1.2e6, 120.5, 0.6},
                          {0, 1.4e6, 10.5, 0.15}, {1, 0.6e6, 80.5, 0.7},  {2, 2e6, 300.5, 0.2},
                          {0, 1e6, 600.5, 0.8}};
  double worst_w = 0.0, worst_c = 0.0;
  bool signs = true;
  for (const auto& p : probes) {
    const LoadCurve curve(cloud.cell(p.pico), p.W, pop.hit_mass(p.C));
    const double f = p.f_fraction * curve.saturation_load();
    const SensitivityReport r = check_derivatives(cloud.cell(p.pico), p.W, pop, p.C, f);
    worst_w = std::max(worst_w, r.rel_err_W);
    worst_c = std::max(worst_c, r.rel_err_C);
    signs = signs && r.dtau_dW < 0.0 && r.dtau_dC < 0.0;
  }
  report(9, "derivative checks", worst_w <= 1e-2 && worst_c <= 1e-2 && signs,
         "10 probes, worst relative error dW " + fmt("%.2g", worst_w) + ", dC " + fmt("%.2g", worst_c) +
             " (tol 1e-2), all negative: " + (signs ? "yes" : "no"));
}

struct StructureTally {
  std::size_t rho_order = 0, rho_tail = 0, convexity = 0, slope = 0, nesting = 0, slackness = 0, overuse = 0;
  std::size_t segments = 0, solutions = 0;
  double worst_slope = 0.0;

  std::size_t total() const { return rho_order + rho_tail + convexity + slope + nesting + slackness + overuse; }
};

void structure_of(const MasterState& s, StructureTally& t) {
  const double fb = f_bar(s);
  const std::vector<double> grid = linear_grid(1.2 * fb, 200);

  for (std::size_t l = 0; l < s.pico_count(); ++l) {
    const LoadCurve& c = s.curves[l];
    double prev = INFINITY;
    for (double f : grid) {
      const double r = c.rho_of_f(f);
      if (r > prev) ++t.rho_order;
      if (f >= c.full_load() && r != 0.0) ++t.rho_tail;
      prev = r;

      const SubproblemSolution sol = solve_subproblem(c, *s.cells[l], s.cache_sizes[l], f);
      ++t.solutions;
      if (sol.pico_time_used > f + 1e-12) ++t.overuse;
      if (sol.rho > 0.0 && std::abs(sol.pico_time_used - f) > 1e-9 * std::max(f, 1e-300)) ++t.slackness;
      for (std::size_t k = 0; k < sol.x_uncached.size(); ++k)
        if (sol.x_uncached[k] > 0.0 && sol.x_cached[k] < 1.0) ++t.nesting;
    }
  }

  std::vector<double> tau(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) tau[i] = tau_total(s, grid[i]);
  for (std::size_t i = 1; i + 1 < grid.size(); ++i)
    if (tau[i - 1] + tau[i + 1] - 2.0 * tau[i] < -1e-12 * std::max(1.0, std::abs(tau[i]))) ++t.convexity;

  // Exact slope on every segment between consecutive breakpoint loads wide enough to resolve.
  std::vector<double> loads{0.0};
  for (const auto& c : s.curves)
    for (double x : c.breakpoint_loads()) loads.push_back(x);
  std::sort(loads.begin(), loads.end());
  loads.erase(std::unique(loads.begin(), loads.end()), loads.end());
  for (std::size_t i = 0; i + 1 < loads.size(); ++i) {
    const double a = loads[i], b = loads[i + 1];
    if (b - a < 1e-6 * std::max(1.0, fb)) continue;
    const double slope = (tau_total(s, b) - tau_total(s, a)) / (b - a);
    const double expect = 1.0 - sum_rho(s, a);
    const double err = std::abs(slope - expect);
    t.worst_slope = std::max(t.worst_slope, err);
    ++t.segments;
    if (err > 1e-9) ++t.slope;
  }
}

void structure() {
  StructureTally t;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const SmallInstance inst = random_instance(31337 + i);
    const PointCloud cloud = inst.to_cloud();
    const Popularity pop = inst.pop();
    std::vector<double> c(inst.cache.begin(), inst.cache.end());
    structure_of(make_state(cloud, pop, inst.bandwidth, c), t);
  }
  const ScenarioConfig cfg = scenario("heterogeneous.json");
  const PointCloud cloud = generate_cloud(cfg);
  const Popularity pop = make_popularity(cfg);
  for (double C : {0.0, 200.0}) structure_of(state_at(cloud, pop, 1e6, C), t);

  report(10, "structural properties", t.total() == 0,
         std::to_string(t.solutions) + " solutions, " + std::to_string(t.segments) +
             " segments (worst slope error " + fmt("%.2g", t.worst_slope) + "); violations: rho order " +
             std::to_string(t.rho_order) + ", rho tail " + std::to_string(t.rho_tail) + ", convexity " +
             std::to_string(t.convexity) + ", slope " + std::to_string(t.slope) + ", nesting " +
             std::to_string(t.nesting) + ", slackness " + std::to_string(t.slackness) + ", overuse " +
             std::to_string(t.overuse));
}

}  // namespace

int main() {
  oracle_checks();
  master_vs_grid();
  endpoints();
  ring();
  homogeneous();
  reference_and_surface();
  derivatives();
  structure();
  std::printf("%d failing\n", failures);
  return failures == 0 ? 0 : 1;
}
