#include <doctest.h>

#include <sstream>

#include "hetcache/errors.hpp"
#include "hetcache/oracle.hpp"
#include "hetcache/subproblem.hpp"
#include "helpers.hpp"

using namespace hetcache;
using doctest::Approx;

namespace {

// One point: w = 1, R_0 = 1, R_l = 2, B = 4. rho1 = 2, rho0 = 1.5.
// With S = 0.6 the cached entry costs 0.3 and the uncached one 0.2.
PicoCell one_point() { return make_cell(0, 4.0, {0}, {1.0}, {1.0}, {2.0}); }

std::vector<PicoCell> random_cells(std::size_t count) {
  std::vector<PicoCell> out;
  for (std::uint64_t seed = 1; out.size() < count; ++seed) {
    auto inst = random_instance(seed, {1, 8, 4, 60});
    const auto cloud = inst.to_cloud();
    if (!cloud.cell(0).empty()) out.push_back(cloud.cell(0));
  }
  return out;
}

}  // namespace

TEST_CASE("one-point load curve") {
  const auto cell = one_point();
  const LoadCurve g(cell, 1.0, 0.6);
  REQUIRE(g.thresholds().size() == 2);
  CHECK(g.thresholds()[0] == 2.0);
  CHECK(g.thresholds()[1] == Approx(1.5));
  CHECK(g.breakpoint_loads()[0] == Approx(0.3));
  CHECK(g.breakpoint_loads()[1] == Approx(0.5));

  CHECK(g.load(2.5) == 0.0);
  CHECK(g.load(2.0) == 0.0);
  CHECK(g.load(1.8) == Approx(0.3));
  CHECK(g.load(1.0) == Approx(0.5));

  CHECK(g.rho_of_f(0.0) == 2.0);
  CHECK(g.rho_of_f(0.2) == 2.0);
  CHECK(g.rho_of_f(0.3) == Approx(1.5));
  CHECK(g.rho_of_f(0.4) == Approx(1.5));
  CHECK(g.rho_of_f(0.5) == 0.0);
  CHECK(g.rho_left(0.3) == 2.0);

  CHECK(g.tau(0.0) == Approx(1.0));
  CHECK(g.tau(0.15) == Approx(0.7));
  CHECK(g.tau(0.3) == Approx(0.4));
  CHECK(g.tau(0.5) == Approx(0.1));
  CHECK(g.tau(3.0) == Approx(0.1));
  CHECK(g.used(3.0) == Approx(0.5));
  CHECK(g.full_load() == Approx(0.5));
}

TEST_CASE("cache extremes") {
  const auto cell = one_point();
  const LoadCurve none(cell, 1.0, 0.0);
  REQUIRE(none.thresholds().size() == 1);
  CHECK(none.thresholds()[0] == Approx(1.5));
  CHECK(none.tau(0.5) == Approx(0.25));  // all traffic over the backhaul

  const LoadCurve all(cell, 1.0, 1.0);
  REQUIRE(all.thresholds().size() == 1);
  CHECK(all.thresholds()[0] == 2.0);
  CHECK(all.tau(0.5) == Approx(0.0).epsilon(1e-15));
}

TEST_CASE("endpoints on random cells") {
  for (const auto& cell : random_cells(30)) {
    for (double S : {0.0, 0.4, 1.0}) {
      const LoadCurve g(cell, 1.3, S);
      CHECK(g.tau(0.0) == Approx(cell.macro_total / 1.3).epsilon(1e-12));
      CHECK(g.full_load() == Approx(cell.pico_total / 1.3).epsilon(1e-12));
      const double sat = (1 - S) * cell.backhaul_total / 1.3;
      CHECK(g.tau(g.full_load()) == Approx(sat).epsilon(1e-12).scale(cell.macro_total));
      CHECK(g.rho_of_f(0.0) == Approx(g.max_threshold()));
      CHECK(g.rho_of_f(g.full_load()) == 0.0);
    }
  }
}

TEST_CASE("curve agrees with the region sums") {
  for (const auto& cell : random_cells(30)) {
    for (double S : {0.0, 0.55, 1.0}) {
      const double W = 0.8;
      const LoadCurve g(cell, W, S);
      for (double rho : g.thresholds()) {
        CHECK(g.load(rho) == Approx(load_by_regions(cell, W, S, rho)).epsilon(1e-12).scale(g.full_load()));
      }
      for (int i = 0; i <= 20; ++i) {
        const double f = g.saturation_load() * i / 20.0;
        const double rho = g.rho_of_f(f);
        CHECK(g.tau(f) == Approx(tau_by_regions(cell, W, S, rho, f)).epsilon(1e-12).scale(g.tau(0)));
      }
    }
  }
}

TEST_CASE("weak and strong duality") {
  for (const auto& cell : random_cells(20)) {
    const LoadCurve g(cell, 1.0, 0.35);
    for (int i = 1; i < 8; ++i) {
      const double f = g.saturation_load() * i / 8.0;
      const double primal = g.tau(f);
      double best = dual_value(cell, 1.0, 0.35, 0.0, f);
      for (double rho : g.thresholds()) {
        const double d = dual_value(cell, 1.0, 0.35, rho, f);
        CHECK(d <= primal + 1e-12 * g.tau(0));
        best = std::max(best, d);
      }
      CHECK(best == Approx(primal).epsilon(1e-12).scale(g.tau(0)));
      const double big = 1e6 * g.max_threshold();
      CHECK(dual_value(cell, 1.0, 0.35, big, f) == Approx(g.tau(0) - big * f));
    }
  }
  CHECK_THROWS_AS(dual_value(one_point(), 1.0, 0.5, -1.0, 0.1), DomainError);
}

TEST_CASE("association vectors reproduce the pico time") {
  const Popularity pop({0.4, 0.3, 0.2, 0.1});
  for (const auto& cell : random_cells(20)) {
    for (double C : {0.0, 1.5, 4.0}) {
      const double W = 2.0;
      const LoadCurve g(cell, W, pop.hit_mass(C));
      for (double frac : {0.1, 0.5, 0.9, 1.2}) {
        const double f = frac * g.full_load();
        const auto sol = solve_subproblem(g, cell, C, f);
        double time = 0.0, macro = 0.0;
        const double S = pop.hit_mass(C);
        for (std::size_t k = 0; k < cell.size(); ++k) {
          const double xc = sol.x_cached[k], xu = sol.x_uncached[k];
          CHECK(xc >= 0.0);
          CHECK(xc <= 1.0);
          CHECK(xu <= xc + 1e-15);
          time += (S * xc + (1 - S) * xu) * cell.pico_unit[k] / W;
          macro += (S * (1 - xc) * cell.macro_unit[k] +
                    (1 - S) * ((1 - xu) * cell.macro_unit[k] + xu * cell.backhaul_unit[k])) / W;
        }
        CHECK(time == Approx(sol.pico_time_used).epsilon(1e-12).scale(g.full_load()));
        CHECK(time <= f + 1e-12 * g.full_load());
        CHECK(macro == Approx(sol.tau).epsilon(1e-12).scale(g.tau(0)));
      }
    }
  }
}

TEST_CASE("threshold monotonicity in cache size and bandwidth") {
  const auto pop = Popularity::zipf(8, 0.8);
  for (const auto& cell : random_cells(15)) {
    const double f = 0.4 * cell.pico_total;
    double prev = -1.0;
    for (double C = 0; C <= 8; C += 0.5) {
      const double rho = LoadCurve(cell, 1.0, pop.hit_mass(C)).rho_of_f(f);
      CHECK(rho >= prev);
      prev = rho;
    }
    prev = 1e300;
    for (double W : {0.5, 1.0, 2.0, 4.0}) {
      const double rho = LoadCurve(cell, W, pop.hit_mass(3)).rho_of_f(f);
      CHECK(rho <= prev);
      prev = rho;
    }
  }
}

TEST_CASE("cache set and csv") {
  CHECK(cache_set_for(0).files().empty());
  CHECK(cache_set_for(3).files() == std::vector<std::size_t>{1, 2, 3});
  const auto frac = cache_set_for(2.25);
  CHECK(frac.whole == 2);
  REQUIRE(frac.fraction);
  CHECK(*frac.fraction == Approx(0.25));

  const auto cell = one_point();
  const std::vector<LoadCurve> curves{LoadCurve(cell, 1.0, 0.6)};
  const std::vector<double> grid{0.0, 0.3};
  std::ostringstream out;
  write_threshold_csv(out, curves, grid);
  CHECK(out.str() == "f,rho_1,tau_1\n0,2,1\n0.3,1.5,0.4\n");
}
