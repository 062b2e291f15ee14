#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hetcache/errors.hpp"
#include "hetcache/oracle.hpp"
#include "hetcache/sensitivity.hpp"
#include "helpers.hpp"

using namespace hetcache;
using doctest::Approx;

namespace {

SmallInstance widen(SmallInstance inst) {
  const auto zipf = Popularity::zipf(8, 0.8);
  const auto z = zipf.values();
  inst.popularity.assign(z.begin(), z.end());
  return inst;
}

struct Fixture {
  SmallInstance inst = widen(random_instance(42, {1, 8, 4, 60}));
  PointCloud cloud = inst.to_cloud();
  Popularity pop = inst.pop();
  const PicoCell& cell() const { return cloud.cell(0); }
};

}  // namespace

TEST_CASE("beyond saturation only the backhaul term remains") {
  Fixture fx;
  const double W = 1.7, C = 2.5;
  const LoadCurve g(fx.cell(), W, fx.pop.hit_mass(C));
  const double f = 2.0 * g.full_load();
  CHECK(dtau_dW(fx.cell(), W, fx.pop, C, f) == Approx(-g.tau(f) / W).epsilon(1e-12));
  const double expect = -fx.pop.marginal(C) * fx.cell().backhaul_total / W;
  CHECK(dtau_dC(fx.cell(), W, fx.pop, C, f) == Approx(expect).epsilon(1e-12));
}

TEST_CASE("analytic derivatives match central differences") {
  Fixture fx;
  const LoadCurve g(fx.cell(), 1.0, fx.pop.hit_mass(2.5));
  for (double frac : {0.2, 0.45, 0.7}) {
    const auto r = check_derivatives(fx.cell(), 1.0, fx.pop, 2.5, frac * g.full_load(), 1e-7, 0.25);
    CAPTURE(frac);
    CHECK(r.rel_err_W < 1e-4);
    CHECK(r.rel_err_C < 1e-4);
  }
}

TEST_CASE("derivative domain") {
  Fixture fx;
  const LoadCurve g(fx.cell(), 1.0, fx.pop.hit_mass(2.5));
  const double f = 0.5 * g.full_load();
  CHECK_THROWS_AS(dtau_dW(fx.cell(), 1.0, fx.pop, 2.5, 0.0), DomainError);
  CHECK_THROWS_AS(dtau_dW(fx.cell(), 1.0, fx.pop, 2.5, g.saturation_load()), DomainError);
  CHECK_THROWS_AS(dtau_dC(fx.cell(), 1.0, fx.pop, 3.0, f), DomainError);
  CHECK_THROWS_AS(dtau_dC(fx.cell(), 1.0, fx.pop, 0.0, f), DomainError);
  CHECK_THROWS_AS(dtau_dC(fx.cell(), 1.0, fx.pop, static_cast<double>(fx.pop.size()), f), DomainError);
}

TEST_CASE("cache stops helping when the backhaul is free") {
  Fixture fx;
  const auto& c = fx.cell();
  const PicoCell fast = make_cell(0, 1e12, c.point_index, c.weight, c.r0, c.rl);
  const double f = 0.5 * c.pico_total;
  const double slow = dtau_dC(c, 1.0, fx.pop, 1.5, f);
  CHECK(slow < 0.0);
  CHECK(std::abs(dtau_dC(fast, 1.0, fx.pop, 1.5, f)) < 1e-6 * std::abs(slow));
}

TEST_CASE("sweep") {
  const auto inst = random_instance(9);
  const auto cloud = inst.to_cloud();
  const auto pop = inst.pop();

  const auto one = sweep(cloud, pop, {1.0}, {2.0});
  const std::vector<double> c{2.0};
  const auto direct = solve_master(make_state(cloud, pop, 1.0, c));
  CHECK(one.at(0, 0).tau_star == direct.tau_star);
  CHECK(one.at(0, 0).f_star == direct.f_star);

  // tau*(kW) = tau*(W) / k: every time term scales with 1/W.
  const auto two = sweep(cloud, pop, {1.0, 2.0}, {0.0, 1.0, 2.0, 3.0});
  for (std::size_t ic = 0; ic < 4; ++ic) {
    CHECK(two.at(1, ic).tau_star == Approx(two.at(0, ic).tau_star / 2).epsilon(1e-12));
    CHECK(two.at(1, ic).f_star == Approx(two.at(0, ic).f_star / 2).epsilon(1e-12));
  }
  CHECK(two.violations == 0);

  std::ostringstream out;
  write_surface_csv(out, two);
  const auto text = out.str();
  CHECK(text.rfind("W,C,tau_star,f_star,regime\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 9);
}

TEST_CASE("derivative csv") {
  Fixture fx;
  const LoadCurve g(fx.cell(), 1.0, fx.pop.hit_mass(2.5));
  const std::vector<SensitivityReport> reps{check_derivatives(fx.cell(), 1.0, fx.pop, 2.5, 0.3 * g.full_load())};
  std::ostringstream out;
  write_derivative_csv(out, reps);
  const auto text = out.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 2);
}
