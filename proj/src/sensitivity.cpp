#include "hetcache/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "hetcache/csv.hpp"
#include "hetcache/errors.hpp"
#include "hetcache/kernels.hpp"

namespace hetcache {

namespace {

void check_point(const LoadCurve& curve, double f) {
  if (!(f > 0.0)) throw DomainError("derivatives need f > 0");
  if (std::abs(f - curve.saturation_load()) <= curve.max_entry_cost())
    throw DomainError("f sits on the full-load kink; use one-sided differences");
}

void check_cache(const Popularity& pop, double cache_size) {
  const double n = static_cast<double>(pop.size());
  if (!(cache_size > 0.0 && cache_size < n)) throw DomainError("cache size must lie in (0, N)");
  if (std::abs(cache_size - std::round(cache_size)) < 1e-6)
    throw DomainError("cache size is an integer; the derivative in C is one-sided there");
}

double relative(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace

double dtau_dW(const PicoCell& cell, double bandwidth, const Popularity& pop, double cache_size, double f) {
  const LoadCurve curve(cell, bandwidth, pop.hit_mass(cache_size));
  check_point(curve, f);
  return -(curve.tau(f) + curve.rho_of_f(f) * f) / bandwidth;
}

double dtau_dC(const PicoCell& cell, double bandwidth, const Popularity& pop, double cache_size, double f) {
  check_cache(pop, cache_size);
  const LoadCurve curve(cell, bandwidth, pop.hit_mass(cache_size));
  check_point(curve, f);
  const double rho = curve.rho_of_f(f);

  // A0 is nested in A1 (rho0 < rho1), so the A1 \ A0 sum is the A1 sum minus the A0 sum.
  const double u1 = kernels::sum_where_greater(cell.pico_unit, cell.rho1, rho);
  const double m1 = kernels::sum_where_greater(cell.macro_unit, cell.rho1, rho);
  const double u0 = kernels::sum_where_greater(cell.pico_unit, cell.rho0, rho);
  const double m0 = kernels::sum_where_greater(cell.macro_unit, cell.rho0, rho);
  const double b0 = kernels::sum_where_greater(cell.backhaul_unit, cell.rho0, rho);
  const double bracket = (rho * u1 - m1) - (rho * u0 - m0) - b0;
  return pop.marginal(cache_size) * bracket / bandwidth;
}

SensitivityReport check_derivatives(const PicoCell& cell, double bandwidth, const Popularity& pop,
                                    double cache_size, double f, double w_step, double c_step) {
  SensitivityReport r;
  r.pico = cell.pico;
  r.f = f;
  r.bandwidth = bandwidth;
  r.cache_size = cache_size;
  r.dtau_dW = dtau_dW(cell, bandwidth, pop, cache_size, f);
  r.dtau_dC = dtau_dC(cell, bandwidth, pop, cache_size, f);

  if (std::floor(cache_size - c_step) != std::floor(cache_size + c_step) || cache_size - c_step <= 0.0)
    throw DomainError("cache-size step crosses an integer");
  const double s = pop.hit_mass(cache_size);
  const double h = w_step * bandwidth;
  const LoadCurve up_w(cell, bandwidth + h, s), down_w(cell, bandwidth - h, s);
  r.fd_dW = (up_w.tau(f) - down_w.tau(f)) / (2.0 * h);
  const LoadCurve up_c(cell, bandwidth, pop.hit_mass(cache_size + c_step));
  const LoadCurve down_c(cell, bandwidth, pop.hit_mass(cache_size - c_step));
  r.fd_dC = (up_c.tau(f) - down_c.tau(f)) / (2.0 * c_step);

  r.rel_err_W = relative(r.dtau_dW, r.fd_dW);
  r.rel_err_C = relative(r.dtau_dC, r.fd_dC);
  return r;
}

void write_derivative_csv(std::ostream& out, std::span<const SensitivityReport> reports) {
  csv::Writer w(out, {"pico", "f", "W", "C", "dtau_dW", "fd_dW", "rel_err_W", "dtau_dC", "fd_dC", "rel_err_C"});
  for (const auto& r : reports)
    w.row({static_cast<std::uint64_t>(r.pico + 1), r.f, r.bandwidth, r.cache_size, r.dtau_dW, r.fd_dW,
           r.rel_err_W, r.dtau_dC, r.fd_dC, r.rel_err_C});
}

Surface sweep(const PointCloud& cloud, const Popularity& pop, std::vector<double> w_grid,
              std::vector<double> c_grid, double tolerance) {
  if (w_grid.empty() || c_grid.empty()) throw DomainError("sweep grids must be non-empty");
  std::sort(w_grid.begin(), w_grid.end());
  std::sort(c_grid.begin(), c_grid.end());

  Surface out;
  out.w_grid = std::move(w_grid);
  out.c_grid = std::move(c_grid);
  for (double W : out.w_grid)
    for (double C : out.c_grid) {
      const double c[1] = {C};
      const MasterState state = make_state(cloud, pop, W, c);
      const MasterSolution sol = solve_master(state);
      out.points.push_back({W, C, sol.tau_star, sol.f_star, sol.regime});
    }

  auto compare = [&](const SurfacePoint& prev, const SurfacePoint& next) {
    if (next.tau_star > prev.tau_star * (1.0 + tolerance)) ++out.violations;
    if (next.tau_star >= prev.tau_star) ++out.non_strict;
  };
  const std::size_t nw = out.w_grid.size(), nc = out.c_grid.size();
  for (std::size_t i = 0; i < nw; ++i)
    for (std::size_t j = 0; j < nc; ++j) {
      if (i + 1 < nw) compare(out.at(i, j), out.at(i + 1, j));
      if (j + 1 < nc) compare(out.at(i, j), out.at(i, j + 1));
    }
  return out;
}

void write_surface_csv(std::ostream& out, const Surface& s) {
  csv::Writer w(out, {"W", "C", "tau_star", "f_star", "regime"});
  for (const auto& p : s.points)
    w.row({p.bandwidth, p.cache_size, p.tau_star, p.f_star, std::string(to_string(p.regime))});
}

}  // namespace hetcache
