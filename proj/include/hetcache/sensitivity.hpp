#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "hetcache/master.hpp"

namespace hetcache {

/// d tau_l / dW at fixed f and C: -(tau_l + rho_l f) / W.
/// Requires f > 0 and f not within one entry cost of g_l(0), where the derivative jumps.
double dtau_dW(const PicoCell& cell, double bandwidth, const Popularity& pop, double cache_size, double f);

/// d tau_l / dC at fixed f and W:
/// p_ceil(C) [ sum_{A1 \ A0} (rho/(W R_l) - 1/(W R_0)) - sum_{A0} 1/(W B_l) ] w, with
/// A_s = { rho_l(xi, s) > rho_l(f) }. Requires 0 < C < N away from integers by 1e-6.
double dtau_dC(const PicoCell& cell, double bandwidth, const Popularity& pop, double cache_size, double f);

struct SensitivityReport {
  std::size_t pico = 0;
  double f = 0.0, bandwidth = 0.0, cache_size = 0.0;
  double dtau_dW = 0.0, dtau_dC = 0.0;
  double fd_dW = 0.0, fd_dC = 0.0;
  double rel_err_W = 0.0, rel_err_C = 0.0;
};

/// Analytic derivatives next to central differences on the same cell.
/// Steps: W (1 +- w_step) and C +- c_step (must stay inside one integer interval).
SensitivityReport check_derivatives(const PicoCell& cell, double bandwidth, const Popularity& pop,
                                    double cache_size, double f, double w_step = 1e-3, double c_step = 0.25);

void write_derivative_csv(std::ostream& out, std::span<const SensitivityReport> reports);

struct SurfacePoint {
  double bandwidth = 0.0;
  double cache_size = 0.0;
  double tau_star = 0.0;
  double f_star = 0.0;
  Regime regime = Regime::no_pico;
};

struct Surface {
  std::vector<double> w_grid, c_grid;
  std::vector<SurfacePoint> points;  // row-major: W outer, C inner
  /// Neighbour pairs (along increasing W or C) with tau_next > tau_prev (1 + tolerance).
  std::size_t violations = 0;
  /// Neighbour pairs with tau_next >= tau_prev (not strictly decreasing).
  std::size_t non_strict = 0;

  const SurfacePoint& at(std::size_t iw, std::size_t ic) const { return points.at(iw * c_grid.size() + ic); }
};

/// Full solve at every grid point with the same C at every pico. Grids are sorted ascending.
Surface sweep(const PointCloud& cloud, const Popularity& pop, std::vector<double> w_grid,
              std::vector<double> c_grid, double tolerance = 1e-3);

void write_surface_csv(std::ostream& out, const Surface& s);

}  // namespace hetcache
