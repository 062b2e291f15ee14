#pragma once

#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "hetcache/popularity.hpp"
#include "hetcache/sampling.hpp"
#include "hetcache/subproblem.hpp"

namespace hetcache {

/// Everything the master problem needs at one (W, C) point.
/// Holds pointers into the cloud's cells; the cloud must outlive the state.
struct MasterState {
  double bandwidth = 0.0;
  double tau0 = 0.0;
  std::vector<const PicoCell*> cells;
  std::vector<double> cache_sizes;
  std::vector<LoadCurve> curves;

  std::size_t pico_count() const { return curves.size(); }
};

/// One cache size per pico, or a single value shared by all.
MasterState make_state(const PointCloud& cloud, const Popularity& pop, double bandwidth,
                       std::span<const double> cache_sizes);

/// tau(f) = f + tau_0 + sum_l tau_l(f), summed in pico order.
double tau_total(const MasterState& s, double f);
double sum_rho(const MasterState& s, double f);
/// sum_l rho_l(f-) (left limits).
double sum_rho_left(const MasterState& s, double f);
/// f̄ = max_l f̄_l.
double f_bar(const MasterState& s);
/// Largest pico time any pico can use: max_l g_l(0). Equals f̄ when every R_0 < B_l.
double f_saturation(const MasterState& s);

enum class Regime { no_pico, interior, all_pico };
std::string_view to_string(Regime r);

struct MasterSolution {
  double f_star = 0.0;
  double tau_star = 0.0;
  Regime regime = Regime::no_pico;
  double tau0 = 0.0;
  double f_bar = 0.0;
  std::vector<SubproblemSolution> per_pico;
};

/// Smallest minimiser of tau(f) (smallest f with sum_l rho_l(f) <= 1).
MasterSolution solve_master(const MasterState& s);

/// Closed form f* = g(1/L) for picos whose curves agree. Throws DomainError when the
/// full loads or the loads at 1/L differ by more than `tolerance` (relative to their mean).
MasterSolution solve_homogeneous(const MasterState& s, double tolerance = 0.05);

/// Per-pico solutions at f_star; throws ConsistencyError if some pico uses more than f_star.
MasterSolution assemble_solution(const MasterState& s, double f_star, Regime regime);

/// Columns f, sum_rho, tau.
void write_master_curve_csv(std::ostream& out, const MasterState& s, std::span<const double> f_grid);
/// One "total" row then one row per pico.
void write_summary_csv(std::ostream& out, const MasterState& s, const MasterSolution& sol);

/// n evenly spaced points on [0, hi].
std::vector<double> linear_grid(double hi, std::size_t n);

}  // namespace hetcache
