#include "hetcache/master.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "hetcache/csv.hpp"
#include "hetcache/errors.hpp"

namespace hetcache {

MasterState make_state(const PointCloud& cloud, const Popularity& pop, double bandwidth,
                       std::span<const double> cache_sizes) {
  const std::size_t L = cloud.pico_count();
  if (!(bandwidth > 0.0)) throw DomainError("bandwidth must be positive");
  if (L > 0 && cache_sizes.size() != L && cache_sizes.size() != 1)
    throw DomainError("expected one cache size per pico or a single shared value");

  MasterState s;
  s.bandwidth = bandwidth;
  s.tau0 = tau_zero(cloud, bandwidth);
  s.curves.reserve(L);
  for (std::size_t l = 0; l < L; ++l) {
    const double c = cache_sizes.size() == 1 ? cache_sizes[0] : cache_sizes[l];
    s.cells.push_back(&cloud.cell(l));
    s.cache_sizes.push_back(c);
    s.curves.emplace_back(cloud.cell(l), bandwidth, pop.hit_mass(c));
  }
  return s;
}

double tau_total(const MasterState& s, double f) {
  double t = f + s.tau0;
  for (const auto& c : s.curves) t += c.tau(f);
  return t;
}

double sum_rho(const MasterState& s, double f) {
  double r = 0.0;
  for (const auto& c : s.curves) r += c.rho_of_f(f);
  return r;
}

double sum_rho_left(const MasterState& s, double f) {
  double r = 0.0;
  for (const auto& c : s.curves) r += c.rho_left(f);
  return r;
}

double f_bar(const MasterState& s) {
  double f = 0.0;
  for (const auto& c : s.curves) f = std::max(f, c.full_load());
  return f;
}

double f_saturation(const MasterState& s) {
  double f = 0.0;
  for (const auto& c : s.curves) f = std::max(f, c.saturation_load());
  return f;
}

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::no_pico: return "no_pico";
    case Regime::interior: return "interior";
    case Regime::all_pico: return "all_pico";
  }
  return "?";
}

MasterSolution solve_master(const MasterState& s) {
  const double hi_end = f_saturation(s);
  if (s.curves.empty() || hi_end <= 0.0 || sum_rho(s, 0.0) <= 1.0)
    return assemble_solution(s, 0.0, Regime::no_pico);
  if (sum_rho_left(s, hi_end) >= 1.0) return assemble_solution(s, hi_end, Regime::all_pico);

  // sum_rho(lo) > 1 >= sum_rho(hi) throughout.
  double lo = 0.0, hi = hi_end;
  while (hi - lo > 1e-12 * hi_end) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (sum_rho(s, mid) > 1.0 ? lo : hi) = mid;
  }

  // The crossing sits on some curve's breakpoint load in (lo, hi]; evaluate them all.
  std::vector<double> candidates{hi};
  for (const auto& c : s.curves) {
    const auto loads = c.breakpoint_loads();
    auto it = std::upper_bound(loads.begin(), loads.end(), lo);
    for (; it != loads.end() && *it <= hi; ++it) candidates.push_back(*it);
  }
  std::sort(candidates.begin(), candidates.end());
  double best_f = candidates.front(), best_tau = tau_total(s, best_f);
  for (double f : candidates) {
    const double t = tau_total(s, f);
    if (t < best_tau - 1e-14 * std::abs(best_tau)) {
      best_tau = t;
      best_f = f;
    }
  }
  return assemble_solution(s, best_f, Regime::interior);
}

MasterSolution solve_homogeneous(const MasterState& s, double tolerance) {
  const std::size_t L = s.pico_count();
  if (L == 0) return assemble_solution(s, 0.0, Regime::no_pico);

  const double threshold = 1.0 / static_cast<double>(L);
  std::vector<double> loads(L), full(L);
  for (std::size_t l = 0; l < L; ++l) {
    loads[l] = s.curves[l].load(threshold);
    full[l] = s.curves[l].saturation_load();
  }
  auto spread_ok = [&](const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    for (double x : v)
      if (std::abs(x - mean) > tolerance * std::abs(mean)) return false;
    return true;
  };
  if (!spread_ok(full) || !spread_ok(loads))
    throw DomainError("pico load curves differ beyond the homogeneity tolerance; use the general solver");

  double f = 0.0;
  for (double x : loads) f += x;
  f /= static_cast<double>(L);

  Regime regime = Regime::interior;
  if (f <= 0.0)
    regime = Regime::no_pico;
  else if (f >= f_saturation(s))
    regime = Regime::all_pico;
  return assemble_solution(s, f, regime);
}

MasterSolution assemble_solution(const MasterState& s, double f_star, Regime regime) {
  MasterSolution sol;
  sol.f_star = f_star;
  sol.regime = regime;
  sol.tau0 = s.tau0;
  sol.f_bar = f_bar(s);
  sol.tau_star = f_star + s.tau0;
  const double slack = 1e-9 * std::max(1.0, f_star);
  for (std::size_t l = 0; l < s.pico_count(); ++l) {
    sol.per_pico.push_back(solve_subproblem(s.curves[l], *s.cells[l], s.cache_sizes[l], f_star));
    const auto& p = sol.per_pico.back();
    if (p.pico_time_used > f_star + slack)
      throw ConsistencyError("pico " + std::to_string(l + 1) + " uses more pico time than allotted");
    sol.tau_star += p.tau;
  }
  return sol;
}

void write_master_curve_csv(std::ostream& out, const MasterState& s, std::span<const double> f_grid) {
  csv::Writer w(out, {"f", "sum_rho", "tau"});
  for (double f : f_grid) w.row({f, sum_rho(s, f), tau_total(s, f)});
}

void write_summary_csv(std::ostream& out, const MasterState& s, const MasterSolution& sol) {
  csv::Writer w(out, {"pico", "regime", "f_star", "tau_star", "tau0", "rho", "tau_l", "pico_time_used",
                      "full_load", "hit_mass", "cache_size"});
  w.row({std::string("total"), std::string(to_string(sol.regime)), sol.f_star, sol.tau_star, sol.tau0,
         std::string(), std::string(), std::string(), sol.f_bar, std::string(), std::string()});
  for (std::size_t l = 0; l < sol.per_pico.size(); ++l) {
    const auto& p = sol.per_pico[l];
    w.row({static_cast<std::uint64_t>(l + 1), std::string(to_string(sol.regime)), sol.f_star, sol.tau_star,
           sol.tau0, p.rho, p.tau, p.pico_time_used, s.curves[l].full_load(), p.hit_mass, s.cache_sizes[l]});
  }
}

std::vector<double> linear_grid(double hi, std::size_t n) {
  if (n == 0) return {};
  if (n == 1) return {hi};
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = hi * static_cast<double>(i) / static_cast<double>(n - 1);
  return g;
}

}  // namespace hetcache
