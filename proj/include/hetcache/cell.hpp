#pragma once

#include <cstdint>
#include <vector>

namespace hetcache {

/// Traffic of one pico coverage area K_l in structure-of-arrays form.
///
/// Units: weights in files/sec, rates in files/sec/Hz. The "unit" arrays are
/// time masses at W = 1 Hz; the solver divides by W.
struct PicoCell {
  std::size_t pico = 0;
  double backhaul = 0.0;  // B_l

  std::vector<std::uint32_t> point_index;  // id of each entry in the owning cloud / instance
  std::vector<double> weight;
  std::vector<double> r0;
  std::vector<double> rl;
  std::vector<double> rho1;  // R_l / R_0
  std::vector<double> rho0;  // R_l / R_0 - R_l / B_l

  std::vector<double> pico_unit;      // w / R_l
  std::vector<double> macro_unit;     // w / R_0
  std::vector<double> backhaul_unit;  // w / B_l

  // Entry orders by descending rho, ties by descending per-point saving then point index.
  std::vector<std::uint32_t> order1;
  std::vector<std::uint32_t> order0;

  double pico_total = 0.0;      // sum w / R_l
  double macro_total = 0.0;     // sum w / R_0
  double backhaul_total = 0.0;  // sum w / B_l
  double max_r0 = 0.0;

  std::size_t size() const { return weight.size(); }
  bool empty() const { return weight.empty(); }

  /// f̄_l(W)
  double full_load(double bandwidth) const { return pico_total / bandwidth; }
  /// True when R_0 < B_l at every point.
  bool backhaul_dominates() const { return empty() || max_r0 < backhaul; }
  /// Points whose uncached stream has rho0 <= 0.
  std::size_t backhaul_violations() const;
};

/// Builds every derived array of a cell from raw per-point data.
PicoCell make_cell(std::size_t pico, double backhaul, std::vector<std::uint32_t> ids,
                   std::vector<double> weight, std::vector<double> r0, std::vector<double> rl);

}  // namespace hetcache
