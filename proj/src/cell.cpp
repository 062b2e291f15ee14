#include "hetcache/cell.hpp"

#include <algorithm>
#include <numeric>

#include "hetcache/errors.hpp"
#include "hetcache/kernels.hpp"

namespace hetcache {

std::size_t PicoCell::backhaul_violations() const {
  return static_cast<std::size_t>(std::count_if(rho0.begin(), rho0.end(), [](double r) { return !(r > 0.0); }));
}

namespace {

std::vector<std::uint32_t> sorted_order(const std::vector<double>& rho, const std::vector<double>& saving,
                                        const std::vector<std::uint32_t>& ids) {
  std::vector<std::uint32_t> order(rho.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (rho[a] != rho[b]) return rho[a] > rho[b];
    if (saving[a] != saving[b]) return saving[a] > saving[b];
    return ids[a] < ids[b];
  });
  return order;
}

}  // namespace

PicoCell make_cell(std::size_t pico, double backhaul, std::vector<std::uint32_t> ids,
                   std::vector<double> weight, std::vector<double> r0, std::vector<double> rl) {
  const std::size_t n = weight.size();
  if (ids.size() != n || r0.size() != n || rl.size() != n)
    throw DomainError("cell arrays must have equal length");
  if (!(backhaul > 0.0)) throw DomainError("backhaul rate must be positive");
  for (std::size_t i = 0; i < n; ++i)
    if (!(weight[i] > 0.0 && r0[i] > 0.0 && rl[i] > 0.0))
      throw DomainError("cell weights and rates must be positive");

  PicoCell c;
  c.pico = pico;
  c.backhaul = backhaul;
  c.point_index = std::move(ids);
  c.weight = std::move(weight);
  c.r0 = std::move(r0);
  c.rl = std::move(rl);

  const auto& k = kernels::active();
  c.rho1.resize(n);
  c.rho0.resize(n);
  k.benefit_ratios(c.rl.data(), c.r0.data(), backhaul, c.rho1.data(), c.rho0.data(), n);

  c.pico_unit.resize(n);
  c.macro_unit.resize(n);
  c.backhaul_unit.resize(n);
  k.divide(c.weight.data(), c.rl.data(), c.pico_unit.data(), n);
  k.divide(c.weight.data(), c.r0.data(), c.macro_unit.data(), n);
  for (std::size_t i = 0; i < n; ++i) c.backhaul_unit[i] = c.weight[i] / backhaul;

  c.pico_total = kernels::sum(c.pico_unit);
  c.macro_total = kernels::sum(c.macro_unit);
  c.backhaul_total = kernels::sum(c.backhaul_unit);
  c.max_r0 = n ? *std::max_element(c.r0.begin(), c.r0.end()) : 0.0;

  // Per-point savings at unit S and W: cached stream saves w/R_0, uncached saves w/R_0 - w/B.
  std::vector<double> uncached_saving(n);
  for (std::size_t i = 0; i < n; ++i) uncached_saving[i] = c.macro_unit[i] - c.backhaul_unit[i];
  c.order1 = sorted_order(c.rho1, c.macro_unit, c.point_index);
  c.order0 = sorted_order(c.rho0, uncached_saving, c.point_index);
  return c;
}

}  // namespace hetcache
