#include "hetcache/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

#include "hetcache/csv.hpp"
#include "hetcache/errors.hpp"
#include "hetcache/master.hpp"
#include "hetcache/rng.hpp"
#include "hetcache/subproblem.hpp"

namespace hetcache {

void SmallInstance::check() const {
  const std::size_t L = pico_count();
  if (points.size() > kMaxPoints || popularity.size() > kMaxFiles || L > kMaxPicos)
    throw DomainError("instance exceeds the enumeration bounds (M <= 200, N <= 8, L <= 3)");
  if (popularity.empty()) throw DomainError("instance needs at least one file");
  if (cache.size() != L) throw DomainError("instance needs one cache size per pico");
  if (!(bandwidth > 0.0)) throw DomainError("bandwidth must be positive");
  for (std::size_t c : cache)
    if (c > popularity.size()) throw DomainError("cache size exceeds the number of files");
  for (const auto& p : points)
    if (p.pico != kMacroOnly && (p.pico < 0 || static_cast<std::size_t>(p.pico) >= L))
      throw DomainError("point refers to an unknown pico");
}

PointCloud SmallInstance::to_cloud() const {
  check();
  std::vector<SamplePoint> pts;
  pts.reserve(points.size());
  for (const auto& p : points) {
    SamplePoint s;
    s.pico_id = p.pico;
    s.weight = p.weight;
    s.r0 = p.r0;
    if (p.pico != kMacroOnly) s.rl = p.rl;
    pts.push_back(s);
  }
  return PointCloud(std::move(pts), backhaul, CoverageMode::hotspot_only);
}

Popularity SmallInstance::pop() const { return Popularity(popularity); }

namespace {

// One (file, point) item of the inner continuous knapsack.
struct Item {
  std::size_t file, point;
  double cost, macro, served, saving;
};

std::vector<std::size_t> points_of(const SmallInstance& inst, std::size_t pico) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < inst.points.size(); ++i)
    if (inst.points[i].pico == static_cast<std::int32_t>(pico)) idx.push_back(i);
  return idx;
}

std::vector<Item> make_items(const SmallInstance& inst, std::size_t pico, const std::vector<std::size_t>& pts,
                             std::uint32_t cached_mask) {
  const double W = inst.bandwidth, B = inst.backhaul[pico];
  std::vector<Item> items;
  for (std::size_t n = 0; n < inst.popularity.size(); ++n) {
    const double p = inst.popularity[n];
    const bool cached = (cached_mask >> n) & 1u;
    for (std::size_t k = 0; k < pts.size(); ++k) {
      const SmallPoint& q = inst.points[pts[k]];
      Item it{n, k, p * q.weight / (W * q.rl), p * q.weight / (W * q.r0), cached ? 0.0 : p * q.weight / (W * B), 0.0};
      it.saving = it.macro - it.served;
      items.push_back(it);
    }
  }
  return items;
}

/// Items worth serving, best saving per unit of pico time first.
std::vector<Item> greedy_order(std::vector<Item> items) {
  std::erase_if(items, [](const Item& it) { return !(it.saving > 0.0 && it.cost > 0.0); });
  std::stable_sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
    return a.saving * b.cost > b.saving * a.cost;
  });
  return items;
}

std::vector<std::uint32_t> subsets_by_preference(std::size_t n_files, std::size_t max_size) {
  std::vector<std::uint32_t> masks;
  for (std::uint32_t m = 0; m < (1u << n_files); ++m)
    if (static_cast<std::size_t>(std::popcount(m)) <= max_size) masks.push_back(m);
  auto files = [](std::uint32_t m) {
    std::vector<int> v;
    for (int n = 0; n < 32; ++n)
      if ((m >> n) & 1u) v.push_back(n);
    return v;
  };
  std::sort(masks.begin(), masks.end(), [&](std::uint32_t a, std::uint32_t b) {
    const int ca = std::popcount(a), cb = std::popcount(b);
    if (ca != cb) return ca > cb;
    return files(a) < files(b);
  });
  return masks;
}

struct Evaluated {
  double value = 0.0, used = 0.0;
  std::vector<std::vector<double>> x;
};

Evaluated evaluate(const SmallInstance& inst, std::size_t pico, const std::vector<std::size_t>& pts,
                   std::uint32_t mask, double f) {
  const std::vector<Item> all = make_items(inst, pico, pts, mask);
  Evaluated e;
  e.x.assign(inst.popularity.size(), std::vector<double>(pts.size(), 0.0));
  double budget = f;
  for (const Item& it : greedy_order(all)) {
    if (budget <= 0.0) break;
    const double take = std::min(1.0, budget / it.cost);
    e.x[it.file][it.point] = take;
    budget -= take * it.cost;
    e.used += take * it.cost;
  }
  // The objective, term by term.
  for (const Item& it : all) {
    const double x = e.x[it.file][it.point];
    e.value += (1.0 - x) * it.macro + x * it.served;
  }
  return e;
}

std::uint32_t most_popular_mask(std::size_t c) { return c == 0 ? 0u : ((1u << c) - 1u); }

}  // namespace

OracleSubproblem oracle_subproblem(const SmallInstance& inst, std::size_t pico, double f) {
  inst.check();
  if (pico >= inst.pico_count()) throw DomainError("unknown pico");
  if (f < 0.0) throw DomainError("pico time must be non-negative");
  const auto pts = points_of(inst, pico);

  OracleSubproblem out;
  bool have = false;
  std::uint32_t best_mask = 0;
  for (std::uint32_t mask : subsets_by_preference(inst.popularity.size(), inst.cache[pico])) {
    Evaluated e = evaluate(inst, pico, pts, mask, f);
    if (!have || e.value < out.value - 1e-12 * std::abs(out.value)) {
      have = true;
      best_mask = mask;
      out.value = e.value;
      out.pico_time_used = e.used;
      out.x = std::move(e.x);
    }
  }
  for (std::size_t n = 0; n < inst.popularity.size(); ++n)
    if ((best_mask >> n) & 1u) out.cache_set.push_back(n + 1);
  out.most_popular_value = evaluate(inst, pico, pts, most_popular_mask(inst.cache[pico]), f).value;
  return out;
}

namespace {

// Value of one cache subset as a function of f: total macro cost minus greedy savings.
struct SubsetCurve {
  double total = 0.0;
  std::vector<double> cum_cost, cost, saving, cum_saving;

  double operator()(double f) const {
    const auto j = static_cast<std::size_t>(std::upper_bound(cum_cost.begin(), cum_cost.end(), f) - cum_cost.begin());
    double s = j == 0 ? 0.0 : cum_saving[j - 1];
    if (j < cost.size()) s += (f - (j == 0 ? 0.0 : cum_cost[j - 1])) / cost[j] * saving[j];
    return total - s;
  }
};

SubsetCurve subset_curve(const SmallInstance& inst, std::size_t pico, const std::vector<std::size_t>& pts,
                         std::uint32_t mask) {
  const auto all = make_items(inst, pico, pts, mask);
  SubsetCurve c;
  for (const auto& it : all) c.total += it.macro;
  double cc = 0.0, cs = 0.0;
  for (const auto& it : greedy_order(all)) {
    c.cost.push_back(it.cost);
    c.saving.push_back(it.saving);
    c.cum_cost.push_back(cc += it.cost);
    c.cum_saving.push_back(cs += it.saving);
  }
  return c;
}

}  // namespace

OracleMaster oracle_master(const SmallInstance& inst, std::size_t grid_size) {
  inst.check();
  if (grid_size < 1000) throw DomainError("oracle grid needs at least 1000 points");
  const double W = inst.bandwidth;

  double tau0 = 0.0;
  std::vector<double> full(inst.pico_count(), 0.0);
  for (const auto& p : inst.points) {
    if (p.pico == kMacroOnly)
      tau0 += p.weight / (W * p.r0);
    else
      full[static_cast<std::size_t>(p.pico)] += p.weight / (W * p.rl);
  }

  std::vector<std::vector<SubsetCurve>> curves(inst.pico_count());
  for (std::size_t l = 0; l < inst.pico_count(); ++l) {
    const auto pts = points_of(inst, l);
    for (std::uint32_t mask : subsets_by_preference(inst.popularity.size(), inst.cache[l]))
      curves[l].push_back(subset_curve(inst, l, pts, mask));
  }
  auto tau = [&](double f) {
    double t = f + tau0;
    for (const auto& per_pico : curves) {
      double best = per_pico.front()(f);
      for (const auto& c : per_pico) best = std::min(best, c(f));
      t += best;
    }
    return t;
  };

  OracleMaster out;
  out.f_bar = full.empty() ? 0.0 : *std::max_element(full.begin(), full.end());

  out.grid_tau = tau(0.0);
  for (std::size_t i = 1; i < grid_size; ++i) {
    const double f = out.f_bar * static_cast<double>(i) / static_cast<double>(grid_size - 1);
    const double t = tau(f);
    if (t < out.grid_tau) {
      out.grid_tau = t;
      out.grid_f = f;
    }
  }

  // A piecewise-linear sum attains its minimum at one of its convex kinks, and
  // those all come from kinks of the individual subset curves.
  std::vector<double> candidates{0.0, out.f_bar, out.grid_f};
  for (const auto& per_pico : curves)
    for (const auto& c : per_pico)
      for (double k : c.cum_cost)
        if (k <= out.f_bar) candidates.push_back(k);
  std::sort(candidates.begin(), candidates.end());
  out.f_star = candidates.front();
  out.tau_star = tau(out.f_star);
  for (double f : candidates) {
    const double t = tau(f);
    if (t < out.tau_star - 1e-14 * std::abs(out.tau_star)) {
      out.tau_star = t;
      out.f_star = f;
    }
  }
  return out;
}

RingScenario ring_scenario() {
  RingScenario r;
  SmallInstance& inst = r.instance;
  // Inner ring: R_0 = 0.25, R_1 = 1. Outer ring: R_0 = 1, R_1 = 2. One unit of demand each.
  inst.points = {{1.0, 0.25, 1.0, 0}, {1.0, 1.0, 2.0, 0}};
  inst.backhaul = {4.0 / 3.0};
  inst.popularity = {0.5, 0.25, 0.25};
  inst.cache = {1};  // S = 0.5
  inst.bandwidth = 1.0;

  // Breakpoints (rho, pico time): inner cached (4, 0.5), inner uncached (3.25, 0.5),
  // outer cached (2, 0.25), outer uncached (0.5, 0.25).
  r.load = {{5.0, 0.0},  {4.0, 0.0},  {3.5, 0.5},  {3.25, 0.5}, {2.5, 1.0},
            {2.0, 1.0},  {1.5, 1.25}, {0.5, 1.25}, {0.25, 1.5}, {0.0, 1.5}};
  r.rho = {{0.0, 4.0},  {0.25, 4.0}, {0.5, 3.25}, {0.75, 3.25}, {1.0, 2.0},
           {1.1, 2.0},  {1.25, 0.5}, {1.4, 0.5},  {1.5, 0.0},   {3.0, 0.0}};
  // tau_1 starts at sum w/R_0 = 5 and falls with slope -rho on each segment down to
  // (1 - S) sum w/B = 0.75.
  r.tau = {{0.0, 5.0},    {0.25, 4.0},   {0.5, 3.0}, {0.75, 2.1875}, {1.0, 1.375},
           {1.25, 0.875}, {1.375, 0.8125}, {1.5, 0.75}, {2.0, 0.75}};
  // rho(f) <= 1 first at f = 1.25.
  r.f_star = 1.25;
  r.tau_star = 1.25 + 0.875;
  return r;
}

namespace {

double log_uniform(SplitMix64& rng, double lo, double hi) {
  return std::exp(rng.uniform(std::log(lo), std::log(hi)));
}

std::size_t pick(SplitMix64& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng.next() % (hi - lo + 1));
}

std::vector<double> random_popularity(SplitMix64& rng, std::size_t n) {
  std::vector<double> p(n);
  for (double& v : p) v = rng.uniform(0.05, 1.0);
  std::sort(p.begin(), p.end(), std::greater<>());
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& v : p) v /= total;
  return p;
}

}  // namespace

SmallInstance random_instance(std::uint64_t seed, const RandomInstanceLimits& lim) {
  SplitMix64 rng = SplitMix64::substream(seed, 0);
  SmallInstance inst;
  const std::size_t L = pick(rng, 1, lim.max_picos);
  const std::size_t N = pick(rng, 1, lim.max_files);
  const std::size_t M = pick(rng, std::max<std::size_t>(L, 2), lim.max_points);
  inst.popularity = random_popularity(rng, N);
  inst.bandwidth = log_uniform(rng, 0.5, 2.0);
  for (std::size_t l = 0; l < L; ++l) inst.cache.push_back(pick(rng, 0, std::min(lim.max_cache, N)));

  for (std::size_t i = 0; i < M; ++i) {
    SmallPoint p;
    p.weight = rng.uniform(0.1, 1.0);
    p.r0 = log_uniform(rng, 0.1, 10.0);
    p.rl = log_uniform(rng, 0.1, 10.0);
    // First L points seed every pico; afterwards roughly one in ten is macro-only.
    if (i < L)
      p.pico = static_cast<std::int32_t>(i);
    else if (rng.uniform() < 0.1)
      p.pico = kMacroOnly;
    else
      p.pico = static_cast<std::int32_t>(pick(rng, 0, L - 1));
    inst.points.push_back(p);
  }
  inst.backhaul.assign(L, 0.0);
  for (const auto& p : inst.points)
    if (p.pico != kMacroOnly) {
      double& b = inst.backhaul[static_cast<std::size_t>(p.pico)];
      b = std::max(b, p.r0);
    }
  for (double& b : inst.backhaul) b *= rng.uniform(1.05, 3.0);
  return inst;
}

SmallInstance all_pico_instance(std::uint64_t seed) {
  SmallInstance inst = random_instance(seed);
  for (auto& p : inst.points) {
    p.r0 *= 1e-3;
    p.rl *= 10.0;
  }
  for (double& b : inst.backhaul) b *= 1e3;
  return inst;
}

OracleSuite run_oracle_suite(std::size_t count, std::uint64_t seed, const RandomInstanceLimits& lim) {
  static constexpr double kFractions[] = {0.0, 0.25, 0.5, 0.75, 1.0, 2.0};
  OracleSuite suite;
  for (std::size_t i = 0; i < count; ++i) {
    const SmallInstance inst = random_instance(seed + i, lim);
    const PointCloud cloud = inst.to_cloud();
    const Popularity pop = inst.pop();
    for (std::size_t l = 0; l < inst.pico_count(); ++l) {
      const PicoCell& cell = cloud.cell(l);
      const auto c = static_cast<double>(inst.cache[l]);
      const LoadCurve curve(cell, inst.bandwidth, pop.hit_mass(c));
      for (double frac : kFractions) {
        const double f = frac * curve.full_load();
        const SubproblemSolution sol = solve_subproblem(curve, cell, c, f);
        const OracleSubproblem ref = oracle_subproblem(inst, l, f);

        OracleCheck chk;
        chk.instance = i;
        chk.pico = l;
        chk.f = f;
        chk.solver_value = sol.tau;
        chk.oracle_value = ref.value;
        // Values can cancel to ~0 (everything cached and served); measure against the all-macro cost.
        const double scale = std::max({std::abs(sol.tau), std::abs(ref.value), curve.tau(0.0)});
        chk.rel_gap = scale == 0.0 ? 0.0 : std::abs(sol.tau - ref.value) / scale;
        chk.cache_match = sol.cache.files() == ref.cache_set;
        chk.most_popular_optimal = !(ref.value < ref.most_popular_value - 1e-12 * std::abs(ref.most_popular_value));

        suite.max_gap = std::max(suite.max_gap, chk.rel_gap);
        if (!chk.cache_match) ++suite.cache_mismatches;
        if (!chk.most_popular_optimal) ++suite.popular_beaten;
        suite.checks.push_back(chk);
      }
    }
  }
  return suite;
}

void write_oracle_csv(std::ostream& out, const OracleSuite& suite, double tolerance) {
  csv::Writer w(out, {"instance", "pico", "f", "solver_value", "oracle_value", "rel_gap", "cache_match",
                      "most_popular_optimal", "pass"});
  auto yes = [](bool b) { return std::string(b ? "true" : "false"); };
  for (const auto& c : suite.checks)
    w.row({static_cast<std::uint64_t>(c.instance), static_cast<std::uint64_t>(c.pico + 1), c.f, c.solver_value,
           c.oracle_value, c.rel_gap, yes(c.cache_match), yes(c.most_popular_optimal),
           yes(c.rel_gap <= tolerance && c.cache_match && c.most_popular_optimal)});
}

}  // namespace hetcache
