#include "hetcache/sampling.hpp"

#include <charconv>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "hetcache/csv.hpp"
#include "hetcache/errors.hpp"
#include "hetcache/kernels.hpp"
#include "hetcache/rng.hpp"

namespace hetcache {

namespace {

constexpr std::size_t kMaxRejections = 1'000'000;

/// Index of the closest pico (lowest index on ties).
std::int32_t nearest_pico(const ScenarioConfig& cfg, Point2 xi) {
  std::int32_t best = kMacroOnly;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l < cfg.pico_count(); ++l) {
    const double d = distance(xi, cfg.pico_sites[l].position);
    if (d < best_d) {
      best_d = d;
      best = static_cast<std::int32_t>(l);
    }
  }
  return best;
}

bool in_exclusion_zone(const ScenarioConfig& cfg, Point2 xi) {
  if (norm(xi) <= cfg.macro_exclusion_m) return true;
  for (const auto& site : cfg.pico_sites)
    if (distance(xi, site.position) <= cfg.pico_exclusion_m) return true;
  return false;
}

bool in_any_hotspot(const ScenarioConfig& cfg, Point2 xi) {
  for (const auto& site : cfg.pico_sites)
    if (distance(xi, site.position) < site.hotspot_radius_m) return true;
  return false;
}

/// Uniform location in region `region` (a pico index, or L for the non-hotspot area).
Point2 draw_location(const ScenarioConfig& cfg, std::size_t region, SplitMix64& rng) {
  const bool hotspot = region < cfg.pico_count();
  const Point2 centre = hotspot ? cfg.pico_sites[region].position : Point2{};
  const double radius = hotspot ? cfg.pico_sites[region].hotspot_radius_m : cfg.macro_radius_m;

  for (std::size_t attempt = 0; attempt < kMaxRejections; ++attempt) {
    const Point2 xi{rng.uniform(centre.x - radius, centre.x + radius),
                    rng.uniform(centre.y - radius, centre.y + radius)};
    if (distance(xi, centre) >= radius) continue;
    if (norm(xi) > cfg.macro_radius_m) continue;
    if (in_exclusion_zone(cfg, xi)) continue;
    if (!hotspot && in_any_hotspot(cfg, xi)) continue;
    return xi;
  }
  throw GeometryError("could not place a sample in " +
                      (hotspot ? "hotspot " + std::to_string(region) : std::string("the non-hotspot area")) +
                      " after 10^6 consecutive rejections");
}

}  // namespace

PointCloud::PointCloud(std::vector<SamplePoint> points, std::vector<double> backhaul, CoverageMode mode)
    : points_(std::move(points)), backhaul_(std::move(backhaul)), mode_(mode) {
  const std::size_t L = backhaul_.size();
  std::vector<std::vector<std::uint32_t>> ids(L);
  std::vector<std::vector<double>> w(L), r0(L), rl(L);
  std::vector<double> macro_w, macro_r0;

  for (std::size_t i = 0; i < points_.size(); ++i) {
    const SamplePoint& p = points_[i];
    total_weight_ += p.weight;
    if (p.pico_id == kMacroOnly) {
      macro_w.push_back(p.weight);
      macro_r0.push_back(p.r0);
      continue;
    }
    const auto l = static_cast<std::size_t>(p.pico_id);
    if (l >= L || !p.rl) throw DomainError("sample point has an invalid pico assignment");
    ids[l].push_back(static_cast<std::uint32_t>(i));
    w[l].push_back(p.weight);
    r0[l].push_back(p.r0);
    rl[l].push_back(*p.rl);
  }
  macro_only_unit_ = kernels::sum_ratio(macro_w, macro_r0);

  cells_.reserve(L);
  for (std::size_t l = 0; l < L; ++l)
    cells_.push_back(make_cell(l, backhaul_[l], std::move(ids[l]), std::move(w[l]), std::move(r0[l]),
                               std::move(rl[l])));

  // Publish the precomputed ratios on the points themselves.
  for (const auto& cell : cells_)
    for (std::size_t k = 0; k < cell.size(); ++k) {
      SamplePoint& p = points_[cell.point_index[k]];
      p.rho1 = cell.rho1[k];
      p.rho0 = cell.rho0[k];
    }
}

PointCloud generate_cloud(const ScenarioConfig& cfg) {
  validate(cfg);
  const std::size_t L = cfg.pico_count();
  const std::size_t M = cfg.sample_count;

  // Categorical over regions 0..L-1 (hotspots) and L (outside); zero-probability
  // regions are skipped and the last live bound is pinned to 1 against rounding.
  std::vector<std::size_t> regions;
  std::vector<double> upper;
  double acc = 0.0;
  for (std::size_t r = 0; r <= L; ++r) {
    const double prob = r < L ? cfg.hotspot_probs[r] : cfg.outside_prob;
    if (prob <= 0.0) continue;
    regions.push_back(r);
    upper.push_back(acc += prob);
  }
  upper.back() = 1.0;

  std::vector<double> backhaul(L);
  for (std::size_t l = 0; l < L; ++l) backhaul[l] = backhaul_rate(cfg, l);

  const double weight = cfg.arrival_rate / static_cast<double>(M);
  std::vector<SamplePoint> points(M);
  for (std::size_t i = 0; i < M; ++i) {
    SplitMix64 rng = SplitMix64::substream(cfg.rng_seed, i);
    const double u = rng.uniform();
    std::size_t k = 0;
    while (k + 1 < upper.size() && !(u < upper[k])) ++k;
    const std::size_t region = regions[k];

    SamplePoint& p = points[i];
    p.position = draw_location(cfg, region, rng);
    p.weight = weight;
    p.r0 = rate_macro(cfg, p.position);
    if (cfg.coverage_mode == CoverageMode::voronoi_full)
      p.pico_id = nearest_pico(cfg, p.position);
    else
      p.pico_id = region < L ? static_cast<std::int32_t>(region) : kMacroOnly;
    if (p.pico_id != kMacroOnly) p.rl = rate_pico(cfg, static_cast<std::size_t>(p.pico_id), p.position);
  }

  PointCloud cloud(std::move(points), std::move(backhaul), cfg.coverage_mode);
  if (cfg.backhaul_assumption == BackhaulAssumption::enforce) check_backhaul_assumption(cloud);
  return cloud;
}

void check_backhaul_assumption(const PointCloud& cloud) {
  for (const auto& cell : cloud.cells())
    if (!cell.backhaul_dominates())
      throw AssumptionError(static_cast<int>(cell.pico),
                            "pico " + std::to_string(cell.pico) + ": backhaul rate B_l = " +
                                csv::format(cell.backhaul) + " does not exceed the largest sampled macro rate " +
                                csv::format(cell.max_r0) + " in its coverage area");
}

double tau_zero(const PointCloud& cloud, double bandwidth) { return cloud.macro_only_unit() / bandwidth; }

double full_load(const PointCloud& cloud, std::size_t l, double bandwidth) {
  const PicoCell& cell = cloud.cell(l);
  if (cell.empty()) throw ValidationError("pico " + std::to_string(l) + " has no samples (degenerate scenario)");
  return cell.full_load(bandwidth);
}

double max_full_load(const PointCloud& cloud, double bandwidth) {
  double best = 0.0;
  for (const auto& cell : cloud.cells()) best = std::max(best, cell.full_load(bandwidth));
  return best;
}

// ---------------------------------------------------------------------------
// CSV dump

void write_cloud_csv(std::ostream& out, const PointCloud& cloud) {
  csv::Writer w(out, {"x", "y", "pico_id", "w", "r0", "rl", "rho0", "rho1"});
  auto opt = [](const std::optional<double>& v) -> csv::Cell {
    return v ? csv::Cell(*v) : csv::Cell(std::string());
  };
  for (const auto& p : cloud.points())
    w.row({p.position.x, p.position.y, static_cast<std::int64_t>(p.pico_id), p.weight, p.r0, opt(p.rl),
           opt(p.rho0), opt(p.rho1)});
}

namespace {

double to_double(const std::string& s, std::size_t line) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ParseError("cloud csv line " + std::to_string(line), "expected a number, got '" + s + "'");
  return v;
}

}  // namespace

PointCloud read_cloud_csv(std::istream& in, const ScenarioConfig& cfg) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("cloud csv", "missing header");
  const auto header = csv::split_line(line);
  const std::vector<std::string> expected{"x", "y", "pico_id", "w", "r0", "rl", "rho0", "rho1"};
  if (header != expected) throw ParseError("cloud csv", "unexpected header");

  std::vector<SamplePoint> points;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = csv::split_line(line);
    if (f.size() != 8) throw ParseError("cloud csv line " + std::to_string(lineno), "expected 8 fields");
    SamplePoint p;
    p.position = {to_double(f[0], lineno), to_double(f[1], lineno)};
    p.pico_id = static_cast<std::int32_t>(to_double(f[2], lineno));
    p.weight = to_double(f[3], lineno);
    p.r0 = to_double(f[4], lineno);
    if (!f[5].empty()) p.rl = to_double(f[5], lineno);
    points.push_back(p);
  }

  std::vector<double> backhaul(cfg.pico_count());
  for (std::size_t l = 0; l < cfg.pico_count(); ++l) backhaul[l] = backhaul_rate(cfg, l);
  return PointCloud(std::move(points), std::move(backhaul), cfg.coverage_mode);
}

}  // namespace hetcache
