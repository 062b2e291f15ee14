#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hetcache/popularity.hpp"

namespace hetcache {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

double distance(Point2 a, Point2 b);
inline double norm(Point2 p) { return distance(p, Point2{}); }

struct PicoSite {
  Point2 position;
  double hotspot_radius_m = 150.0;
};

enum class CoverageMode { voronoi_full, hotspot_only };

/// What to do when a sampled location has R_0 >= B_l.
enum class BackhaulAssumption { enforce, report };

std::string_view to_string(CoverageMode mode);
std::string_view to_string(BackhaulAssumption policy);

/// Link-budget parameters (dBm / dBi).
struct RadioParams {
  double macro_tx_dbm = 46.0;
  double pico_tx_dbm = 30.0;
  double macro_ms_gain_dbi = 14.0;
  double pico_ms_gain_dbi = 5.0;
  double macro_pico_gain_dbi = 17.0;
  double noise_dbm = -104.0;
};

struct ScenarioConfig {
  // geometry
  double macro_radius_m = 1000.0;
  double macro_exclusion_m = 35.0;
  double pico_exclusion_m = 10.0;
  std::vector<PicoSite> pico_sites;
  CoverageMode coverage_mode = CoverageMode::voronoi_full;

  RadioParams radio;

  // traffic
  std::size_t n_files = 1000;
  double file_size_bits = 4e6;
  double arrival_rate = 1.0;  // files/sec
  double zipf_gamma = 0.8;
  std::optional<std::vector<double>> popularity;  // explicit, overrides zipf
  std::vector<double> hotspot_probs;
  double outside_prob = 0.0;

  // resources
  double bandwidth_hz = 1e6;
  std::vector<double> cache_sizes;

  // simulation
  std::size_t sample_count = 200000;
  std::uint64_t rng_seed = 1;
  BackhaulAssumption backhaul_assumption = BackhaulAssumption::enforce;

  std::size_t pico_count() const { return pico_sites.size(); }
};

/// Checks every scenario invariant; throws ValidationError naming the first violated one.
void validate(const ScenarioConfig& cfg);

/// Parses a JSON scenario document (see scenarios/*.json) and validates it.
ScenarioConfig load_scenario(std::string_view text);
ScenarioConfig load_scenario_file(const std::string& path);

/// The explicit popularity vector when given, Zipf(n_files, zipf_gamma) otherwise.
Popularity make_popularity(const ScenarioConfig& cfg);

/// Serializes back to the document form accepted by load_scenario.
std::string dump_scenario(const ScenarioConfig& cfg);

/// Applies a `key=value` override (W, C, gamma, lambda, samples, seed).
void apply_override(ScenarioConfig& cfg, std::string_view assignment);

// -- link budget --------------------------------------------------------------

double db_to_linear(double db);

/// 128.1 + 37.6 log10(d/1000); d must exceed 35 m.
double macro_pathloss_db(double d_m);
/// 140.7 + 36.7 log10(d/1000); d must exceed 10 m.
double pico_pathloss_db(double d_m);

/// Shannon rate in files/sec/Hz for a link with the given SNR (dB).
double shannon_rate(double snr_db, double file_size_bits);

double macro_snr_db(const RadioParams& radio, double d_m);
double pico_snr_db(const RadioParams& radio, double d_m);

/// R_0(xi): macro rate at a location (files/sec/Hz).
double rate_macro(const ScenarioConfig& cfg, Point2 xi);
/// R_l(xi): rate from pico `l` at a location.
double rate_pico(const ScenarioConfig& cfg, std::size_t l, Point2 xi);
/// B_l: macro-to-pico backhaul rate with the macro-pico antenna gain.
double backhaul_rate(const ScenarioConfig& cfg, std::size_t l);

}  // namespace hetcache
