#include "hetcache/scenario.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "hetcache/errors.hpp"

namespace hetcache {

using nlohmann::json;

double distance(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

std::string_view to_string(CoverageMode mode) {
  return mode == CoverageMode::voronoi_full ? "voronoi_full" : "hotspot_only";
}

std::string_view to_string(BackhaulAssumption policy) {
  return policy == BackhaulAssumption::enforce ? "enforce" : "report";
}

// ---------------------------------------------------------------------------
// Validation

void validate(const ScenarioConfig& cfg) {
  auto fail = [](const std::string& msg) { throw ValidationError(msg); };

  if (!(cfg.macro_radius_m > 0.0)) fail("macro_radius_m must be positive");
  if (!(cfg.macro_exclusion_m >= 0.0) || !(cfg.pico_exclusion_m >= 0.0))
    fail("exclusion radii must be non-negative");
  if (cfg.n_files == 0) fail("n_files must be at least 1");
  if (!(cfg.file_size_bits > 0.0)) fail("file_size_bits must be positive");
  if (!(cfg.arrival_rate > 0.0)) fail("arrival_rate must be positive");
  if (!(cfg.zipf_gamma >= 0.0)) fail("zipf_gamma must be >= 0");
  if (!(cfg.bandwidth_hz > 0.0)) fail("bandwidth W must be > 0");
  if (cfg.sample_count == 0) fail("sample_count must be at least 1");

  const std::size_t L = cfg.pico_count();
  if (cfg.hotspot_probs.size() != L)
    fail("hotspot_probs must have one entry per pico site");
  if (cfg.cache_sizes.size() != L) fail("cache_sizes must have one entry per pico site");

  double total = cfg.outside_prob;
  if (!(cfg.outside_prob >= 0.0 && cfg.outside_prob <= 1.0)) fail("outside_prob must lie in [0,1]");
  for (double p : cfg.hotspot_probs) {
    if (!(p >= 0.0 && p <= 1.0)) fail("hotspot probabilities must lie in [0,1]");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12)
    fail("hotspot_probs and outside_prob must sum to 1 (got " + std::to_string(total) + ")");

  for (std::size_t l = 0; l < L; ++l) {
    const auto& site = cfg.pico_sites[l];
    const std::string tag = "pico " + std::to_string(l);
    if (!(norm(site.position) < cfg.macro_radius_m))
      fail(tag + " must lie strictly inside the macro disc");
    if (!(site.hotspot_radius_m > cfg.pico_exclusion_m))
      fail(tag + ": hotspot_radius_m must exceed pico_exclusion_m");
    const double c = cfg.cache_sizes[l];
    if (!(c >= 0.0 && c <= static_cast<double>(cfg.n_files)))
      fail(tag + ": cache size C_l must lie in [0, N]");
  }

  if (cfg.coverage_mode == CoverageMode::hotspot_only) {
    for (std::size_t a = 0; a < L; ++a)
      for (std::size_t b = a + 1; b < L; ++b) {
        const auto& sa = cfg.pico_sites[a];
        const auto& sb = cfg.pico_sites[b];
        if (distance(sa.position, sb.position) < sa.hotspot_radius_m + sb.hotspot_radius_m)
          fail("hotspot discs of picos " + std::to_string(a) + " and " + std::to_string(b) +
               " overlap (hotspot_only requires disjoint coverage)");
      }
  }

  if (cfg.popularity) {
    const auto& p = *cfg.popularity;
    if (p.size() != cfg.n_files) fail("popularity vector must have n_files entries");
    double s = 0.0;
    for (std::size_t n = 0; n < p.size(); ++n) {
      if (!(p[n] >= 0.0)) fail("popularity entries must be non-negative");
      if (n > 0 && p[n] > p[n - 1]) fail("popularity vector must be non-increasing");
      s += p[n];
    }
    if (std::abs(s - 1.0) > 1e-9) fail("popularity vector must sum to 1");
  }
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

class Reader {
 public:
  Reader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ParseError(path_, "expected an object");
  }

  /// Rejects keys that were never read.
  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it)
      if (!seen_.count(it.key())) throw ParseError(child(it.key()), "unknown field");
  }

  bool has(const std::string& key) const { return obj_.contains(key); }

  const json& at(const std::string& key) {
    seen_.insert(key);
    if (!obj_.contains(key)) throw ParseError(child(key), "missing required field");
    return obj_.at(key);
  }

  double number(const std::string& key) {
    const json& v = at(key);
    if (!v.is_number()) throw ParseError(child(key), "expected a number");
    return v.get<double>();
  }

  double number_or(const std::string& key, double fallback) {
    return has(key) ? number(key) : fallback;
  }

  std::uint64_t unsigned_integer(const std::string& key) {
    const json& v = at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return v.get<std::uint64_t>();
    if (v.is_number_float()) {
      const double d = v.get<double>();
      if (d >= 0.0 && d == std::floor(d) && d < 1.8e19) return static_cast<std::uint64_t>(d);
    }
    throw ParseError(child(key), "expected a non-negative integer");
  }

  std::string string(const std::string& key) {
    const json& v = at(key);
    if (!v.is_string()) throw ParseError(child(key), "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key) {
    const json& v = at(key);
    if (!v.is_array()) throw ParseError(child(key), "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number())
        throw ParseError(child(key) + "[" + std::to_string(i) + "]", "expected a number");
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

CoverageMode parse_coverage(const std::string& s, const std::string& field) {
  if (s == "voronoi_full") return CoverageMode::voronoi_full;
  if (s == "hotspot_only") return CoverageMode::hotspot_only;
  throw ParseError(field, "expected 'voronoi_full' or 'hotspot_only'");
}

BackhaulAssumption parse_backhaul(const std::string& s, const std::string& field) {
  if (s == "enforce") return BackhaulAssumption::enforce;
  if (s == "report") return BackhaulAssumption::report;
  throw ParseError(field, "expected 'enforce' or 'report'");
}

}  // namespace

ScenarioConfig load_scenario(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("<document>", e.what());
  }

  ScenarioConfig cfg;
  Reader root(doc, "");
  {
    Reader g(root.at("geometry"), "geometry");
    cfg.macro_radius_m = g.number("macro_radius_m");
    cfg.macro_exclusion_m = g.number_or("macro_exclusion_m", 35.0);
    cfg.pico_exclusion_m = g.number_or("pico_exclusion_m", 10.0);
    if (g.has("coverage_mode"))
      cfg.coverage_mode = parse_coverage(g.string("coverage_mode"), g.child("coverage_mode"));
    const json& sites = g.at("pico_sites");
    if (!sites.is_array()) throw ParseError("geometry.pico_sites", "expected an array");
    for (std::size_t i = 0; i < sites.size(); ++i) {
      const std::string path = "geometry.pico_sites[" + std::to_string(i) + "]";
      Reader s(sites[i], path);
      auto pos = s.numbers("position");
      if (pos.size() != 2) throw ParseError(path + ".position", "expected [x, y]");
      PicoSite site;
      site.position = {pos[0], pos[1]};
      site.hotspot_radius_m = s.number("hotspot_radius_m");
      s.finish();
      cfg.pico_sites.push_back(site);
    }
    g.finish();
  }
  {
    Reader r(root.at("radio"), "radio");
    cfg.radio.macro_tx_dbm = r.number("macro_tx_dbm");
    cfg.radio.pico_tx_dbm = r.number("pico_tx_dbm");
    cfg.radio.macro_ms_gain_dbi = r.number("macro_ms_gain_dbi");
    cfg.radio.pico_ms_gain_dbi = r.number("pico_ms_gain_dbi");
    cfg.radio.macro_pico_gain_dbi = r.number("macro_pico_gain_dbi");
    cfg.radio.noise_dbm = r.number("noise_dbm");
    r.finish();
  }
  {
    Reader t(root.at("traffic"), "traffic");
    cfg.n_files = t.unsigned_integer("n_files");
    cfg.file_size_bits = t.number("file_size_bits");
    cfg.arrival_rate = t.number("arrival_rate");
    cfg.hotspot_probs = t.numbers("hotspot_probs");
    cfg.outside_prob = t.number("outside_prob");
    if (t.has("popularity")) cfg.popularity = t.numbers("popularity");
    if (t.has("zipf_gamma"))
      cfg.zipf_gamma = t.number("zipf_gamma");
    else if (!cfg.popularity)
      throw ParseError("traffic.zipf_gamma", "missing required field (or give traffic.popularity)");
    t.finish();
  }
  {
    Reader r(root.at("resources"), "resources");
    cfg.bandwidth_hz = r.number("bandwidth_hz");
    cfg.cache_sizes = r.numbers("cache_sizes");
    r.finish();
  }
  {
    Reader s(root.at("simulation"), "simulation");
    cfg.sample_count = s.unsigned_integer("sample_count");
    cfg.rng_seed = s.unsigned_integer("rng_seed");
    if (s.has("backhaul_assumption"))
      cfg.backhaul_assumption =
          parse_backhaul(s.string("backhaul_assumption"), s.child("backhaul_assumption"));
    s.finish();
  }
  root.finish();

  validate(cfg);
  return cfg;
}

ScenarioConfig load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, "cannot open scenario file");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_scenario(ss.str());
}

std::string dump_scenario(const ScenarioConfig& cfg) {
  json sites = json::array();
  for (const auto& s : cfg.pico_sites)
    sites.push_back({{"position", {s.position.x, s.position.y}}, {"hotspot_radius_m", s.hotspot_radius_m}});
  json traffic = {{"n_files", cfg.n_files},
                  {"file_size_bits", cfg.file_size_bits},
                  {"arrival_rate", cfg.arrival_rate},
                  {"zipf_gamma", cfg.zipf_gamma},
                  {"hotspot_probs", cfg.hotspot_probs},
                  {"outside_prob", cfg.outside_prob}};
  if (cfg.popularity) traffic["popularity"] = *cfg.popularity;
  json doc = {
      {"geometry",
       {{"macro_radius_m", cfg.macro_radius_m},
        {"macro_exclusion_m", cfg.macro_exclusion_m},
        {"pico_exclusion_m", cfg.pico_exclusion_m},
        {"coverage_mode", std::string(to_string(cfg.coverage_mode))},
        {"pico_sites", sites}}},
      {"radio",
       {{"macro_tx_dbm", cfg.radio.macro_tx_dbm},
        {"pico_tx_dbm", cfg.radio.pico_tx_dbm},
        {"macro_ms_gain_dbi", cfg.radio.macro_ms_gain_dbi},
        {"pico_ms_gain_dbi", cfg.radio.pico_ms_gain_dbi},
        {"macro_pico_gain_dbi", cfg.radio.macro_pico_gain_dbi},
        {"noise_dbm", cfg.radio.noise_dbm}}},
      {"traffic", traffic},
      {"resources", {{"bandwidth_hz", cfg.bandwidth_hz}, {"cache_sizes", cfg.cache_sizes}}},
      {"simulation",
       {{"sample_count", cfg.sample_count},
        {"rng_seed", cfg.rng_seed},
        {"backhaul_assumption", std::string(to_string(cfg.backhaul_assumption))}}}};
  return doc.dump(2);
}

namespace {

double parse_double(std::string_view s, std::string_view key) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ParseError(std::string("override ") + std::string(key), "expected a number, got '" + std::string(s) + "'");
  return v;
}

}  // namespace

void apply_override(ScenarioConfig& cfg, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos)
    throw ParseError(std::string(assignment), "override must have the form key=value");
  const std::string_view key = assignment.substr(0, eq);
  const std::string_view value = assignment.substr(eq + 1);

  if (key == "W") {
    cfg.bandwidth_hz = parse_double(value, key);
  } else if (key == "C") {
    // one value for every pico, or a comma separated list
    std::vector<double> sizes;
    std::size_t start = 0;
    while (start <= value.size()) {
      auto comma = value.find(',', start);
      if (comma == std::string_view::npos) comma = value.size();
      sizes.push_back(parse_double(value.substr(start, comma - start), key));
      start = comma + 1;
    }
    if (sizes.size() == 1)
      cfg.cache_sizes.assign(cfg.pico_count(), sizes.front());
    else
      cfg.cache_sizes = std::move(sizes);
  } else if (key == "gamma") {
    cfg.zipf_gamma = parse_double(value, key);
    cfg.popularity.reset();
  } else if (key == "lambda") {
    cfg.arrival_rate = parse_double(value, key);
  } else if (key == "samples") {
    cfg.sample_count = static_cast<std::size_t>(parse_double(value, key));
  } else if (key == "seed") {
    std::uint64_t seed = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), seed);
    if (ec != std::errc() || ptr != value.data() + value.size())
      throw ParseError("override seed", "expected an unsigned integer, got '" + std::string(value) + "'");
    cfg.rng_seed = seed;
  } else {
    throw ParseError(std::string(key), "unknown override key (expected W, C, gamma, lambda, samples, seed)");
  }
  validate(cfg);
}

// ---------------------------------------------------------------------------
// Link budget

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double macro_pathloss_db(double d_m) {
  if (!(d_m > 35.0)) throw DomainError("macro pathloss is defined for d > 35 m");
  return 128.1 + 37.6 * std::log10(d_m / 1000.0);
}

double pico_pathloss_db(double d_m) {
  if (!(d_m > 10.0)) throw DomainError("pico pathloss is defined for d > 10 m");
  return 140.7 + 36.7 * std::log10(d_m / 1000.0);
}

double shannon_rate(double snr_db, double file_size_bits) {
  return std::log2(1.0 + db_to_linear(snr_db)) / file_size_bits;
}

double macro_snr_db(const RadioParams& radio, double d_m) {
  return radio.macro_tx_dbm + radio.macro_ms_gain_dbi - macro_pathloss_db(d_m) - radio.noise_dbm;
}

double pico_snr_db(const RadioParams& radio, double d_m) {
  return radio.pico_tx_dbm + radio.pico_ms_gain_dbi - pico_pathloss_db(d_m) - radio.noise_dbm;
}

double rate_macro(const ScenarioConfig& cfg, Point2 xi) {
  const double d = norm(xi);
  if (d > cfg.macro_radius_m) throw DomainError("location lies outside the macro disc");
  if (!(d > cfg.macro_exclusion_m)) throw DomainError("location lies in the macro exclusion zone");
  return shannon_rate(macro_snr_db(cfg.radio, d), cfg.file_size_bits);
}

double rate_pico(const ScenarioConfig& cfg, std::size_t l, Point2 xi) {
  if (l >= cfg.pico_count()) throw DomainError("pico index out of range");
  const double d = distance(xi, cfg.pico_sites[l].position);
  if (!(d > cfg.pico_exclusion_m)) throw DomainError("location lies in the pico exclusion zone");
  return shannon_rate(pico_snr_db(cfg.radio, d), cfg.file_size_bits);
}

double backhaul_rate(const ScenarioConfig& cfg, std::size_t l) {
  if (l >= cfg.pico_count()) throw DomainError("pico index out of range");
  const double d = norm(cfg.pico_sites[l].position);
  const double snr_db =
      cfg.radio.macro_tx_dbm + cfg.radio.macro_pico_gain_dbi - macro_pathloss_db(d) - cfg.radio.noise_dbm;
  return shannon_rate(snr_db, cfg.file_size_bits);
}

Popularity make_popularity(const ScenarioConfig& cfg) {
  return cfg.popularity ? Popularity(*cfg.popularity) : Popularity::zipf(cfg.n_files, cfg.zipf_gamma);
}

}  // namespace hetcache
