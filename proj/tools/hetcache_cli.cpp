// hetcache: solve cache placement / association / pico-time problems from a scenario file.
//
// Exit codes: 0 ok, 1 usage, 2 invalid input, 3 backhaul assumption violated,
// 4 a verification check failed (oracle gap, non-monotone surface), 5 internal error.

#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hetcache/csv.hpp"
#include "hetcache/errors.hpp"
#include "hetcache/kernels.hpp"
#include "hetcache/master.hpp"
#include "hetcache/oracle.hpp"
#include "hetcache/sampling.hpp"
#include "hetcache/scenario.hpp"
#include "hetcache/sensitivity.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace hetcache;

namespace {

enum Exit { kOk = 0, kUsage = 1, kInvalid = 2, kAssumption = 3, kCheckFailed = 4, kInternal = 5 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunArgs {
  std::string command;
  std::string scenario_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  std::vector<std::string> overrides;
  std::string out = "out";
  std::string f_grid = "200";
  std::string w_grid;
  std::string c_grid;
  std::size_t instances = 100;
  std::string kernels = "auto";
};

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
      throw UsageError(std::string(what) + ": '" + tok + "' is not a number");
    out.push_back(v);
  }
  if (out.empty()) throw UsageError(std::string(what) + " is empty");
  return out;
}

/// "n" gives n points on [0, 1.2 f̄]; anything with a comma or '.' is an explicit list.
std::vector<double> parse_f_grid(const std::string& text, double f_hi) {
  if (text.find_first_of(",.eE") == std::string::npos) {
    std::size_t n = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), n);
    if (ec != std::errc() || ptr != text.data() + text.size() || n == 0)
      throw UsageError("--f-grid: expected a positive count or a comma separated list");
    return linear_grid(1.2 * f_hi, n);
  }
  return parse_list(text, "--f-grid");
}

void select_kernels(const std::string& name) {
  if (name == "auto")
    kernels::select_auto();
  else if (name == "scalar")
    kernels::select_backend(kernels::Backend::scalar);
  else if (name == "avx2")
    kernels::select_backend(kernels::Backend::avx2);
  else
    throw UsageError("--kernels must be auto, scalar or avx2");
}

ScenarioConfig prepare_scenario(const RunArgs& a) {
  ScenarioConfig cfg = load_scenario_file(a.scenario_path);
  for (const auto& o : a.overrides) apply_override(cfg, o);
  if (a.seed) cfg.rng_seed = *a.seed;
  if (a.samples) cfg.sample_count = *a.samples;
  validate(cfg);
  return cfg;
}

void report_backhaul(const PointCloud& cloud) {
  for (const auto& cell : cloud.cells())
    if (!cell.backhaul_dominates())
      std::cerr << "note: pico " << cell.pico + 1 << ": " << cell.backhaul_violations() << " of " << cell.size()
                << " samples have R_0 >= B_l (max R_0 " << csv::format(cell.max_r0) << ", B_l "
                << csv::format(cell.backhaul) << "); their uncached demand stays on the macro BS\n";
}

std::ofstream open_out(const fs::path& dir, const std::string& name, std::vector<std::string>& written) {
  std::ofstream f(dir / name, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
  written.push_back(name);
  return f;
}

int cmd_solve(const ScenarioConfig& cfg, const fs::path& out, std::vector<std::string>& written) {
  const PointCloud cloud = generate_cloud(cfg);
  report_backhaul(cloud);
  const Popularity pop = make_popularity(cfg);
  const MasterState state = make_state(cloud, pop, cfg.bandwidth_hz, cfg.cache_sizes);
  const MasterSolution sol = solve_master(state);

  auto f = open_out(out, "summary.csv", written);
  write_summary_csv(f, state, sol);

  std::cout << "regime   " << to_string(sol.regime) << "\n"
            << "f*       " << csv::format(sol.f_star) << " s\n"
            << "tau*     " << csv::format(sol.tau_star) << " s\n"
            << "tau0     " << csv::format(sol.tau0) << " s\n";
  for (std::size_t l = 0; l < sol.per_pico.size(); ++l)
    std::cout << "pico " << l + 1 << "   rho " << csv::format(sol.per_pico[l].rho) << "   tau_l "
              << csv::format(sol.per_pico[l].tau) << "   pico time " << csv::format(sol.per_pico[l].pico_time_used)
              << "\n";
  return kOk;
}

int cmd_curves(const ScenarioConfig& cfg, const RunArgs& a, const fs::path& out, std::vector<std::string>& written) {
  const PointCloud cloud = generate_cloud(cfg);
  report_backhaul(cloud);
  const Popularity pop = make_popularity(cfg);
  const MasterState state = make_state(cloud, pop, cfg.bandwidth_hz, cfg.cache_sizes);
  const std::vector<double> grid = parse_f_grid(a.f_grid, f_bar(state));

  auto t = open_out(out, "thresholds.csv", written);
  write_threshold_csv(t, state.curves, grid);
  auto m = open_out(out, "total.csv", written);
  write_master_curve_csv(m, state, grid);
  std::cout << "wrote " << grid.size() << " grid points to " << out.string() << "\n";
  return kOk;
}

int cmd_sweep(const ScenarioConfig& cfg, const RunArgs& a, const fs::path& out, std::vector<std::string>& written) {
  const std::vector<double> ws = a.w_grid.empty() ? std::vector<double>{cfg.bandwidth_hz} : parse_list(a.w_grid, "--w-grid");
  const std::vector<double> cs =
      a.c_grid.empty() ? std::vector<double>{cfg.cache_sizes.empty() ? 0.0 : cfg.cache_sizes.front()}
                       : parse_list(a.c_grid, "--c-grid");
  const PointCloud cloud = generate_cloud(cfg);
  report_backhaul(cloud);
  const Surface s = sweep(cloud, make_popularity(cfg), ws, cs);

  auto f = open_out(out, "surface.csv", written);
  write_surface_csv(f, s);
  std::cout << s.points.size() << " grid points, " << s.violations << " monotonicity violations, " << s.non_strict
            << " non-strict steps\n";
  if (s.violations > 0) {
    std::cerr << "error: tau* increases along the grid beyond tolerance\n";
    return kCheckFailed;
  }
  return kOk;
}

int cmd_oracle(const RunArgs& a, std::uint64_t seed, const fs::path& out, std::vector<std::string>& written) {
  if (a.instances == 0) throw UsageError("--instances must be at least 1");
  const auto t0 = std::chrono::steady_clock::now();
  const OracleSuite suite = run_oracle_suite(a.instances, seed);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  // Ring instance against its hand-computed values.
  const RingScenario ring = ring_scenario();
  const PointCloud cloud = ring.instance.to_cloud();
  const Popularity pop = ring.instance.pop();
  const double c[1] = {static_cast<double>(ring.instance.cache[0])};
  const MasterState state = make_state(cloud, pop, ring.instance.bandwidth, c);
  const LoadCurve& curve = state.curves[0];
  double ring_err = 0.0;
  for (const auto& s : ring.load) ring_err = std::max(ring_err, std::abs(curve.load(s.x) - s.value));
  for (const auto& s : ring.rho) ring_err = std::max(ring_err, std::abs(curve.rho_of_f(s.x) - s.value));
  for (const auto& s : ring.tau) ring_err = std::max(ring_err, std::abs(curve.tau(s.x) - s.value));
  const MasterSolution ms = solve_master(state);
  ring_err = std::max({ring_err, std::abs(ms.f_star - ring.f_star), std::abs(ms.tau_star - ring.tau_star)});

  auto f = open_out(out, "oracle.csv", written);
  write_oracle_csv(f, suite);

  const bool ok = suite.passed() && ring_err <= 1e-9;
  std::cout << a.instances << " instances, " << suite.checks.size() << " checks in " << csv::format(secs) << " s\n"
            << "max relative gap      " << csv::format(suite.max_gap) << "\n"
            << "cache set mismatches  " << suite.cache_mismatches << "\n"
            << "most-popular beaten   " << suite.popular_beaten << "\n"
            << "ring max abs error    " << csv::format(ring_err) << "\n"
            << (ok ? "PASS" : "FAIL") << "\n";
  return ok ? kOk : kCheckFailed;
}

int cmd_cloud(const ScenarioConfig& cfg, const fs::path& out, std::vector<std::string>& written) {
  const PointCloud cloud = generate_cloud(cfg);
  report_backhaul(cloud);
  auto f = open_out(out, "cloud.csv", written);
  write_cloud_csv(f, cloud);
  std::cout << cloud.size() << " samples written\n";
  return kOk;
}

json args_json(const RunArgs& a) {
  return {{"f_grid", a.f_grid}, {"w_grid", a.w_grid}, {"c_grid", a.c_grid}, {"instances", a.instances},
          {"kernels", a.kernels}};
}

/// Runs one command with an already-resolved scenario and writes its manifest.
int execute(const RunArgs& a, const std::optional<ScenarioConfig>& cfg) {
  select_kernels(a.kernels);
  const fs::path out(a.out);
  fs::create_directories(out);
  const auto t0 = std::chrono::steady_clock::now();

  std::vector<std::string> written;
  int rc = kOk;
  std::uint64_t seed = cfg ? cfg->rng_seed : a.seed.value_or(1);
  if (a.command == "solve")
    rc = cmd_solve(*cfg, out, written);
  else if (a.command == "curves")
    rc = cmd_curves(*cfg, a, out, written);
  else if (a.command == "sweep")
    rc = cmd_sweep(*cfg, a, out, written);
  else if (a.command == "oracle")
    rc = cmd_oracle(a, seed, out, written);
  else if (a.command == "cloud")
    rc = cmd_cloud(*cfg, out, written);
  else
    throw UsageError("unknown command " + a.command);

  json m;
  m["command"] = a.command;
  m["scenario_path"] = a.scenario_path;
  m["scenario"] = cfg ? json::parse(dump_scenario(*cfg)) : json(nullptr);
  m["seed"] = seed;
  m["sample_count"] = cfg ? json(cfg->sample_count) : json(nullptr);
  m["overrides"] = a.overrides;
  m["args"] = args_json(a);
  m["out"] = a.out;
  m["outputs"] = written;
  m["tool_version"] = HETCACHE_VERSION;
  m["kernels"] = std::string(kernels::to_string(kernels::active_backend()));
  m["wall_clock_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  m["exit_code"] = rc;
  std::ofstream(out / "manifest.json") << m.dump(2) << "\n";
  return rc;
}

int replay(const std::string& manifest_path, const std::string& out) {
  std::ifstream in(manifest_path);
  if (!in) throw UsageError("cannot read manifest " + manifest_path);
  json m;
  try {
    m = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(manifest_path, e.what());
  }
  RunArgs a;
  try {
    a.command = m.at("command").get<std::string>();
    a.scenario_path = m.at("scenario_path").get<std::string>();
    a.overrides = m.at("overrides").get<std::vector<std::string>>();
    const json& args = m.at("args");
    a.f_grid = args.at("f_grid").get<std::string>();
    a.w_grid = args.at("w_grid").get<std::string>();
    a.c_grid = args.at("c_grid").get<std::string>();
    a.instances = args.at("instances").get<std::size_t>();
    a.kernels = args.at("kernels").get<std::string>();
    a.seed = m.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ParseError(manifest_path, e.what());
  }
  a.out = out;
  std::optional<ScenarioConfig> cfg;
  if (!m.at("scenario").is_null()) cfg = load_scenario(m.at("scenario").dump());
  return execute(a, cfg);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cache placement, user association and pico-time allocation for a macro/pico network"};
  app.set_version_flag("--version", std::string(HETCACHE_VERSION));
  app.require_subcommand(1);

  RunArgs a;
  std::string manifest;

  auto common = [&](CLI::App* sub, bool needs_scenario) {
    auto* opt = sub->add_option("--scenario", a.scenario_path, "scenario JSON document");
    if (needs_scenario) opt->required();
    sub->add_option("--seed", a.seed, "RNG seed (overrides the scenario)");
    sub->add_option("--out", a.out, "output directory")->capture_default_str();
    sub->add_option("--kernels", a.kernels, "auto, scalar or avx2")->capture_default_str();
  };
  auto scenario_opts = [&](CLI::App* sub) {
    sub->add_option("--samples", a.samples, "Monte Carlo sample count (overrides the scenario)");
    sub->add_option("--override", a.overrides, "key=value with key in W, C, gamma, lambda, samples, seed")
        ->take_all()
        ->allow_extra_args(false);
  };

  auto* solve = app.add_subcommand("solve", "optimal pico time, caching and association");
  common(solve, true);
  scenario_opts(solve);

  auto* curves = app.add_subcommand("curves", "rho_l(f), sum rho_l(f) and tau(f) on an f grid");
  common(curves, true);
  scenario_opts(curves);
  curves->add_option("--f-grid", a.f_grid, "point count on [0, 1.2 f_bar] or comma separated list")
      ->capture_default_str();

  auto* sweep_cmd = app.add_subcommand("sweep", "tau* over a (W, C) grid");
  common(sweep_cmd, true);
  scenario_opts(sweep_cmd);
  sweep_cmd->add_option("--w-grid", a.w_grid, "comma separated bandwidths in Hz");
  sweep_cmd->add_option("--c-grid", a.c_grid, "comma separated cache sizes in files");

  auto* oracle = app.add_subcommand("oracle", "compare the solver with brute force on random small instances");
  common(oracle, false);
  oracle->add_option("--instances", a.instances, "number of random instances")->capture_default_str();

  auto* cloud = app.add_subcommand("cloud", "dump the Monte Carlo sample cloud as CSV");
  common(cloud, true);
  scenario_opts(cloud);

  auto* replay_cmd = app.add_subcommand("replay", "rerun the command recorded in a manifest");
  replay_cmd->add_option("manifest", manifest, "manifest.json of an earlier run")->required();
  replay_cmd->add_option("--out", a.out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (replay_cmd->parsed()) return replay(manifest, a.out);
    for (auto* sub : app.get_subcommands()) a.command = sub->get_name();
    std::optional<ScenarioConfig> cfg;
    if (a.command != "oracle") cfg = prepare_scenario(a);
    return execute(a, cfg);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const AssumptionError& e) {
    std::cerr << "assumption violated: " << e.what() << "\n";
    return kAssumption;
  } catch (const ConsistencyError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
}
