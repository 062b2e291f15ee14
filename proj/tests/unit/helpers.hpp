#pragma once

#include <cmath>
#include <string>

#include "hetcache/scenario.hpp"

#ifndef HETCACHE_SCENARIO_DIR
#define HETCACHE_SCENARIO_DIR "scenarios"
#endif

namespace testing {

inline hetcache::ScenarioConfig bundled(const char* name, std::size_t samples = 20000) {
  auto cfg = hetcache::load_scenario_file(std::string(HETCACHE_SCENARIO_DIR) + "/" + name);
  cfg.sample_count = samples;
  return cfg;
}

inline double rel(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

}  // namespace testing
