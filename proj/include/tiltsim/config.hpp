#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "tiltsim/scenario.hpp"
#include "tiltsim/stability.hpp"

namespace tiltsim {

// One acceptance comparison from the run summary; op is "lt" or "gt".
struct ThresholdCheck {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  std::string op;
  bool pass = false;
};

struct RunConfig {
  VehicleParams vehicle;
  GainSet gains;
  ControllerConfig controller;
  ConvergenceTolerances convergence;
  double plant_dt = 2e-4;    // 5 kHz plant
  double control_dt = 2e-3;  // 500 Hz cascade
  std::map<std::string, Scenario> scenarios;
  std::map<std::string, std::map<std::string, double>> thresholds;

  // Scenario and threshold tables fully resolved with built-in defaults.
  static RunConfig defaults();

  // Strict parse: required vehicle/gains blocks, unknown keys rejected
  // anywhere, field-path errors. Throws ConfigError.
  static RunConfig from_json(const nlohmann::json& root);
  static RunConfig load(const std::string& path);
};

// Applies "dotted.path=value" onto a JSON tree (value parsed as JSON when
// possible, kept as string otherwise). Throws ConfigError on bad syntax.
void apply_override(nlohmann::json& root, const std::string& spec);

// Scenario metrics against the configured bounds. Threshold keys determine
// the comparison: min_* / require_* check value > bound, max_* and the rest
// check value < bound.
std::vector<ThresholdCheck> evaluate_checks(
    const SimulationLog& log, const Scenario& scenario,
    const std::map<std::string, double>& bounds);

nlohmann::json summary_json(const SimulationLog& log, const Scenario& scenario,
                            const std::vector<ThresholdCheck>& checks);

}  // namespace tiltsim
