#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tiltsim/config.hpp"
#include "tiltsim/errors.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitThreshold = 1;
constexpr int kExitConfig = 2;
constexpr int kExitAbort = 3;

struct RunResult {
  std::string scenario;
  int exit_code = kExitOk;
  std::string message;
};

json load_tree(const std::string& config_path,
               const std::vector<std::string>& overrides) {
  std::ifstream in(config_path);
  if (!in)
    throw tiltsim::ConfigError("", "cannot open config file " + config_path);
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    throw tiltsim::ConfigError("", std::string("JSON parse error: ") + e.what());
  }
  for (const std::string& ov : overrides) tiltsim::apply_override(root, ov);
  return root;
}

RunResult run_one(const tiltsim::RunConfig& cfg, const std::string& name,
                  const fs::path& out_dir, bool check_stability) {
  RunResult result;
  result.scenario = name;

  const auto it = cfg.scenarios.find(name);
  if (it == cfg.scenarios.end()) {
    result.exit_code = kExitConfig;
    result.message = "unknown scenario '" + name + "'";
    return result;
  }
  const tiltsim::Scenario& scenario = it->second;

  tiltsim::SimulationLog log;
  try {
    log = tiltsim::run_scenario(scenario, cfg.gains, cfg.vehicle,
                                cfg.controller);
  } catch (const tiltsim::GainRejection& e) {
    result.exit_code = kExitConfig;
    result.message = e.what();
    return result;
  } catch (const tiltsim::InfeasiblePitch& e) {
    result.exit_code = kExitConfig;
    result.message = e.what();
    return result;
  } catch (const tiltsim::ConfigError& e) {
    result.exit_code = kExitConfig;
    result.message = e.what();
    return result;
  }
  tiltsim::write_csv(log, (out_dir / (name + ".csv")).string());

  const auto checks =
      tiltsim::evaluate_checks(log, scenario, cfg.thresholds.at(name));
  json summary = tiltsim::summary_json(log, scenario, checks);

  if (check_stability) {
    json cert;
    try {
      const tiltsim::ConvergenceReport report = tiltsim::certify_cascade(
          log, cfg.gains, cfg.convergence, /*require_clean=*/true);
      cert["pass"] = report.pass;
      cert["decay_rate"] = report.decay_rate;
      cert["fit_residual"] = report.fit_residual;
      cert["envelope_ok"] = report.envelope_ok;
      cert["terminal_e_u"] = report.terminal_e_u;
      cert["terminal_coupling"] = report.terminal_coupling;
      std::ofstream txt(out_dir / (name + "_certificate.txt"));
      txt << report.to_string();
    } catch (const tiltsim::InvalidLog& e) {
      cert["pass"] = false;
      cert["error"] = e.what();
      std::ofstream txt(out_dir / (name + "_certificate.txt"));
      txt << "cascade convergence certificate: INVALID\n  " << e.what() << "\n";
    }
    summary["stability_certificate"] = cert;
    std::ofstream jf(out_dir / (name + "_certificate.json"));
    jf << cert.dump(2) << "\n";
  }

  std::ofstream sf(out_dir / (name + "_summary.json"));
  sf << summary.dump(2) << "\n";

  if (log.aborted) {
    result.exit_code = kExitAbort;
    result.message = "simulation aborted: " + log.abort_reason;
  } else if (!summary["pass"].get<bool>()) {
    result.exit_code = kExitThreshold;
    std::string failed;
    for (const auto& c : checks)
      if (!c.pass) failed += (failed.empty() ? "" : ", ") + c.name;
    result.message = "threshold failure: " + failed;
  } else {
    result.message = "ok";
  }
  return result;
}

int cmd_run(const std::string& config_path,
            const std::vector<std::string>& scenario_names,
            const std::string& out_dir_str,
            const std::vector<std::string>& overrides, bool check_stability,
            unsigned parallel) {
  tiltsim::RunConfig cfg;
  try {
    cfg = tiltsim::RunConfig::from_json(load_tree(config_path, overrides));
  } catch (const tiltsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  std::vector<std::string> names;
  for (const std::string& n : scenario_names) {
    if (n == "all") {
      for (const auto& [key, _] : cfg.scenarios) names.push_back(key);
    } else if (!cfg.scenarios.count(n)) {
      std::cerr << "config error: unknown scenario '" << n << "'\n";
      return kExitConfig;
    } else {
      names.push_back(n);
    }
  }

  const fs::path out_dir(out_dir_str);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    std::cerr << "cannot create output directory " << out_dir << "\n";
    return kExitConfig;
  }

  std::vector<RunResult> results(names.size());
  if (parallel > 1 && names.size() > 1) {
    std::mutex mu;
    size_t next = 0;
    const auto worker = [&]() {
      while (true) {
        size_t idx;
        {
          std::lock_guard<std::mutex> lock(mu);
          if (next >= names.size()) return;
          idx = next++;
        }
        results[idx] = run_one(cfg, names[idx], out_dir, check_stability);
      }
    };
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < std::min<unsigned>(parallel, names.size()); ++i)
      pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  } else {
    for (size_t i = 0; i < names.size(); ++i)
      results[i] = run_one(cfg, names[i], out_dir, check_stability);
  }

  int exit_code = kExitOk;
  for (const RunResult& r : results) {
    std::cout << r.scenario << ": " << r.message << "\n";
    if (r.exit_code == kExitAbort)
      exit_code = kExitAbort;
    else if (exit_code != kExitAbort && r.exit_code != kExitOk)
      exit_code = std::max(exit_code, r.exit_code);
  }
  return exit_code;
}

int cmd_validate(const std::string& config_path,
                 const std::vector<std::string>& overrides) {
  try {
    const tiltsim::RunConfig cfg =
        tiltsim::RunConfig::from_json(load_tree(config_path, overrides));
    const tiltsim::GainReport report = tiltsim::validate_gains(cfg.gains);
    if (!report.ok) {
      std::cerr << "config error: gains rejected\n";
      for (const std::string& v : report.violations)
        std::cerr << "  " << v << "\n";
      return kExitConfig;
    }
    std::cout << "config valid: " << cfg.scenarios.size() << " scenarios, "
              << "gains satisfy the stability conditions\n";
    return kExitOk;
  } catch (const tiltsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tiltsim: 5-CDoF tiltrotor simulation and verification suite"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> scenario_names;
  std::string out_dir = "out";
  std::vector<std::string> overrides;
  bool check_stability = false;
  unsigned parallel = 1;

  CLI::App* run = app.add_subcommand("run", "run one or more scenarios");
  run->add_option("--config", config_path, "config file (JSON)")->required();
  run->add_option("--scenario", scenario_names,
                  "scenario name (repeatable) or 'all'")
      ->required();
  run->add_option("--out", out_dir, "output directory");
  run->add_flag("--check-stability", check_stability,
                "also write the cascade convergence certificate");
  run->add_option("--parallel", parallel, "max concurrent scenario runs");
  run->add_option("--override", overrides, "config override key.path=value");

  CLI::App* validate =
      app.add_subcommand("validate", "check a config without simulating");
  validate->add_option("--config", config_path, "config file (JSON)")
      ->required();
  validate->add_option("--override", overrides, "config override key.path=value");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed())
    return cmd_run(config_path, scenario_names, out_dir, overrides,
                   check_stability, parallel);
  return cmd_validate(config_path, overrides);
}
