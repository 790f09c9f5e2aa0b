#pragma once

#include <stdexcept>
#include <string>

namespace tiltsim {

// Euler-rate Jacobian inversion requested too close to |pitch| = pi/2.
struct GimbalLock : std::runtime_error {
  explicit GimbalLock(const std::string& msg) : std::runtime_error(msg) {}
};

// Tilt command at or beyond +-pi/2, where the allocation matrix is undefined.
struct TiltSingularity : std::runtime_error {
  explicit TiltSingularity(const std::string& msg) : std::runtime_error(msg) {}
};

// Fully actuated input matrix too ill-conditioned to invert.
struct DegenerateGf : std::runtime_error {
  explicit DegenerateGf(const std::string& msg) : std::runtime_error(msg) {}
};

// Gains fail the positivity / product stability conditions.
struct GainRejection : std::runtime_error {
  explicit GainRejection(const std::string& msg) : std::runtime_error(msg) {}
};

// Planner asked to reach a perch pitch at or beyond the controllable range.
struct InfeasiblePitch : std::runtime_error {
  explicit InfeasiblePitch(const std::string& msg) : std::runtime_error(msg) {}
};

// Log unsuitable for convergence certification (e.g. saturation occurred).
struct InvalidLog : std::runtime_error {
  explicit InvalidLog(const std::string& msg) : std::runtime_error(msg) {}
};

// Config file failed schema validation; carries the offending field path.
struct ConfigError : std::runtime_error {
  ConfigError(std::string path, const std::string& msg)
      : std::runtime_error(path.empty() ? msg : path + ": " + msg),
        field_path(std::move(path)) {}
  std::string field_path;
};

// Simulation left its valid domain (NaN state or Euler bound violation).
struct SimulationAbort : std::runtime_error {
  SimulationAbort(double time, const std::string& msg)
      : std::runtime_error(msg), t(time) {}
  double t;
};

}  // namespace tiltsim
