#pragma once

#include <optional>
#include <string>

#include "tiltsim/contact.hpp"
#include "tiltsim/controller.hpp"
#include "tiltsim/log.hpp"
#include "tiltsim/reference.hpp"

namespace tiltsim {

enum class ScenarioKind { SquareXY, PitchSweep, PerchPush, HoverHold };

ScenarioKind scenario_kind_from_name(const std::string& name);
std::string scenario_kind_name(ScenarioKind kind);

struct PerchSetup {
  Vec3 site_point = Vec3(1.2, 0.6, 1.4);
  double site_pitch = deg2rad(45.0);
  double site_yaw = deg2rad(30.0);
  double attach_radius = 0.05;
  double align_tol = 0.10;
  CartModel cart;
  double hold_thrust = 6.0;    // total thrust against the surface before the step [N]
  double push_thrust = 20.6;   // total thrust after the step [N]
  double push_delay = 1.5;     // step time after attach [s]
  double phase_duration = 2.5; // planner per-phase time [s]

  Vec3 normal() const;
  PerchSite site() const;
};

struct Scenario {
  std::string name = "hover_hold";
  ScenarioKind kind = ScenarioKind::HoverHold;
  double duration = 10.0;
  double plant_dt = 2e-4;
  double control_dt = 2e-3;
  RigidState initial;

  // square_xy
  double square_side = 1.0;
  double square_period = 20.0;

  // pitch_sweep
  double pitch_amplitude = deg2rad(60.0);
  double pitch_period = 16.0;

  // hover_hold / pitch_sweep hold position and target attitude
  Vec3 hold_position = Vec3(0.0, 0.0, 1.0);
  double hold_pitch = 0.0;
  double hold_yaw = 0.0;

  std::optional<PerchSetup> perch;

  // Off only for deliberate stability-violation studies.
  bool enforce_gain_check = true;

  void validate() const;  // throws ConfigError
};

// Runs a scenario end to end: fixed-step RK4 plant at plant_dt, cascade
// controller at control_dt (an integer multiple), allocation and saturation
// at the plant boundary, perch/cart contact when configured. Returns the
// per-cycle log; on NaN or Euler-bound violation the log is returned
// truncated with aborted set.
SimulationLog run_scenario(const Scenario& scenario, const GainSet& gains,
                           const VehicleParams& params,
                           const ControllerConfig& ctrl_cfg);

}  // namespace tiltsim
