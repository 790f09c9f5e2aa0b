#include "tiltsim/scenario.hpp"

#include <cmath>
#include <memory>

#include "tiltsim/allocation.hpp"
#include "tiltsim/errors.hpp"

namespace tiltsim {

ScenarioKind scenario_kind_from_name(const std::string& name) {
  if (name == "square_xy") return ScenarioKind::SquareXY;
  if (name == "pitch_sweep") return ScenarioKind::PitchSweep;
  if (name == "perch_push") return ScenarioKind::PerchPush;
  if (name == "hover_hold") return ScenarioKind::HoverHold;
  throw ConfigError("scenario", "unknown scenario '" + name + "'");
}

std::string scenario_kind_name(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::SquareXY: return "square_xy";
    case ScenarioKind::PitchSweep: return "pitch_sweep";
    case ScenarioKind::PerchPush: return "perch_push";
    case ScenarioKind::HoverHold: return "hover_hold";
  }
  return "unknown";
}

Vec3 PerchSetup::normal() const {
  return rot_z(site_yaw) * rot_y(site_pitch) * e3();
}

PerchSite PerchSetup::site() const {
  return {site_point, normal(), attach_radius, align_tol};
}

void Scenario::validate() const {
  if (!(duration > 0.0))
    throw ConfigError("scenario.duration", "must be > 0");
  if (!(plant_dt > 0.0))
    throw ConfigError("scenario.plant_dt", "must be > 0");
  if (!(control_dt > 0.0))
    throw ConfigError("scenario.control_dt", "must be > 0");
  const double ratio = control_dt / plant_dt;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio || ratio < 1.0)
    throw ConfigError("scenario.control_dt",
                      "must be an integer multiple of plant_dt");
  if (!initial.finite())
    throw ConfigError("scenario.initial", "must be finite");
  if (kind == ScenarioKind::PerchPush) {
    if (!perch.has_value())
      throw ConfigError("scenario.perch", "perch_push needs a perch block");
    if (!(perch->cart.static_friction >= perch->cart.kinetic_friction &&
          perch->cart.kinetic_friction >= 0.0))
      throw ConfigError("scenario.perch.cart",
                        "needs static >= kinetic >= 0 friction");
    if (!(perch->cart.mass > 0.0))
      throw ConfigError("scenario.perch.cart.mass", "must be > 0");
    if (std::abs(perch->cart.axis.norm() - 1.0) > 1e-9)
      throw ConfigError("scenario.perch.cart.axis", "must be unit length");
    if (std::abs(perch->normal().norm() - 1.0) > 1e-9)
      throw ConfigError("scenario.perch", "surface normal must be unit length");
  }
}

namespace {

std::unique_ptr<ReferenceGenerator> make_generator(const Scenario& sc) {
  switch (sc.kind) {
    case ScenarioKind::SquareXY:
      return std::make_unique<SquareXYReference>(sc.hold_position,
                                                 sc.square_side,
                                                 sc.square_period);
    case ScenarioKind::PitchSweep:
      return std::make_unique<PitchProfileReference>(sc.hold_position,
                                                     sc.pitch_amplitude,
                                                     sc.pitch_period);
    case ScenarioKind::HoverHold:
      return std::make_unique<HoverHoldReference>(sc.hold_position,
                                                  sc.hold_pitch, sc.hold_yaw);
    case ScenarioKind::PerchPush: {
      PlannerPose start{sc.initial.p, sc.initial.phi.phi2, sc.initial.phi.phi3};
      PlannerPose perch{sc.perch->site_point, sc.perch->site_pitch,
                        sc.perch->site_yaw};
      return std::make_unique<SequentialPlanner>(start, perch,
                                                 sc.perch->phase_duration);
    }
  }
  throw ConfigError("scenario", "unreachable scenario kind");
}

LogRow make_row(double t, const RigidState& state, const RefPoint& w,
                double phi1_d, double phi1_d_dot, const VirtualWrench& wrench,
                const ActuatorCommand& cmd, bool saturated, bool attached,
                const VehicleParams& params) {
  const TransformedState ts = transform_state(state, params.gimbal_margin);
  const Reference ref = world_to_reference(w);

  LogRow row;
  row.t = t;
  row.p = state.p;
  row.v = state.v;
  row.phi = state.phi.vec();
  row.omega = state.omega;
  row.eta = state.eta;
  row.p_tilde = ts.p_tilde;

  row.ref_p = w.p;
  row.ref_v = w.v;
  row.ref_phi = Vec3(phi1_d, w.phi.y(), w.phi.z());
  const Vec3 ref_phi_dot(phi1_d_dot, w.phi_dot.y(), w.phi_dot.z());
  row.ref_omega =
      euler_rate_jacobian(EulerZYX::from_vec(row.ref_phi), 1e-6) * ref_phi_dot;
  row.ref_eta = cmd.eta_d;
  row.ref_p_tilde = rot_z(w.phi.z()).transpose() * w.p;

  row.e_u = ts.p_tilde.y() - ref.q_ud;
  Vec5 q_f;
  q_f << ts.p_tilde.x(), ts.p_tilde.z(), ts.phi;
  Vec5 q_fd = ref.q_fd;
  q_fd(2) = phi1_d;
  row.e_f = q_f - q_fd;

  row.f_x = wrench.f_x;
  row.f_z = wrench.f_z;
  row.tau = wrench.tau;
  row.eta_d = cmd.eta_d;
  row.F = cmd.F;
  row.sat_flag = saturated ? 1 : 0;
  row.attach_flag = attached ? 1 : 0;
  return row;
}

}  // namespace

SimulationLog run_scenario(const Scenario& scenario, const GainSet& gains,
                           const VehicleParams& params,
                           const ControllerConfig& ctrl_cfg) {
  scenario.validate();
  params.validate();

  ControllerConfig cfg = ctrl_cfg;
  cfg.check_gains = scenario.enforce_gain_check;
  if (scenario.enforce_gain_check) {
    const GainReport report = validate_gains(gains);
    if (!report.ok)
      throw GainRejection("run_scenario: " + report.violations.front());
  }

  SimulationLog log;
  log.scenario = scenario.name;

  const auto gen = make_generator(scenario);
  std::optional<PerchSite> site;
  CartModel cart;
  if (scenario.perch) {
    site = scenario.perch->site();
    cart = scenario.perch->cart;
  }

  const int substeps =
      static_cast<int>(std::llround(scenario.control_dt / scenario.plant_dt));
  const int n_cycles =
      static_cast<int>(std::llround(scenario.duration / scenario.control_dt));

  RigidState state = scenario.initial;
  ControllerState cstate;
  PerchState ps;
  ActuatorCommand cmd;
  VirtualWrench applied;
  const double euler_bound = kPi / 2.0 - params.gimbal_margin;

  try {
    for (int k = 0; k <= n_cycles; ++k) {
      const double t = k * scenario.control_dt;

      if (!state.finite())
        throw SimulationAbort(t, "non-finite state");
      if (std::abs(state.phi.phi1) >= euler_bound ||
          std::abs(state.phi.phi2) >= euler_bound)
        throw SimulationAbort(t, "Euler bound violation (|phi1| = " +
                                     std::to_string(std::abs(state.phi.phi1)) +
                                     ", |phi2| = " +
                                     std::to_string(std::abs(state.phi.phi2)) +
                                     ")");

      const RefPoint w = gen->eval(t);
      bool saturated = false;
      double phi1_d, phi1_d_dot;

      if (ps.mode == PerchMode::FreeFlight) {
        const Reference ref = world_to_reference(w);
        const ControlOutput out =
            control_step(state, ref, cstate, gains, params, cfg,
                         scenario.control_dt);
        const AllocationResult alloc = allocate(out.wrench, params);
        const auto [clamped, sat] = saturate(alloc.cmd, params);
        cmd = clamped;
        saturated = sat.any();
        applied = out.wrench;
        phi1_d = out.phi1_d;
        phi1_d_dot = out.phi1_d_dot;
      } else {
        // Perched: attitude frozen, open-loop surface-normal thrust.
        const double total =
            (t < ps.attach_time + scenario.perch->push_delay)
                ? scenario.perch->hold_thrust
                : scenario.perch->push_thrust;
        ActuatorCommand raw;
        raw.eta_d = surface_normal_tilt(state, *site);
        raw.F = Vec4::Constant(total / 4.0);
        const auto [clamped, sat] = saturate(raw, params);
        cmd = clamped;
        saturated = sat.any();
        applied = VirtualWrench::from_vec(mixer_matrix(state.eta, params) * cmd.F);
        phi1_d = state.phi.phi1;
        phi1_d_dot = 0.0;
      }

      log.rows.push_back(make_row(t, state, w, phi1_d, phi1_d_dot, applied,
                                  cmd, saturated,
                                  ps.mode == PerchMode::Attached, params));
      if (saturated) ++log.saturation_count;
      if (k == n_cycles) break;

      for (int i = 0; i < substeps; ++i) {
        const double ts = t + i * scenario.plant_dt;
        if (site) {
          state = perch_and_push_step(state, cmd, *site, cart, ps, params,
                                      scenario.plant_dt, ts);
        } else {
          state = plant_step(state, cmd, params, scenario.plant_dt);
        }
      }
    }
  } catch (const SimulationAbort& e) {
    log.aborted = true;
    log.abort_reason = e.what();
  } catch (const GimbalLock& e) {
    log.aborted = true;
    log.abort_reason = e.what();
  } catch (const TiltSingularity& e) {
    log.aborted = true;
    log.abort_reason = e.what();
  } catch (const DegenerateGf& e) {
    log.aborted = true;
    log.abort_reason = e.what();
  }

  log.attach_time = ps.attach_time;
  return log;
}

}  // namespace tiltsim
