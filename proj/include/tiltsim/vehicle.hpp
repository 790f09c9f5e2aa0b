#pragma once

#include <utility>

#include "tiltsim/so3.hpp"
#include "tiltsim/types.hpp"

namespace tiltsim {

struct VehicleParams {
  double m = 2.1;                                   // mass [kg]
  Mat3 I_b = Vec3(0.021, 0.027, 0.045).asDiagonal();  // body inertia [kg m^2]
  double L_h = 0.1285;   // half rotor-to-rotor distance, body y [m]
  double L_v = 0.098;    // half rotor-to-rotor distance, body x [m]
  double k_f = 0.016;    // thrust-to-torque ratio [m]
  double g = 9.81;       // gravity [m/s^2]
  double F_max = 14.0;   // per-rotor thrust ceiling [N]
  double servo_tau = 0.02;   // tilt servo first-order time constant [s]
  double f_z_min = 0.5;      // allocation floor on body-z force [N]
  double tilt_margin = 0.02;    // clamp band below |eta| = pi/2 [rad]
  double gimbal_margin = kGimbalMargin;

  // Throws ConfigError naming the offending field.
  void validate() const;
};

// Plant state. Angular velocity is body-frame; eta is the actual tilt angle.
struct RigidState {
  Vec3 p = Vec3::Zero();      // position, world [m]
  Vec3 v = Vec3::Zero();      // velocity, world [m/s]
  EulerZYX phi;               // ZYX Euler attitude [rad]
  Vec3 omega = Vec3::Zero();  // body angular velocity [rad/s]
  double eta = 0.0;           // tilt angle [rad]

  bool finite() const;
};

struct ActuatorCommand {
  double eta_d = 0.0;       // desired tilt [rad]
  Vec4 F = Vec4::Zero();    // rotor thrusts [N]
};

// Body-frame force pair plus body torque.
struct VirtualWrench {
  double f_x = 0.0;
  double f_z = 0.0;
  Vec3 tau = Vec3::Zero();

  Vec5 vec() const {
    Vec5 u;
    u << f_x, f_z, tau.x(), tau.y(), tau.z();
    return u;
  }
  static VirtualWrench from_vec(const Vec5& u) {
    return {u(0), u(1), Vec3(u(2), u(3), u(4))};
  }
};

// 5x4 map from rotor thrusts to the virtual wrench at tilt angle eta.
// Rows: f_x, f_z, tau1, tau2, tau3.
Mat5x4 mixer_matrix(double eta, const VehicleParams& params);

struct StateDerivative {
  Vec3 p_dot, v_dot, phi_dot, omega_dot;
};

// Rigid-body derivative under a virtual wrench:
//   p_dot = v
//   m v_dot = R (f_x e1 + f_z e3) - m g e3
//   phi_dot = Q^-1 omega
//   I_b omega_dot = -omega x I_b omega + tau
// Throws GimbalLock from the Q inversion.
StateDerivative dynamics_derivative(const RigidState& state,
                                    const VirtualWrench& wrench,
                                    const VehicleParams& params);

// One RK4 step of the plant under a zero-order-held actuator command.
// The tilt lag eta_dot = (eta_d - eta)/servo_tau is integrated exactly
// within the step (it is linear, and may be much stiffer than dt), and the
// rotor wrench C(eta(t)) F is evaluated at the exact eta of each stage.
RigidState plant_step(const RigidState& state, const ActuatorCommand& cmd,
                      const VehicleParams& params, double dt);

struct SaturationFlag {
  bool thrust = false;
  bool tilt = false;
  bool any() const { return thrust || tilt; }
};

// Clamps thrusts into [0, F_max] and the tilt command into
// (-pi/2 + tilt_margin, pi/2 - tilt_margin).
std::pair<ActuatorCommand, SaturationFlag> saturate(const ActuatorCommand& cmd,
                                                    const VehicleParams& params);

}  // namespace tiltsim
