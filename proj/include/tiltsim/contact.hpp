#pragma once

#include "tiltsim/vehicle.hpp"

namespace tiltsim {

struct PerchSite {
  Vec3 point = Vec3::Zero();      // target center-of-mass position at attach
  Vec3 normal = Vec3::UnitZ();    // unit surface normal, away from surface
  double attach_radius = 0.05;    // [m]
  double align_tol = 0.10;        // body-z to normal angle tolerance [rad]
};

// 1-D cart on a horizontal guide; friction given directly as forces.
struct CartModel {
  double mass = 5.0;              // [kg]
  double static_friction = 6.0;   // breakaway force [N]
  double kinetic_friction = 4.0;  // force while moving [N]
  Vec3 axis = Vec3::UnitX();      // unit travel direction
};

enum class PerchMode { FreeFlight, Attached };

struct PerchState {
  PerchMode mode = PerchMode::FreeFlight;
  double cart_disp = 0.0;
  double cart_vel = 0.0;
  double attach_time = -1.0;
  RigidState weld;   // vehicle state frozen at the attach instant
};

// True when the vehicle is inside the attach radius with its body z-axis
// within the alignment tolerance of the surface normal.
bool attach_ready(const RigidState& state, const PerchSite& site);

// Tilt angle that points the total thrust along the surface normal for the
// (frozen) attitude of `state`.
double surface_normal_tilt(const RigidState& state, const PerchSite& site);

// One dt of the perch/push scenario dynamics.
//  - free flight: regular plant step; attach latches when attach_ready,
//    welding the vehicle rigidly to the cart (velocities drop to the cart's).
//  - attached: tilt follows its servo lag, the cart accelerates along its
//    travel axis once the axis component of the total thrust exceeds static
//    friction, and the vehicle translates with the cart.
RigidState perch_and_push_step(const RigidState& state,
                               const ActuatorCommand& cmd,
                               const PerchSite& site, const CartModel& cart,
                               PerchState& ps, const VehicleParams& params,
                               double dt, double t);

}  // namespace tiltsim
