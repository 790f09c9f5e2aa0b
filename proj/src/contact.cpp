#include "tiltsim/contact.hpp"

#include <algorithm>
#include <cmath>

namespace tiltsim {

bool attach_ready(const RigidState& state, const PerchSite& site) {
  if ((state.p - site.point).norm() > site.attach_radius) return false;
  const Vec3 body_z = euler_to_rotmat(state.phi) * e3();
  const double cos_angle =
      std::clamp(body_z.dot(site.normal), -1.0, 1.0);
  return std::acos(cos_angle) <= site.align_tol;
}

double surface_normal_tilt(const RigidState& state, const PerchSite& site) {
  const Vec3 n_body = euler_to_rotmat(state.phi).transpose() * site.normal;
  return std::atan2(n_body.x(), n_body.z());
}

RigidState perch_and_push_step(const RigidState& state,
                               const ActuatorCommand& cmd,
                               const PerchSite& site, const CartModel& cart,
                               PerchState& ps, const VehicleParams& params,
                               double dt, double t) {
  if (ps.mode == PerchMode::FreeFlight) {
    if (attach_ready(state, site)) {
      ps.mode = PerchMode::Attached;
      ps.attach_time = t;
      ps.weld = state;
      ps.weld.v.setZero();
      ps.weld.omega.setZero();
      RigidState attached = ps.weld;
      return attached;
    }
    return plant_step(state, cmd, params, dt);
  }

  // Attached: attitude welded, tilt servo still tracks its command.
  RigidState next = ps.weld;
  next.eta = cmd.eta_d + (state.eta - cmd.eta_d) * std::exp(-dt / params.servo_tau);

  const double thrust_total = cmd.F.sum();
  const Vec3 thrust_dir =
      euler_to_rotmat(next.phi) * Vec3(std::sin(next.eta), 0.0, std::cos(next.eta));
  const double f_along = thrust_total * thrust_dir.dot(cart.axis);

  double accel = 0.0;
  if (ps.cart_vel == 0.0) {
    if (std::abs(f_along) > cart.static_friction) {
      const double sgn = f_along > 0.0 ? 1.0 : -1.0;
      accel = (f_along - sgn * cart.kinetic_friction) /
              (params.m + cart.mass);
    }
  } else {
    const double sgn = ps.cart_vel > 0.0 ? 1.0 : -1.0;
    accel = (f_along - sgn * cart.kinetic_friction) / (params.m + cart.mass);
  }

  const double v0 = ps.cart_vel;
  double v1 = v0 + accel * dt;
  if (v0 != 0.0 && v0 * v1 < 0.0) v1 = 0.0;  // friction stops, never reverses
  ps.cart_disp += 0.5 * (v0 + v1) * dt;
  ps.cart_vel = v1;

  next.p = ps.weld.p + ps.cart_disp * cart.axis;
  next.v = ps.cart_vel * cart.axis;
  return next;
}

}  // namespace tiltsim
