#include "tiltsim/vehicle.hpp"

#include <algorithm>
#include <cmath>

#include "tiltsim/errors.hpp"
#include "tiltsim/integrator.hpp"

namespace tiltsim {

void VehicleParams::validate() const {
  if (!(m > 0.0)) throw ConfigError("vehicle.m", "must be > 0");
  if (!I_b.isApprox(I_b.transpose(), 1e-12))
    throw ConfigError("vehicle.I_b", "must be symmetric");
  Eigen::SelfAdjointEigenSolver<Mat3> es(I_b);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw ConfigError("vehicle.I_b", "must be positive definite");
  if (!(L_h > 0.0)) throw ConfigError("vehicle.L_h", "must be > 0");
  if (!(L_v > 0.0)) throw ConfigError("vehicle.L_v", "must be > 0");
  if (!(k_f > 0.0)) throw ConfigError("vehicle.k_f", "must be > 0");
  if (!(g > 0.0)) throw ConfigError("vehicle.g", "must be > 0");
  if (!(F_max > 0.0)) throw ConfigError("vehicle.F_max", "must be > 0");
  if (!(servo_tau > 0.0)) throw ConfigError("vehicle.servo_tau", "must be > 0");
  if (!(f_z_min > 0.0)) throw ConfigError("vehicle.f_z_min", "must be > 0");
  if (!(tilt_margin > 0.0 && tilt_margin < 0.5))
    throw ConfigError("vehicle.tilt_margin", "must be in (0, 0.5)");
  if (!(gimbal_margin > 0.0 && gimbal_margin < 0.5))
    throw ConfigError("vehicle.gimbal_margin", "must be in (0, 0.5)");
}

bool RigidState::finite() const {
  return p.allFinite() && v.allFinite() && omega.allFinite() &&
         std::isfinite(phi.phi1) && std::isfinite(phi.phi2) &&
         std::isfinite(phi.phi3) && std::isfinite(eta);
}

Mat5x4 mixer_matrix(double eta, const VehicleParams& params) {
  const double c = std::cos(eta), s = std::sin(eta);
  const double Lh = params.L_h, Lv = params.L_v, kf = params.k_f;
  Mat5x4 C;
  C << s, s, s, s,
       c, c, c, c,
       -Lh * c - kf * s, Lh * c + kf * s, Lh * c - kf * s, -Lh * c + kf * s,
       -Lv * c, -Lv * c, Lv * c, Lv * c,
       Lh * s - kf * c, -Lh * s + kf * c, -Lh * s - kf * c, Lh * s + kf * c;
  return C;
}

StateDerivative dynamics_derivative(const RigidState& state,
                                    const VirtualWrench& wrench,
                                    const VehicleParams& params) {
  const Mat3 R = euler_to_rotmat(state.phi);
  const Mat3 Q = euler_rate_jacobian(state.phi, params.gimbal_margin);

  StateDerivative d;
  d.p_dot = state.v;
  d.v_dot = R * (wrench.f_x * e1() + wrench.f_z * e3()) / params.m -
            params.g * e3();
  d.phi_dot = Q.inverse() * state.omega;
  d.omega_dot = params.I_b.inverse() *
                (-state.omega.cross(params.I_b * state.omega) + wrench.tau);
  return d;
}

namespace {

using Vec12 = Eigen::Matrix<double, 12, 1>;

Vec12 pack(const RigidState& s) {
  Vec12 y;
  y << s.p, s.v, s.phi.vec(), s.omega;
  return y;
}

RigidState unpack(const Vec12& y, double eta) {
  RigidState s;
  s.p = y.segment<3>(0);
  s.v = y.segment<3>(3);
  s.phi = EulerZYX::from_vec(y.segment<3>(6));
  s.omega = y.segment<3>(9);
  s.eta = eta;
  return s;
}

}  // namespace

RigidState plant_step(const RigidState& state, const ActuatorCommand& cmd,
                      const VehicleParams& params, double dt) {
  // Tilt lag solved exactly: eta(s) = eta_d + (eta0 - eta_d) exp(-s/tau).
  const auto eta_at = [&](double s) {
    return cmd.eta_d + (state.eta - cmd.eta_d) * std::exp(-s / params.servo_tau);
  };

  const auto deriv = [&](double s, const Vec12& y) -> Vec12 {
    RigidState ys = unpack(y, eta_at(s));
    const Vec5 u = mixer_matrix(ys.eta, params) * cmd.F;
    const StateDerivative d =
        dynamics_derivative(ys, VirtualWrench::from_vec(u), params);
    Vec12 dy;
    dy << d.p_dot, d.v_dot, d.phi_dot, d.omega_dot;
    return dy;
  };

  const Vec12 y1 = rk4_step(pack(state), deriv, 0.0, dt);
  return unpack(y1, eta_at(dt));
}

std::pair<ActuatorCommand, SaturationFlag> saturate(const ActuatorCommand& cmd,
                                                    const VehicleParams& params) {
  ActuatorCommand out = cmd;
  SaturationFlag flag;

  for (int i = 0; i < 4; ++i) {
    const double clamped = std::clamp(cmd.F(i), 0.0, params.F_max);
    if (clamped != cmd.F(i)) flag.thrust = true;
    out.F(i) = clamped;
  }

  const double eta_lim = kPi / 2.0 - params.tilt_margin;
  const double eta_clamped = std::clamp(cmd.eta_d, -eta_lim, eta_lim);
  if (eta_clamped != cmd.eta_d) flag.tilt = true;
  out.eta_d = eta_clamped;

  return {out, flag};
}

}  // namespace tiltsim
