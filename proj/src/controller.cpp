#include "tiltsim/controller.hpp"

#include <algorithm>
#include <cmath>

#include "tiltsim/errors.hpp"

namespace tiltsim {

GainReport validate_gains(const GainSet& gains) {
  GainReport report;
  const auto fail = [&report](const std::string& msg) {
    report.ok = false;
    report.violations.push_back(msg);
  };

  if (!(gains.K_up > 0.0)) fail("K_up must be > 0");
  if (!(gains.K_ud > 0.0)) fail("K_ud must be > 0");
  if (!(gains.K_ui > 0.0)) fail("K_ui must be > 0");
  if (!(gains.K_up * gains.K_ud > gains.K_ui))
    fail("product condition K_up*K_ud > K_ui violated on the underactuated axis");

  for (int j = 0; j < 5; ++j) {
    const std::string axis = " on fully actuated axis " + std::to_string(j + 1);
    if (!(gains.K_fp(j) > 0.0)) fail("K_fp must be > 0" + axis);
    if (!(gains.K_fd(j) > 0.0)) fail("K_fd must be > 0" + axis);
    if (!(gains.K_fi(j) > 0.0)) fail("K_fi must be > 0" + axis);
    if (!(gains.K_fp(j) * gains.K_fd(j) > gains.K_fi(j)))
      fail("product condition K_fp*K_fd > K_fi violated" + axis);
  }
  return report;
}

TransformedState transform_state(const RigidState& state, double gimbal_margin) {
  const Mat3 Rzt = rot_z(state.phi.phi3).transpose();
  const Mat3 Q = euler_rate_jacobian(state.phi, gimbal_margin);

  TransformedState ts;
  ts.phi = state.phi.vec();
  ts.phi_dot = Q.inverse() * state.omega;
  ts.p_tilde = Rzt * state.p;
  ts.v_tilde = Rzt * state.v - ts.phi_dot.z() * hat(e3()) * ts.p_tilde;
  return ts;
}

void rotational_terms(const RigidState& state, const VehicleParams& params,
                      Vec3& h_phi, Mat3& g_phi) {
  const Mat3 Q = euler_rate_jacobian(state.phi, params.gimbal_margin);
  const Vec3 phi_dot = Q.inverse() * state.omega;
  const Mat3 Qdot = euler_rate_jacobian_dot(state.phi, phi_dot);

  const Mat3 IbQ_inv = (params.I_b * Q).inverse();
  h_phi = IbQ_inv * (-params.I_b * Qdot * phi_dot -
                     state.omega.cross(params.I_b * state.omega));
  g_phi = IbQ_inv;
}

void translational_terms(const RigidState& state, const Vec3& h_phi,
                         const Mat3& g_phi, Vec3& h_p, Mat3& g_p) {
  const Mat3 Rzt = rot_z(state.phi.phi3).transpose();
  const Mat3 Q = euler_rate_jacobian(state.phi);
  const double phi3_dot = (Q.inverse() * state.omega).z();
  const Mat3 e3_hat = hat(e3());

  // Second time derivative of rot_z(phi3)^T p; the centrifugal-like term
  // enters with a plus sign (rot_z^T of a point tracked by equal yaw rate
  // must have zero second derivative).
  h_p = -e3_hat * Rzt * (2.0 * phi3_dot * state.v + h_phi.z() * state.p) +
        phi3_dot * phi3_dot * e3_hat * e3_hat * Rzt * state.p;
  g_p = -e3_hat * Rzt * state.p * (e3().transpose() * g_phi);
}

Decomposition decompose(const TransformedState& ts, const Vec3& h_p,
                        const Mat3& g_p, const Vec3& h_phi, const Mat3& g_phi,
                        const Vec3& tau, double fz_bar,
                        const VehicleParams& params, double cond_max) {
  const double c2 = std::cos(ts.phi.y()), s2 = std::sin(ts.phi.y());

  Decomposition d;
  d.h_u = e2().dot(h_p + g_p * tau);
  d.g_u = -fz_bar / params.m;

  d.h_f << h_p.x(), h_p.z() - params.g, h_phi;

  d.g_f.setZero();
  d.g_f(0, 0) = c2 / params.m;
  d.g_f(0, 1) = s2 / params.m;
  d.g_f(1, 0) = -s2 / params.m;
  d.g_f(1, 1) = c2 / params.m;
  d.g_f.block<1, 3>(0, 2) = g_p.row(0);
  d.g_f.block<1, 3>(1, 2) = g_p.row(2);
  d.g_f.block<3, 3>(2, 2) = g_phi;

  const Eigen::JacobiSVD<Mat5> svd(d.g_f);
  const double smin = svd.singularValues().minCoeff();
  const double smax = svd.singularValues().maxCoeff();
  if (!(smin > 0.0) || smax / smin > cond_max) {
    throw DegenerateGf("decompose: g_f condition number " +
                       std::to_string(smin > 0.0 ? smax / smin : -1.0) +
                       " exceeds bound");
  }
  return d;
}

ControlOutput control_step(const RigidState& state, const Reference& ref,
                           ControllerState& cstate, const GainSet& gains,
                           const VehicleParams& params,
                           const ControllerConfig& cfg, double dt) {
  if (cfg.check_gains) {
    const GainReport report = validate_gains(gains);
    if (!report.ok)
      throw GainRejection("control_step: " + report.violations.front());
  }

  if (!cstate.primed) {
    cstate.prev_fz_bar = params.m * params.g;
  }

  const TransformedState ts = transform_state(state, cfg.gimbal_margin);

  Vec3 h_phi;
  Mat3 g_phi;
  rotational_terms(state, params, h_phi, g_phi);
  Vec3 h_p;
  Mat3 g_p;
  translational_terms(state, h_phi, g_phi, h_p, g_p);

  const double fz_bar_prev = std::max(cstate.prev_fz_bar, cfg.fz_bar_floor);
  const Decomposition dec = decompose(ts, h_p, g_p, h_phi, g_phi,
                                      cstate.prev_tau, fz_bar_prev, params,
                                      cfg.gf_cond_max);

  ControlOutput out;

  // Underactuated axis: p_tilde_2 through the roll angle.
  out.e_u = ts.p_tilde.y() - ref.q_ud;
  const double e_u_dot = ts.v_tilde.y() - ref.qd_ud;
  out.u_u = (ref.qdd_ud - dec.h_u - gains.K_up * out.e_u -
             gains.K_ud * e_u_dot - gains.K_ui * cstate.integral_u) /
            dec.g_u;

  const double roll_lim = kPi / 2.0 - cfg.roll_margin;
  out.phi1_d = std::clamp(std::atan(out.u_u), -roll_lim, roll_lim);

  // Roll-reference derivatives: finite differences through a low-pass
  // filter at each stage, clamped so cycle-to-cycle jumps in phi1_d cannot
  // inject unbounded feedforward into the roll axis.
  if (cstate.primed) {
    const double alpha =
        cfg.deriv_filter_cutoff * dt / (1.0 + cfg.deriv_filter_cutoff * dt);
    const double raw_dot = (out.phi1_d - cstate.phi1d_prev) / dt;
    out.phi1_d_dot = std::clamp(
        cstate.phi1d_dot_prev + alpha * (raw_dot - cstate.phi1d_dot_prev),
        -cfg.roll_ref_rate_limit, cfg.roll_ref_rate_limit);
    const double raw_ddot = (out.phi1_d_dot - cstate.phi1d_dot_prev) / dt;
    out.phi1_d_ddot = std::clamp(
        cstate.phi1d_ddot_prev + alpha * (raw_ddot - cstate.phi1d_ddot_prev),
        -cfg.roll_ref_accel_limit, cfg.roll_ref_accel_limit);
  }

  // Fully actuated block with the roll slot filled by the cascade.
  Vec5 q_fd = ref.q_fd, qd_fd = ref.qd_fd, qdd_fd = ref.qdd_fd;
  q_fd(2) = out.phi1_d;
  qd_fd(2) = out.phi1_d_dot;
  qdd_fd(2) = out.phi1_d_ddot;

  Vec5 q_f, qd_f;
  q_f << ts.p_tilde.x(), ts.p_tilde.z(), ts.phi;
  qd_f << ts.v_tilde.x(), ts.v_tilde.z(), ts.phi_dot;
  out.e_f = q_f - q_fd;
  const Vec5 e_f_dot = qd_f - qd_fd;

  const Vec5 rhs = qdd_fd - dec.h_f -
                   gains.K_fp.cwiseProduct(out.e_f) -
                   gains.K_fd.cwiseProduct(e_f_dot) -
                   gains.K_fi.cwiseProduct(cstate.integral_f);
  out.u_f = dec.g_f.lu().solve(rhs);

  const double fz_bar = out.u_f(1);
  out.wrench.f_x = out.u_f(0);
  out.wrench.f_z = fz_bar / std::cos(state.phi.phi1);
  out.wrench.tau = out.u_f.tail<3>();

  // Advance integrals with anti-windup, then the cycle couplings.
  const double lim = cfg.integral_limit;
  cstate.integral_u =
      std::clamp(cstate.integral_u + out.e_u * dt, -lim, lim);
  for (int j = 0; j < 5; ++j) {
    cstate.integral_f(j) =
        std::clamp(cstate.integral_f(j) + out.e_f(j) * dt, -lim, lim);
  }
  cstate.prev_tau = out.wrench.tau;
  cstate.prev_fz_bar = std::max(fz_bar, cfg.fz_bar_floor);
  cstate.phi1d_prev = out.phi1_d;
  cstate.phi1d_dot_prev = out.phi1_d_dot;
  cstate.phi1d_ddot_prev = out.phi1_d_ddot;
  cstate.primed = true;

  return out;
}

}  // namespace tiltsim
