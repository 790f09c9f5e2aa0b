#pragma once

#include <string>
#include <vector>

#include "tiltsim/vehicle.hpp"

namespace tiltsim {

// Diagonal gain matrices. The underactuated axis (p_tilde_2 via roll) is
// scalar; the fully actuated block [p_tilde_1; p_tilde_3; phi] is 5x5.
// Default poles: (-1.5, -2, -2.5) on the underactuated axis, the two
// position axes and yaw; (-2, -2.5, -3) on roll and pitch. Yaw stays on the
// softer set because yaw torque is the most thrust-expensive channel (it
// goes through the rotor drag ratio k_f), and fast roll tracking is what
// makes the cascade coupling decay.
struct GainSet {
  double K_up = 11.75, K_ud = 6.0, K_ui = 7.5;
  Vec5 K_fp = (Vec5() << 11.75, 11.75, 18.5, 18.5, 11.75).finished();
  Vec5 K_fd = (Vec5() << 6.0, 6.0, 7.5, 7.5, 6.0).finished();
  Vec5 K_fi = (Vec5() << 7.5, 7.5, 15.0, 15.0, 7.5).finished();
};

struct GainReport {
  bool ok = true;
  std::vector<std::string> violations;
};

// Accepts iff every gain is > 0 and the strict product conditions
// K_up*K_ud > K_ui and (K_fp*K_fd)_jj > (K_fi)_jj hold on every axis.
GainReport validate_gains(const GainSet& gains);

// State in the yaw-derotated frame: p_tilde = rot_z(phi3)^T p.
struct TransformedState {
  Vec3 p_tilde;
  Vec3 v_tilde;   // d/dt p_tilde = Rz^T v - phi3_dot * hat(e3) Rz^T p
  Vec3 phi;
  Vec3 phi_dot;   // Q^-1 omega
};

TransformedState transform_state(const RigidState& state,
                                 double gimbal_margin = kGimbalMargin);

// Euler-angle rotational dynamics, phi_ddot = h_phi + g_phi * tau.
void rotational_terms(const RigidState& state, const VehicleParams& params,
                      Vec3& h_phi, Mat3& g_phi);

// Yaw-derotated translational dynamics,
//   p_tilde_ddot = (1/m) Ry Rx (f_x e1 + f_z e3) - g e3 + h_p + g_p tau.
void translational_terms(const RigidState& state, const Vec3& h_phi,
                         const Mat3& g_phi, Vec3& h_p, Mat3& g_p);

// Underactuated / fully actuated split:
//   q_u_ddot = h_u + g_u u_u - (1/m)(tan phi1 - tan phi1_d) fz_bar
//   q_f_ddot = h_f + g_f u_f,   u_f = [f_x; fz_bar; tau]
// with fz_bar = cos(phi1) f_z. h_f carries the -g of the p_tilde_3 row.
struct Decomposition {
  double h_u = 0.0;
  double g_u = 0.0;
  Vec5 h_f = Vec5::Zero();
  Mat5 g_f = Mat5::Zero();
};

// tau and fz_bar are the torque and body-z force the terms are evaluated at
// (the applied wrench when checking dynamics, the previous cycle's outputs
// inside the controller). Throws DegenerateGf above the condition bound.
Decomposition decompose(const TransformedState& ts, const Vec3& h_p,
                        const Mat3& g_p, const Vec3& h_phi, const Mat3& g_phi,
                        const Vec3& tau, double fz_bar,
                        const VehicleParams& params,
                        double cond_max = 1e6);

// Desired trajectory in controller coordinates.
struct Reference {
  double q_ud = 0.0, qd_ud = 0.0, qdd_ud = 0.0;   // p_tilde_2 chain
  Vec5 q_fd = Vec5::Zero();    // [p_tilde_1; p_tilde_3; phi1; phi2; phi3]
  Vec5 qd_fd = Vec5::Zero();   // roll slot is overwritten by the cascade
  Vec5 qdd_fd = Vec5::Zero();
};

struct ControllerState {
  double integral_u = 0.0;
  Vec5 integral_f = Vec5::Zero();
  Vec3 prev_tau = Vec3::Zero();   // tau of the previous cycle (h_u coupling)
  double prev_fz_bar = 0.0;       // fz_bar of the previous cycle (g_u); set
                                  // to m*g on the first step
  double phi1d_prev = 0.0;        // roll-reference differentiation states
  double phi1d_dot_prev = 0.0;
  double phi1d_ddot_prev = 0.0;
  bool primed = false;            // false until the first step has run
};

struct ControllerConfig {
  double deriv_filter_cutoff = 20.0;  // roll-reference derivative LPF [rad/s]
  double roll_ref_rate_limit = 1.0;   // cap on the phi1_d rate feedforward [rad/s]
  double roll_ref_accel_limit = 5.0; // cap on the phi1_d accel feedforward [rad/s^2]
  double integral_limit = 2.0;        // anti-windup clamp per axis [SI]
  double gf_cond_max = 1e6;
  double roll_margin = 0.02;          // clamp band on phi1_d below pi/2 [rad]
  double gimbal_margin = kGimbalMargin;
  double fz_bar_floor = 0.5;          // keeps g_u away from zero [N]
  bool check_gains = true;            // reject stability-violating gains
};

struct ControlOutput {
  VirtualWrench wrench;
  double phi1_d = 0.0;
  double phi1_d_dot = 0.0;
  double phi1_d_ddot = 0.0;
  double e_u = 0.0;
  Vec5 e_f = Vec5::Zero();
  double u_u = 0.0;
  Vec5 u_f = Vec5::Zero();
};

// One cascade control cycle. Underactuated law first: u_u = tan(phi1_d)
// from the p_tilde_2 error, with h_u evaluated at the previous cycle's tau
// and g_u at the previous cycle's fz_bar. The fully actuated law then tracks
// [p_tilde_1; p_tilde_3; phi1_d; phi2_d; phi3_d], and the wrench recovers
// f_z = fz_bar / cos(phi1). cstate advances in place (integrals with
// anti-windup, prev_tau/prev_fz_bar, roll-reference filter states).
ControlOutput control_step(const RigidState& state, const Reference& ref,
                           ControllerState& cstate, const GainSet& gains,
                           const VehicleParams& params,
                           const ControllerConfig& cfg, double dt);

}  // namespace tiltsim
