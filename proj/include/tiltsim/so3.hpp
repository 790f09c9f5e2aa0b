#pragma once

#include "tiltsim/types.hpp"

namespace tiltsim {

// Default guard band around |pitch| = pi/2 for Euler-rate Jacobian inversion.
inline constexpr double kGimbalMargin = 0.02;

// ZYX Euler angles: R = rot_z(phi3) * rot_y(phi2) * rot_x(phi1).
struct EulerZYX {
  double phi1 = 0.0;  // roll  [rad]
  double phi2 = 0.0;  // pitch [rad]
  double phi3 = 0.0;  // yaw   [rad]

  Vec3 vec() const { return {phi1, phi2, phi3}; }
  static EulerZYX from_vec(const Vec3& v) { return {v.x(), v.y(), v.z()}; }
};

Mat3 rot_x(double theta);
Mat3 rot_y(double theta);
Mat3 rot_z(double theta);

// hat(v) * w == v.cross(w)
Mat3 hat(const Vec3& v);

Mat3 euler_to_rotmat(const EulerZYX& phi);

// Inverse of euler_to_rotmat for logging; pitch branch resolved by clamping
// the asin argument, ties at |phi2| = pi/2 broken toward phi1 = 0.
EulerZYX rotmat_to_euler(const Mat3& R);

// Body-rate Jacobian Q with omega = Q * phi_dot, det Q = cos(phi2).
// Throws GimbalLock when |phi2| >= pi/2 - margin.
Mat3 euler_rate_jacobian(const EulerZYX& phi, double margin = kGimbalMargin);

// Time derivative of Q along (phi, phi_dot).
Mat3 euler_rate_jacobian_dot(const EulerZYX& phi, const Vec3& phi_dot);

// Wrap an angle to (-pi, pi].
double wrap_angle(double a);

}  // namespace tiltsim
