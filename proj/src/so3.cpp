#include "tiltsim/so3.hpp"

#include <algorithm>
#include <cmath>

#include "tiltsim/errors.hpp"

namespace tiltsim {

Mat3 rot_x(double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  Mat3 R;
  R << 1, 0, 0,
       0, c, -s,
       0, s, c;
  return R;
}

Mat3 rot_y(double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  Mat3 R;
  R << c, 0, s,
       0, 1, 0,
       -s, 0, c;
  return R;
}

Mat3 rot_z(double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  Mat3 R;
  R << c, -s, 0,
       s, c, 0,
       0, 0, 1;
  return R;
}

Mat3 hat(const Vec3& v) {
  Mat3 M;
  M << 0, -v.z(), v.y(),
       v.z(), 0, -v.x(),
       -v.y(), v.x(), 0;
  return M;
}

Mat3 euler_to_rotmat(const EulerZYX& phi) {
  return rot_z(phi.phi3) * rot_y(phi.phi2) * rot_x(phi.phi1);
}

EulerZYX rotmat_to_euler(const Mat3& R) {
  EulerZYX phi;
  phi.phi2 = std::asin(std::clamp(-R(2, 0), -1.0, 1.0));
  if (std::abs(std::abs(R(2, 0)) - 1.0) < 1e-12) {
    // pitch at +-pi/2: only phi1 -+ phi3 is observable, pick phi1 = 0
    phi.phi1 = 0.0;
    phi.phi3 = std::atan2(-R(0, 1), R(1, 1));
  } else {
    phi.phi1 = std::atan2(R(2, 1), R(2, 2));
    phi.phi3 = std::atan2(R(1, 0), R(0, 0));
  }
  return phi;
}

Mat3 euler_rate_jacobian(const EulerZYX& phi, double margin) {
  if (std::abs(phi.phi2) >= kPi / 2.0 - margin) {
    throw GimbalLock("euler_rate_jacobian: |pitch| too close to pi/2 (phi2 = " +
                     std::to_string(phi.phi2) + ")");
  }
  const double c1 = std::cos(phi.phi1), s1 = std::sin(phi.phi1);
  const double c2 = std::cos(phi.phi2), s2 = std::sin(phi.phi2);
  Mat3 Q;
  Q << 1, 0, -s2,
       0, c1, s1 * c2,
       0, -s1, c1 * c2;
  return Q;
}

Mat3 euler_rate_jacobian_dot(const EulerZYX& phi, const Vec3& phi_dot) {
  const double c1 = std::cos(phi.phi1), s1 = std::sin(phi.phi1);
  const double c2 = std::cos(phi.phi2), s2 = std::sin(phi.phi2);
  const double d1 = phi_dot.x(), d2 = phi_dot.y();
  Mat3 Qd;
  Qd << 0, 0, -c2 * d2,
        0, -s1 * d1, c1 * d1 * c2 - s1 * s2 * d2,
        0, -c1 * d1, -s1 * d1 * c2 - c1 * s2 * d2;
  return Qd;
}

double wrap_angle(double a) {
  a = std::fmod(a + kPi, 2.0 * kPi);
  if (a <= 0.0) a += 2.0 * kPi;
  return a - kPi;
}

}  // namespace tiltsim
