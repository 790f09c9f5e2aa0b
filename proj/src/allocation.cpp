#include "tiltsim/allocation.hpp"

#include <cmath>

#include "tiltsim/errors.hpp"

namespace tiltsim {

Mat4 d_matrix(double eta_d, const VehicleParams& params) {
  if (std::abs(eta_d) >= kPi / 2.0 - params.tilt_margin) {
    throw TiltSingularity("d_matrix: |eta_d| too close to pi/2 (eta_d = " +
                          std::to_string(eta_d) + ")");
  }
  const double c = std::cos(eta_d), s = std::sin(eta_d);
  const double ik = 1.0 / params.k_f;
  const double ih = 1.0 / params.L_h;
  const double iv = 1.0 / (params.L_v * c);
  Mat4 D;
  D << 1, -ik * s - ih * c, -iv, -ik * c + ih * s,
       1, ik * s + ih * c, -iv, ik * c - ih * s,
       1, -ik * s + ih * c, iv, -ik * c - ih * s,
       1, ik * s - ih * c, iv, ik * c + ih * s;
  return 0.25 * D;
}

AllocationResult allocate(const VirtualWrench& wrench,
                          const VehicleParams& params) {
  if (wrench.f_z <= params.f_z_min) {
    throw TiltSingularity("allocate: f_z = " + std::to_string(wrench.f_z) +
                          " below floor " + std::to_string(params.f_z_min));
  }
  const double eta_d = std::atan2(wrench.f_x, wrench.f_z);
  const double f_norm = std::hypot(wrench.f_x, wrench.f_z);

  Vec4 rhs;
  rhs << f_norm, wrench.tau.x(), wrench.tau.y(), wrench.tau.z();

  AllocationResult res;
  res.cmd.eta_d = eta_d;
  res.cmd.F = d_matrix(eta_d, params) * rhs;
  res.min_thrust = res.cmd.F.minCoeff();
  res.negative_thrust = res.min_thrust < 0.0;
  return res;
}

}  // namespace tiltsim
