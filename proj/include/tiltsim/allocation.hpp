#pragma once

#include "tiltsim/vehicle.hpp"

namespace tiltsim {

// Closed-form inverse of the reduced thrust map at a fixed tilt angle,
// F = d_matrix(eta_d) * [sqrt(f_x^2 + f_z^2); tau].
// Throws TiltSingularity when |eta_d| >= pi/2 - tilt_margin.
Mat4 d_matrix(double eta_d, const VehicleParams& params);

struct AllocationResult {
  ActuatorCommand cmd;
  bool negative_thrust = false;  // some F_i < 0: wrench infeasible for
                                 // unidirectional rotors, reported not fixed
  double min_thrust = 0.0;
};

// Wrench -> actuator command:
//   eta_d = atan2(f_x, f_z),  F = d_matrix(eta_d) [|f|; tau].
// Exact inverse of the mixer before saturation. Throws TiltSingularity when
// f_z <= f_z_min (eta_d would leave (-pi/2, pi/2)).
AllocationResult allocate(const VirtualWrench& wrench,
                          const VehicleParams& params);

}  // namespace tiltsim
