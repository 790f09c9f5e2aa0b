#pragma once

// Shared test utilities: seeded generators and smooth random actuation for
// the finite-difference oracles.

#include <cmath>
#include <random>

#include "tiltsim/vehicle.hpp"

namespace tiltsim::test {

inline std::mt19937 rng(unsigned seed = 20240711u) { return std::mt19937(seed); }

inline double uniform(std::mt19937& gen, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(gen);
}

inline EulerZYX random_euler(std::mt19937& gen, double bound = 1.4) {
  return {uniform(gen, -bound, bound), uniform(gen, -bound, bound),
          uniform(gen, -bound, bound)};
}

inline Vec3 random_vec3(std::mt19937& gen, double bound) {
  return Vec3(uniform(gen, -bound, bound), uniform(gen, -bound, bound),
              uniform(gen, -bound, bound));
}

inline RigidState random_state(std::mt19937& gen, double euler_bound = 0.8) {
  RigidState s;
  s.p = random_vec3(gen, 1.5);
  s.v = random_vec3(gen, 1.0);
  s.phi = random_euler(gen, euler_bound);
  s.omega = random_vec3(gen, 0.8);
  s.eta = uniform(gen, -0.5, 0.5);
  return s;
}

// Smooth (multisine) wrench trajectory for dynamics oracles: continuous in
// time so finite differences of the resulting state converge.
class SmoothWrench {
 public:
  SmoothWrench(std::mt19937& gen, double hover_fz) : fz0_(hover_fz) {
    for (int i = 0; i < 5; ++i) {
      amp_[i] = uniform(gen, 0.1, 1.0);
      freq_[i] = uniform(gen, 0.5, 3.0);
      phase_[i] = uniform(gen, 0.0, 2.0 * kPi);
    }
  }

  VirtualWrench at(double t) const {
    VirtualWrench w;
    w.f_x = 2.0 * amp_[0] * std::sin(freq_[0] * t + phase_[0]);
    w.f_z = fz0_ + 3.0 * amp_[1] * std::sin(freq_[1] * t + phase_[1]);
    w.tau.x() = 0.08 * amp_[2] * std::sin(freq_[2] * t + phase_[2]);
    w.tau.y() = 0.08 * amp_[3] * std::sin(freq_[3] * t + phase_[3]);
    w.tau.z() = 0.08 * amp_[4] * std::sin(freq_[4] * t + phase_[4]);
    return w;
  }

 private:
  double fz0_;
  double amp_[5], freq_[5], phase_[5];
};

// RK4 on the wrench-driven rigid body (no servo, wrench applied directly).
inline RigidState step_wrench_dynamics(const RigidState& state,
                                       const SmoothWrench& wrench,
                                       const VehicleParams& params, double t,
                                       double dt) {
  using Vec12 = Eigen::Matrix<double, 12, 1>;
  const auto pack = [](const RigidState& s) {
    Vec12 y;
    y << s.p, s.v, s.phi.vec(), s.omega;
    return y;
  };
  const auto unpack = [&state](const Vec12& y) {
    RigidState s;
    s.p = y.segment<3>(0);
    s.v = y.segment<3>(3);
    s.phi = EulerZYX::from_vec(y.segment<3>(6));
    s.omega = y.segment<3>(9);
    s.eta = state.eta;
    return s;
  };
  const auto f = [&](double ts, const Vec12& y) -> Vec12 {
    const StateDerivative d =
        dynamics_derivative(unpack(y), wrench.at(ts), params);
    Vec12 dy;
    dy << d.p_dot, d.v_dot, d.phi_dot, d.omega_dot;
    return dy;
  };
  const Vec12 y0 = pack(state);
  const Vec12 k1 = f(t, y0);
  const Vec12 k2 = f(t + 0.5 * dt, y0 + 0.5 * dt * k1);
  const Vec12 k3 = f(t + 0.5 * dt, y0 + 0.5 * dt * k2);
  const Vec12 k4 = f(t + dt, y0 + dt * k3);
  return unpack(y0 + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

}  // namespace tiltsim::test
