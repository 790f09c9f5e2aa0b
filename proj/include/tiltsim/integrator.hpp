#pragma once

namespace tiltsim {

// Classical RK4 step for a non-autonomous ODE y' = f(t, y).
// Y needs +, scalar *, and copy; f returns the derivative as a Y.
template <typename Y, typename F>
Y rk4_step(const Y& y, F&& f, double t, double dt) {
  const Y k1 = f(t, y);
  const Y k2 = f(t + 0.5 * dt, Y(y + (0.5 * dt) * k1));
  const Y k3 = f(t + 0.5 * dt, Y(y + (0.5 * dt) * k2));
  const Y k4 = f(t + dt, Y(y + dt * k3));
  return Y(y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

}  // namespace tiltsim
