#pragma once

#include <array>
#include <complex>
#include <string>

#include "tiltsim/controller.hpp"
#include "tiltsim/log.hpp"
#include "tiltsim/types.hpp"

namespace tiltsim {

// Coefficients of the per-axis closed-loop error polynomial
// lambda^3 + k_d lambda^2 + k_p lambda + k_i.
struct CubicGains {
  double k_d = 0.0;
  double k_p = 0.0;
  double k_i = 0.0;
};

// Input matrix of the untransformed [p1; p3] dynamics and its determinant
// cos(phi1)cos(phi3) + sin(phi1)sin(phi2)sin(phi3); singular at
// phi3 = +-pi/2 with phi1 or phi2 = 0, which the yaw-derotated coordinates
// avoid.
Mat2 b_matrix(const EulerZYX& phi);
double det_b(const EulerZYX& phi);

// Necessary and sufficient left-half-plane condition for the monic cubic:
// k_d > 0, k_i > 0 and k_d*k_p > k_i.
bool routh_hurwitz_cubic(const CubicGains& g);

// Roots of lambda^3 + k_d lambda^2 + k_p lambda + k_i (companion matrix
// eigenvalues, descending real part).
std::array<std::complex<double>, 3> cubic_roots(const CubicGains& g);

struct ConvergenceTolerances {
  double terminal_e_u = 1e-3;
  double terminal_e_f = 1e-3;           // per-component [SI]
  double terminal_coupling = 1e-3;      // (tan phi1 - tan phi1_d) fz_bar [N]
  double fit_residual_max = 0.1;        // log-linear fit residual threshold
  double fit_window_fraction = 0.6;     // fit over the final fraction of the run
  double fit_floor = 1e-8;              // samples below this norm are excluded
};

struct ConvergenceReport {
  bool pass = false;
  Vec5 terminal_e_f = Vec5::Zero();
  double terminal_e_u = 0.0;
  double terminal_coupling = 0.0;
  double decay_rate = 0.0;         // fitted d/dt ln|e_f|; negative = decaying
  double fit_residual = 0.0;
  bool rate_valid = false;         // residual under threshold
  bool envelope_ok = false;        // decaying exponential envelope confirmed
  std::string detail;

  std::string to_string() const;
};

// Empirical convergence certificate for a disturbance-free run: e_f must
// decay log-linearly, e_u and the cascade coupling term must reach their
// terminal tolerances. Throws InvalidLog when saturation occurred (the
// certificate would be vacuous) unless the log is being analyzed for an
// expected failure, in which case call with require_clean = false.
ConvergenceReport certify_cascade(const SimulationLog& log,
                                  const GainSet& gains,
                                  const ConvergenceTolerances& tol,
                                  bool require_clean = true);

// Slowest (largest real part) closed-loop pole across all axes of a gain set.
double slowest_pole(const GainSet& gains);

}  // namespace tiltsim
