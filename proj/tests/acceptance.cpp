// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Tolerances are pinned here, not configurable.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tiltsim/allocation.hpp"
#include "tiltsim/config.hpp"
#include "tiltsim/errors.hpp"
#include "tiltsim/scenario.hpp"
#include "tiltsim/stability.hpp"

using namespace tiltsim;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

std::mt19937 rng(unsigned seed) { return std::mt19937(seed); }

double uniform(std::mt19937& gen, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(gen);
}

// smooth multisine wrench for the dynamics oracle
struct SmoothWrench {
  double fz0;
  double amp[5], freq[5], phase[5];
  SmoothWrench(std::mt19937& gen, double hover_fz) : fz0(hover_fz) {
    for (int i = 0; i < 5; ++i) {
      amp[i] = uniform(gen, 0.1, 1.0);
      freq[i] = uniform(gen, 0.5, 3.0);
      phase[i] = uniform(gen, 0.0, 2.0 * kPi);
    }
  }
  VirtualWrench at(double t) const {
    VirtualWrench w;
    w.f_x = 2.0 * amp[0] * std::sin(freq[0] * t + phase[0]);
    w.f_z = fz0 + 3.0 * amp[1] * std::sin(freq[1] * t + phase[1]);
    w.tau = Vec3(0.08 * amp[2] * std::sin(freq[2] * t + phase[2]),
                 0.08 * amp[3] * std::sin(freq[3] * t + phase[3]),
                 0.08 * amp[4] * std::sin(freq[4] * t + phase[4]));
    return w;
  }
};

RigidState step_wrench(const RigidState& state, const SmoothWrench& wrench,
                       const VehicleParams& params, double t, double dt) {
  using Vec12 = Eigen::Matrix<double, 12, 1>;
  const auto pack = [](const RigidState& s) {
    Vec12 y;
    y << s.p, s.v, s.phi.vec(), s.omega;
    return y;
  };
  const auto unpack = [](const Vec12& y) {
    RigidState s;
    s.p = y.segment<3>(0);
    s.v = y.segment<3>(3);
    s.phi = EulerZYX::from_vec(y.segment<3>(6));
    s.omega = y.segment<3>(9);
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
  const Vec12 k2 = f(t + dt / 2, y0 + dt / 2 * k1);
  const Vec12 k3 = f(t + dt / 2, y0 + dt / 2 * k2);
  const Vec12 k4 = f(t + dt, y0 + dt * k3);
  return unpack(y0 + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4));
}

Scenario hover_scenario(double yaw, const Vec3& offset, const Vec3& euler_deg,
                        double duration) {
  Scenario sc;
  sc.name = "hover_hold";
  sc.kind = ScenarioKind::HoverHold;
  sc.duration = duration;
  sc.hold_position = Vec3(0, 0, 1);
  sc.hold_yaw = yaw;
  sc.initial.p = sc.hold_position + offset;
  sc.initial.phi = EulerZYX::from_vec(deg2rad(1.0) * euler_deg +
                                      Vec3(0.0, 0.0, yaw));
  return sc;
}

// 1. allocation round trip over 1000 random feasible wrenches
Outcome criterion_allocation() {
  const VehicleParams params;
  auto gen = rng(101);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    VirtualWrench u;
    u.f_z = uniform(gen, 5.0, 40.0);
    u.f_x = uniform(gen, -u.f_z / 2.0, u.f_z / 2.0);
    Vec3 tau(uniform(gen, -1, 1), uniform(gen, -1, 1), uniform(gen, -1, 1));
    u.tau = tau / tau.norm() * uniform(gen, 0.0, 0.5);

    const AllocationResult res = allocate(u, params);
    const Vec5 back = mixer_matrix(res.cmd.eta_d, params) * res.cmd.F;
    worst = std::max(worst, (back - u.vec()).cwiseAbs().maxCoeff());
  }
  Outcome out;
  out.pass = worst <= 1e-9;
  std::ostringstream os;
  os << "max |C(eta_d) F - u|_inf = " << worst << " (<= 1e-9)";
  out.detail = os.str();
  return out;
}

// 2. transformed-dynamics oracle along 1 s of random flight at dt = 1e-4
Outcome criterion_transformed_dynamics() {
  const VehicleParams params;
  auto gen = rng(102);
  const SmoothWrench wrench(gen, params.m * params.g);
  RigidState s;
  s.p = Vec3(0.4, -0.3, 1.0);
  s.v = Vec3(0.2, 0.1, -0.1);
  s.phi = {0.15, -0.1, 0.3};
  s.omega = Vec3(0.2, -0.1, 0.3);

  const double dt = 1e-4;
  const int steps = 10000;
  std::vector<Vec3> pt(steps);
  std::vector<Vec5> qf(steps);
  std::vector<Vec3> rhs4(steps);
  std::vector<Vec5> rhs5(steps);

  double t = 0.0;
  for (int k = 0; k < steps; ++k) {
    const TransformedState ts = transform_state(s);
    pt[k] = ts.p_tilde;
    qf[k] << ts.p_tilde.x(), ts.p_tilde.z(), ts.phi;

    const VirtualWrench w = wrench.at(t);
    Vec3 h_phi, h_p;
    Mat3 g_phi, g_p;
    rotational_terms(s, params, h_phi, g_phi);
    translational_terms(s, h_phi, g_phi, h_p, g_p);
    rhs4[k] = rot_y(s.phi.phi2) * rot_x(s.phi.phi1) *
                  (w.f_x * e1() + w.f_z * e3()) / params.m -
              params.g * e3() + h_p + g_p * w.tau;
    const double fz_bar = std::cos(s.phi.phi1) * w.f_z;
    const Decomposition dec =
        decompose(ts, h_p, g_p, h_phi, g_phi, w.tau, fz_bar, params);
    Vec5 u_f;
    u_f << w.f_x, fz_bar, w.tau;
    rhs5[k] = dec.h_f + dec.g_f * u_f;

    s = step_wrench(s, wrench, params, t, dt);
    t += dt;
  }

  double scale = 0.0, err4 = 0.0, err5 = 0.0;
  for (int k = 1; k + 1 < steps; ++k) {
    const Vec3 fd4 = (pt[k + 1] - 2 * pt[k] + pt[k - 1]) / (dt * dt);
    const Vec5 fd5 = (qf[k + 1] - 2 * qf[k] + qf[k - 1]) / (dt * dt);
    scale = std::max(scale, rhs4[k].cwiseAbs().maxCoeff());
    err4 = std::max(err4, (fd4 - rhs4[k]).cwiseAbs().maxCoeff());
    err5 = std::max(err5, (fd5 - rhs5[k]).cwiseAbs().maxCoeff());
  }
  Outcome out;
  out.pass = err4 / scale <= 1e-3 && err5 / scale <= 1e-3;
  std::ostringstream os;
  os << "relative error: transform " << err4 / scale << ", decomposition "
     << err5 / scale << " (<= 1e-3)";
  out.detail = os.str();
  return out;
}

// 3. Routh-Hurwitz vs root locations on 10000 random gain triples
Outcome criterion_routh_hurwitz() {
  auto gen = rng(103);
  int disagreements = 0, tested = 0;
  while (tested < 10000) {
    const CubicGains g{uniform(gen, 0.0, 10.0), uniform(gen, 0.0, 10.0),
                       uniform(gen, 0.0, 10.0)};
    if (std::abs(g.k_d * g.k_p - g.k_i) < 1e-9) continue;
    if (g.k_d < 1e-9 || g.k_i < 1e-9) continue;
    ++tested;
    const bool stable = cubic_roots(g)[0].real() < 0.0;
    if (stable != routh_hurwitz_cubic(g)) ++disagreements;
  }
  Outcome out;
  out.pass = disagreements == 0;
  out.detail = std::to_string(disagreements) + " disagreements in 10000 (== 0)";
  return out;
}

// 4. naive input matrix singular at 90 deg yaw, while the transformed
// controller flies the same attitude with bounded commands
Outcome criterion_singularity() {
  const double det_pos = std::abs(det_b({0, 0, kPi / 2}));
  const double det_neg = std::abs(det_b({0, 0, -kPi / 2}));
  const bool det_ok = det_pos <= 1e-15 && det_neg <= 1e-15;

  const VehicleParams params;
  const Scenario sc = hover_scenario(kPi / 2, Vec3(0.1, 0.1, 0.1),
                                     Vec3(5, 5, 5), 10.0);
  const SimulationLog log =
      run_scenario(sc, GainSet{}, params, ControllerConfig{});

  double max_F = 0.0;
  for (const LogRow& row : log.rows) max_F = std::max(max_F, row.F.maxCoeff());
  const LogRow& last = log.rows.back();
  const double terminal =
      std::max(std::abs(last.e_u), last.e_f.cwiseAbs().maxCoeff());

  Outcome out;
  out.pass = det_ok && !log.aborted && max_F < params.F_max && terminal < 1e-3;
  std::ostringstream os;
  os << "|det B(0,0,+-pi/2)| = " << std::max(det_pos, det_neg)
     << " (<= 1e-15); 90-deg-yaw hover: max F = " << max_F << " (< "
     << params.F_max << "), terminal error = " << terminal << " (< 1e-3)";
  out.detail = os.str();
  return out;
}

// 5. cascade convergence with valid gains, envelope failure with
// the product condition violated
Outcome criterion_convergence() {
  const VehicleParams params;
  const GainSet gains;
  const ControllerConfig cfg;

  const Scenario sc =
      hover_scenario(0.0, Vec3(0.2, 0.2, 0.2), Vec3(10, 10, 10), 10.0);
  const SimulationLog log = run_scenario(sc, gains, params, cfg);

  // all error components below 1e-3 from 8 s on
  double worst_after_8s = 0.0;
  for (const LogRow& row : log.rows) {
    if (row.t < 8.0) continue;
    worst_after_8s = std::max({worst_after_8s, std::abs(row.e_u),
                               row.e_f.cwiseAbs().maxCoeff()});
  }

  bool envelope_ok = false, residual_ok = false;
  double residual = -1.0;
  if (!log.aborted && log.saturation_count == 0) {
    const ConvergenceReport report =
        certify_cascade(log, gains, ConvergenceTolerances{});
    envelope_ok = report.envelope_ok;
    residual = report.fit_residual;
    residual_ok = report.fit_residual < 0.1;
  }

  // violated product condition: the envelope test must fail
  GainSet bad = gains;
  bad.K_fp = Vec5::Constant(1.0);
  bad.K_fd = Vec5::Constant(1.0);
  bad.K_fi = Vec5::Constant(2.0);
  Scenario unstable =
      hover_scenario(0.0, Vec3(0.02, 0.02, 0.02), Vec3(1, 1, 1), 8.0);
  unstable.enforce_gain_check = false;
  const SimulationLog bad_log = run_scenario(unstable, bad, params, cfg);
  const ConvergenceReport bad_report = certify_cascade(
      bad_log, bad, ConvergenceTolerances{}, /*require_clean=*/false);
  const bool bad_failed = !bad_report.pass && !bad_report.envelope_ok;

  Outcome out;
  out.pass = !log.aborted && worst_after_8s < 1e-3 && envelope_ok &&
             residual_ok && bad_failed;
  std::ostringstream os;
  os << "max error after 8 s = " << worst_after_8s
     << " (< 1e-3); fit residual = " << residual
     << " (< 0.1); violated gains fail envelope: "
     << (bad_failed ? "yes" : "no");
  out.detail = os.str();
  return out;
}

// 6. square tracking holds pitch flat while the tilt works
Outcome criterion_square() {
  const RunConfig cfg = RunConfig::defaults();
  const Scenario& sc = cfg.scenarios.at("square_xy");
  const SimulationLog log =
      run_scenario(sc, cfg.gains, cfg.vehicle, cfg.controller);

  double max_pitch = 0.0, eta_lo = 1e300, eta_hi = -1e300;
  for (const LogRow& row : log.rows) {
    if (row.t < 2.0) continue;
    max_pitch = std::max(max_pitch, std::abs(row.phi.y()));
    eta_lo = std::min(eta_lo, row.eta);
    eta_hi = std::max(eta_hi, row.eta);
  }
  const double eta_range_deg = rad2deg(eta_hi - eta_lo);

  Outcome out;
  out.pass = !log.aborted && rad2deg(max_pitch) < 0.5 && eta_range_deg > 0.5;
  std::ostringstream os;
  os << "max |pitch| = " << rad2deg(max_pitch)
     << " deg (< 0.5); eta range = " << eta_range_deg << " deg (> 0.5)";
  out.detail = os.str();
  return out;
}

// 7. pitch sweep to +-60 deg during a position hold
Outcome criterion_pitch_sweep() {
  const RunConfig cfg = RunConfig::defaults();
  const Scenario& sc = cfg.scenarios.at("pitch_sweep");
  const SimulationLog log =
      run_scenario(sc, cfg.gains, cfg.vehicle, cfg.controller);

  double peak_pitch = 0.0, max_pos_err = 0.0;
  for (const LogRow& row : log.rows) {
    peak_pitch = std::max(peak_pitch, std::abs(row.phi.y()));
    max_pos_err = std::max(max_pos_err, (row.p - row.ref_p).norm());
  }

  Outcome out;
  out.pass = !log.aborted && rad2deg(peak_pitch) > 59.5 && max_pos_err < 0.02;
  std::ostringstream os;
  os << "peak |pitch| = " << rad2deg(peak_pitch)
     << " deg (> 59.5); max position error = " << max_pos_err << " m (< 0.02)";
  out.detail = os.str();
  return out;
}

// 8. sequential planner reaches the perch, the cart moves under the thrust
// step, and stays put when the thrust is held below breakaway
Outcome criterion_perch_push() {
  const RunConfig cfg = RunConfig::defaults();
  const Scenario& sc = cfg.scenarios.at("perch_push");
  const SimulationLog log =
      run_scenario(sc, cfg.gains, cfg.vehicle, cfg.controller);

  bool attach = log.attached();
  double disp = 0.0;
  double align = 0.0;
  if (attach) {
    Vec3 p_attach = log.rows.back().p;
    for (const LogRow& row : log.rows) {
      if (row.attach_flag) {
        p_attach = row.p;
        break;
      }
    }
    disp = (log.rows.back().p - p_attach).dot(sc.perch->cart.axis);
    const LogRow& last = log.rows.back();
    const Vec3 thrust_dir = euler_to_rotmat(EulerZYX::from_vec(last.phi)) *
                            Vec3(std::sin(last.eta), 0.0, std::cos(last.eta));
    align = thrust_dir.dot(sc.perch->normal());
  }

  // same scenario with the push held below the static-friction threshold
  Scenario weak = sc;
  weak.perch->push_thrust = 5.0;
  const SimulationLog weak_log =
      run_scenario(weak, cfg.gains, cfg.vehicle, cfg.controller);
  double weak_disp = -1.0;
  if (weak_log.attached()) {
    Vec3 p_attach = weak_log.rows.back().p;
    for (const LogRow& row : weak_log.rows) {
      if (row.attach_flag) {
        p_attach = row.p;
        break;
      }
    }
    weak_disp =
        std::abs((weak_log.rows.back().p - p_attach).dot(sc.perch->cart.axis));
  }

  Outcome out;
  out.pass = !log.aborted && attach && disp > 0.1 &&
             align > std::cos(sc.perch->align_tol) && weak_log.attached() &&
             weak_disp == 0.0;
  std::ostringstream os;
  os << "attach at t = " << log.attach_time << " s; cart displacement = "
     << disp << " m (> 0.1); thrust-normal alignment = " << align
     << "; below-threshold displacement = " << weak_disp << " (== 0)";
  out.detail = os.str();
  return out;
}

// 9. RK4 global error slope on the step-halving study
Outcome criterion_integrator_order() {
  const VehicleParams params;
  RigidState s0;
  s0.omega = Vec3(0.8, -0.5, 0.6);
  s0.phi = {0.1, -0.05, 0.2};
  ActuatorCommand cmd;
  cmd.eta_d = 0.15;
  cmd.F = Vec4(5.4, 5.2, 5.0, 5.3);
  const double T = 0.5;

  const auto integrate = [&](double dt) {
    RigidState s = s0;
    const int n = static_cast<int>(std::llround(T / dt));
    for (int i = 0; i < n; ++i) s = plant_step(s, cmd, params, dt);
    return s;
  };

  const RigidState ref = integrate(3.90625e-5);
  std::vector<double> xs, ys;
  for (const double dt : {2.5e-3, 1.25e-3, 6.25e-4, 3.125e-4}) {
    const RigidState s = integrate(dt);
    Eigen::Matrix<double, 12, 1> d;
    d << s.p - ref.p, s.v - ref.v, s.phi.vec() - ref.phi.vec(),
        s.omega - ref.omega;
    xs.push_back(std::log(dt));
    ys.push_back(std::log(d.norm()));
  }
  const size_t n = xs.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);

  Outcome out;
  out.pass = slope >= 3.8 && slope <= 4.2;
  std::ostringstream os;
  os << "global error slope = " << slope << " (in [3.8, 4.2])";
  out.detail = os.str();
  return out;
}

// 10. identical configs give byte-identical CSV logs
Outcome criterion_determinism() {
  const RunConfig cfg = RunConfig::defaults();
  Scenario sc = cfg.scenarios.at("square_xy");
  sc.duration = 6.0;

  const auto run_to_string = [&]() {
    const SimulationLog log =
        run_scenario(sc, cfg.gains, cfg.vehicle, cfg.controller);
    const std::string path = "acceptance_determinism.csv";
    write_csv(log, path);
    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    std::remove(path.c_str());
    return buf.str();
  };

  const std::string a = run_to_string();
  const std::string b = run_to_string();

  Outcome out;
  out.pass = !a.empty() && a == b;
  out.detail = "two runs, " + std::to_string(a.size()) +
               " bytes each: " + (out.pass ? "byte-identical" : "DIFFER");
  return out;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Outcome (*fn)();
    double budget_s;
  };
  const Criterion criteria[] = {
      {"allocation round trip", criterion_allocation, 1.0},
      {"transformed-dynamics oracle", criterion_transformed_dynamics, 10.0},
      {"Routh-Hurwitz vs roots", criterion_routh_hurwitz, 5.0},
      {"yaw singularity avoided", criterion_singularity, 20.0},
      {"cascade convergence", criterion_convergence, 20.0},
      {"square tracking, flat pitch", criterion_square, 20.0},
      {"pitch sweep, position hold", criterion_pitch_sweep, 20.0},
      {"perch and cart push", criterion_perch_push, 30.0},
      {"integrator order", criterion_integrator_order, 5.0},
      {"determinism", criterion_determinism, 30.0},
  };

  int failures = 0;
  int idx = 0;
  for (const Criterion& c : criteria) {
    ++idx;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.fn();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    out.seconds = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    const bool in_budget = out.seconds < c.budget_s;
    const bool pass = out.pass && in_budget;
    if (!pass) ++failures;
    std::printf("[%s] %2d. %-32s %s [%.2fs / %.0fs]\n",
                pass ? "PASS" : "FAIL", idx, c.name, out.detail.c_str(),
                out.seconds, c.budget_s);
  }
  std::printf("%d/10 criteria passed\n", 10 - failures);
  return failures == 0 ? 0 : 1;
}
