#include "tiltsim/reference.hpp"

#include <cmath>

#include "tiltsim/errors.hpp"
#include "tiltsim/so3.hpp"

namespace tiltsim {

void quintic_blend(double t, double T, double& s, double& s_dot,
                   double& s_ddot) {
  if (T <= 0.0 || t >= T) {
    s = 1.0;
    s_dot = s_ddot = 0.0;
    return;
  }
  if (t <= 0.0) {
    s = s_dot = s_ddot = 0.0;
    return;
  }
  const double u = t / T;
  const double u2 = u * u, u3 = u2 * u;
  s = u3 * (10.0 - 15.0 * u + 6.0 * u2);
  s_dot = 30.0 * u2 * (1.0 - 2.0 * u + u2) / T;
  s_ddot = 60.0 * u * (1.0 - 3.0 * u + 2.0 * u2) / (T * T);
}

SquareXYReference::SquareXYReference(const Vec3& start_corner, double side,
                                     double period)
    : start_(start_corner), side_(side), period_(period) {}

RefPoint SquareXYReference::eval(double t) const {
  static const double dx[5] = {0, 1, 1, 0, 0};
  static const double dy[5] = {0, 0, 1, 1, 0};

  double tm = std::fmod(t, period_);
  if (tm < 0.0) tm += period_;
  const double edge_T = period_ / 4.0;
  int edge = static_cast<int>(tm / edge_T);
  if (edge > 3) edge = 3;

  double s, sd, sdd;
  quintic_blend(tm - edge * edge_T, edge_T, s, sd, sdd);

  const Vec3 from = start_ + Vec3(dx[edge] * side_, dy[edge] * side_, 0.0);
  const Vec3 to = start_ + Vec3(dx[edge + 1] * side_, dy[edge + 1] * side_, 0.0);

  RefPoint r;
  r.p = from + s * (to - from);
  r.v = sd * (to - from);
  r.a = sdd * (to - from);
  return r;
}

PitchProfileReference::PitchProfileReference(const Vec3& hold_position,
                                             double amplitude, double period)
    : position_(hold_position), amplitude_(amplitude), period_(period) {}

RefPoint PitchProfileReference::eval(double t) const {
  RefPoint r;
  r.p = position_;
  if (amplitude_ == 0.0) return r;

  double tm = std::fmod(t, period_);
  if (tm < 0.0) tm += period_;

  const double quarter = period_ / 4.0;
  double from, to, t0, T;
  if (tm < quarter) {
    from = 0.0;
    to = amplitude_;
    t0 = 0.0;
    T = quarter;
  } else if (tm < 3.0 * quarter) {
    from = amplitude_;
    to = -amplitude_;
    t0 = quarter;
    T = 2.0 * quarter;
  } else {
    from = -amplitude_;
    to = 0.0;
    t0 = 3.0 * quarter;
    T = quarter;
  }

  double s, sd, sdd;
  quintic_blend(tm - t0, T, s, sd, sdd);
  r.phi.y() = from + s * (to - from);
  r.phi_dot.y() = sd * (to - from);
  r.phi_ddot.y() = sdd * (to - from);
  return r;
}

HoverHoldReference::HoverHoldReference(const Vec3& position, double pitch,
                                       double yaw) {
  point_.p = position;
  point_.phi = Vec3(0.0, pitch, yaw);
}

RefPoint HoverHoldReference::eval(double) const { return point_; }

SequentialPlanner::SequentialPlanner(const PlannerPose& start,
                                     const PlannerPose& perch,
                                     double phase_duration,
                                     double pitch_margin) {
  if (std::abs(perch.pitch) >= kPi / 2.0 - pitch_margin) {
    throw InfeasiblePitch("sequential_planner: perch pitch " +
                          std::to_string(perch.pitch) +
                          " outside the controllable range");
  }

  start_q_ << start.p.z(), start.p.y(), start.yaw, start.pitch, start.p.x();
  Eigen::Matrix<double, 5, 1> goal_q;
  goal_q << perch.p.z(), perch.p.y(), perch.yaw, perch.pitch, perch.p.x();

  double t0 = 0.0;
  for (int k = 0; k < 5; ++k) {
    const double delta = goal_q(k) - start_q_(k);
    if (std::abs(delta) < 1e-12) continue;  // zero-length phase
    phases_.push_back({k, start_q_(k), goal_q(k), t0, phase_duration});
    t0 += phase_duration;
  }
  total_ = t0;
}

RefPoint SequentialPlanner::to_ref_point(const Eigen::Matrix<double, 5, 1>& q,
                                         const Eigen::Matrix<double, 5, 1>& qd,
                                         const Eigen::Matrix<double, 5, 1>& qdd) {
  RefPoint r;
  r.p = Vec3(q(4), q(1), q(0));
  r.v = Vec3(qd(4), qd(1), qd(0));
  r.a = Vec3(qdd(4), qdd(1), qdd(0));
  r.phi = Vec3(0.0, q(3), q(2));
  r.phi_dot = Vec3(0.0, qd(3), qd(2));
  r.phi_ddot = Vec3(0.0, qdd(3), qdd(2));
  return r;
}

RefPoint SequentialPlanner::eval(double t) const {
  Eigen::Matrix<double, 5, 1> q = start_q_;
  Eigen::Matrix<double, 5, 1> qd = Eigen::Matrix<double, 5, 1>::Zero();
  Eigen::Matrix<double, 5, 1> qdd = Eigen::Matrix<double, 5, 1>::Zero();

  for (const Phase& ph : phases_) {
    if (t >= ph.t0 + ph.T) {
      q(ph.coord) = ph.to;
    } else if (t > ph.t0) {
      double s, sd, sdd;
      quintic_blend(t - ph.t0, ph.T, s, sd, sdd);
      q(ph.coord) = ph.from + s * (ph.to - ph.from);
      qd(ph.coord) = sd * (ph.to - ph.from);
      qdd(ph.coord) = sdd * (ph.to - ph.from);
      break;
    } else {
      break;
    }
  }
  return to_ref_point(q, qd, qdd);
}

Reference world_to_reference(const RefPoint& w) {
  const Mat3 Rzt = rot_z(w.phi.z()).transpose();
  const Mat3 e3h = hat(e3());
  const double yd = w.phi_dot.z(), ydd = w.phi_ddot.z();

  const Vec3 pt = Rzt * w.p;
  const Vec3 vt = Rzt * w.v - yd * e3h * pt;
  const Vec3 at = Rzt * w.a - 2.0 * yd * e3h * Rzt * w.v - ydd * e3h * pt +
                  yd * yd * e3h * e3h * pt;

  Reference ref;
  ref.q_ud = pt.y();
  ref.qd_ud = vt.y();
  ref.qdd_ud = at.y();
  ref.q_fd << pt.x(), pt.z(), 0.0, w.phi.y(), w.phi.z();
  ref.qd_fd << vt.x(), vt.z(), 0.0, w.phi_dot.y(), w.phi_dot.z();
  ref.qdd_fd << at.x(), at.z(), 0.0, w.phi_ddot.y(), w.phi_ddot.z();
  return ref;
}

}  // namespace tiltsim
