#pragma once

#include <memory>
#include <vector>

#include "tiltsim/controller.hpp"
#include "tiltsim/types.hpp"

namespace tiltsim {

// World-frame desired trajectory sample. The roll slot of phi is zero; the
// cascade supplies the roll reference at control time.
struct RefPoint {
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  Vec3 a = Vec3::Zero();
  Vec3 phi = Vec3::Zero();
  Vec3 phi_dot = Vec3::Zero();
  Vec3 phi_ddot = Vec3::Zero();
};

class ReferenceGenerator {
 public:
  virtual ~ReferenceGenerator() = default;
  virtual RefPoint eval(double t) const = 0;
};

// Rest-to-rest quintic blend: s goes 0 -> 1 over [0, T] with zero boundary
// velocity and acceleration; clamped outside the interval.
void quintic_blend(double t, double T, double& s, double& s_dot,
                   double& s_ddot);

// Periodic traversal of a side x side square at fixed altitude, one quintic
// rest-to-rest edge per quarter period. Pitch and yaw references are zero.
class SquareXYReference : public ReferenceGenerator {
 public:
  SquareXYReference(const Vec3& start_corner, double side, double period);
  RefPoint eval(double t) const override;

 private:
  Vec3 start_;
  double side_;
  double period_;
};

// Position held constant; pitch sweeps 0 -> +A -> -A -> 0 per period with
// quintic segments, peaking at the quarter period.
class PitchProfileReference : public ReferenceGenerator {
 public:
  PitchProfileReference(const Vec3& hold_position, double amplitude,
                        double period);
  RefPoint eval(double t) const override;

 private:
  Vec3 position_;
  double amplitude_;
  double period_;
};

// Constant pose hold.
class HoverHoldReference : public ReferenceGenerator {
 public:
  HoverHoldReference(const Vec3& position, double pitch, double yaw);
  RefPoint eval(double t) const override;

 private:
  RefPoint point_;
};

// The 5 commandable pose coordinates.
struct PlannerPose {
  Vec3 p = Vec3::Zero();
  double pitch = 0.0;
  double yaw = 0.0;
};

// Rule-based approach planner: linear interpolation from start to perch,
// conducted in one axis at a time in the order z, y, yaw, pitch, x, each
// phase a rest-to-rest quintic. Phases with no change take zero time; the
// final phase ends at the attach point and the pose is held afterwards.
// Throws InfeasiblePitch when the perch pitch is at or beyond
// pi/2 - pitch_margin.
class SequentialPlanner : public ReferenceGenerator {
 public:
  SequentialPlanner(const PlannerPose& start, const PlannerPose& perch,
                    double phase_duration, double pitch_margin = kGimbalMargin);
  RefPoint eval(double t) const override;

  double total_duration() const { return total_; }

 private:
  struct Phase {
    int coord;      // 0..4 over [z, y, yaw, pitch, x]
    double from, to;
    double t0, T;
  };
  // coordinate order used internally: [z, y, yaw, pitch, x]
  static RefPoint to_ref_point(const Eigen::Matrix<double, 5, 1>& q,
                               const Eigen::Matrix<double, 5, 1>& qd,
                               const Eigen::Matrix<double, 5, 1>& qdd);

  std::vector<Phase> phases_;
  Eigen::Matrix<double, 5, 1> start_q_;
  double total_ = 0.0;
};

// Controller-frame reference from a world sample: the position chain is
// de-rotated by the desired yaw, with chain-rule velocity and acceleration.
Reference world_to_reference(const RefPoint& w);

}  // namespace tiltsim
