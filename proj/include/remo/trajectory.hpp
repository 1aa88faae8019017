/**
 * @file trajectory.hpp
 * @brief Cartesian B-spline handover trajectories and minimum-jerk joint motions.
 */

#pragma once

#include <vector>

#include "remo/types.hpp"

namespace remo {

/// Position plus orientation at the trajectory endpoints and samples.
struct Pose {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Quaterniond orientation = Eigen::Quaterniond::Identity();
};

struct TimedPose {
  double t = 0.0;
  Pose pose;
};

/**
 * @brief Clamped uniform B-spline between two poses with zero boundary velocity.
 *
 * Positions are evaluated by de Boor recursion over the position control
 * points; orientation follows a single-axis spherical interpolation driven by
 * the spline's scalar progress (the same basis functions applied to scalar
 * control values running 0 to 1).
 */
class CartesianTrajectory {
 public:
  int degree() const { return degree_; }
  double duration() const { return duration_; }
  const std::vector<Pose>& control_poses() const { return control_poses_; }
  const std::vector<double>& knots() const { return knots_; }

  /// Evaluates the trajectory at time t (clamped to [0, duration]).
  Pose evaluate(double t) const;

  /// Scalar progress in [0, 1] at time t.
  double progress(double t) const;

 private:
  friend CartesianTrajectory plan_bspline(const Pose& start, const Pose& goal,
                                          double duration, int degree);
  int degree_ = 5;
  double duration_ = 0.0;
  Pose start_, goal_;
  std::vector<Pose> control_poses_;
  std::vector<double> control_progress_;
  std::vector<double> knots_;  ///< normalized to [0, 1]
};

/// Uniformly sampled joint-space trajectory.
struct JointTrajectory {
  double dt = 0.0;                    ///< sample spacing [s]
  std::vector<JointVector> samples;   ///< q at t_k = k * dt
  bool resampled = false;             ///< true when built by resampling a non-uniform input

  std::size_t size() const { return samples.size(); }
  double duration() const { return samples.empty() ? 0.0 : dt * static_cast<double>(samples.size() - 1); }
};

/// Plans the handover B-spline. Degree must be 3 or 5 and duration positive;
/// violations throw ValidationError.
CartesianTrajectory plan_bspline(const Pose& start, const Pose& goal,
                                 double duration, int degree);

/// Samples the trajectory at uniform times covering both endpoints. The
/// requested dt is snapped so that an integer number of intervals spans the
/// duration exactly. Throws ValidationError for dt <= 0.
std::vector<TimedPose> sample_cartesian(const CartesianTrajectory& traj, double dt);

/// Per-joint quintic from q_start to q_goal with zero boundary velocity and
/// acceleration, sampled at (snapped) dt. Throws ValidationError for
/// non-positive duration or dt.
JointTrajectory min_jerk_joint_motion(const JointVector& q_start, const JointVector& q_goal,
                                      double duration, double dt);

/// Number of uniform samples covering [0, duration] at spacing close to dt.
std::size_t uniform_sample_count(double duration, double dt);

}  // namespace remo
