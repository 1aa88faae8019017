#include "remo/trajectory.hpp"

#include <algorithm>
#include <cmath>

#include "remo/errors.hpp"

namespace remo {

namespace {

/// Index of the knot span containing u, for clamped knots on [0, 1].
std::size_t find_span(const std::vector<double>& knots, int degree, double u) {
  const std::size_t n_ctrl = knots.size() - static_cast<std::size_t>(degree) - 1;
  if (u >= knots[n_ctrl]) return n_ctrl - 1;  // last non-empty span, covers u = 1
  std::size_t lo = static_cast<std::size_t>(degree);
  std::size_t hi = n_ctrl;
  while (lo + 1 < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (u < knots[mid]) hi = mid; else lo = mid;
  }
  return lo;
}

/// De Boor recursion; T must support scalar multiplication and addition.
template <typename T>
T de_boor(const std::vector<double>& knots, const std::vector<T>& ctrl, int degree, double u) {
  const std::size_t k = find_span(knots, degree, u);
  const std::size_t p = static_cast<std::size_t>(degree);
  std::vector<T> d(p + 1);
  for (std::size_t j = 0; j <= p; ++j) d[j] = ctrl[j + k - p];
  for (std::size_t r = 1; r <= p; ++r) {
    for (std::size_t j = p; j >= r; --j) {
      const double den = knots[j + 1 + k - r] - knots[j + k - p];
      const double alpha = den > 0.0 ? (u - knots[j + k - p]) / den : 0.0;
      d[j] = d[j - 1] * (1.0 - alpha) + d[j] * alpha;
    }
  }
  return d[p];
}

}  // namespace

std::size_t uniform_sample_count(double duration, double dt) {
  const double steps = std::max(1.0, std::round(duration / dt));
  return static_cast<std::size_t>(steps) + 1;
}

CartesianTrajectory plan_bspline(const Pose& start, const Pose& goal,
                                 double duration, int degree) {
  if (degree != 3 && degree != 5) {
    throw ValidationError("plan_bspline: degree must be 3 or 5");
  }
  if (!(duration > 0.0) || !std::isfinite(duration)) {
    throw ValidationError("plan_bspline: duration must be positive");
  }

  CartesianTrajectory traj;
  traj.degree_ = degree;
  traj.duration_ = duration;
  traj.start_ = start;
  traj.goal_ = goal;
  traj.start_.orientation.normalize();
  traj.goal_.orientation.normalize();

  // degree + 3 control points; doubled endpoints pin the boundary velocity to zero.
  const std::size_t n_ctrl = static_cast<std::size_t>(degree) + 3;
  traj.control_progress_.resize(n_ctrl);
  traj.control_progress_.front() = 0.0;
  traj.control_progress_[1] = 0.0;
  const std::size_t interior = n_ctrl - 4;
  for (std::size_t i = 0; i < interior; ++i) {
    traj.control_progress_[i + 2] =
        static_cast<double>(i + 1) / static_cast<double>(interior + 1);
  }
  traj.control_progress_[n_ctrl - 2] = 1.0;
  traj.control_progress_[n_ctrl - 1] = 1.0;

  traj.control_poses_.resize(n_ctrl);
  for (std::size_t i = 0; i < n_ctrl; ++i) {
    const double c = traj.control_progress_[i];
    traj.control_poses_[i].position =
        traj.start_.position + c * (traj.goal_.position - traj.start_.position);
    traj.control_poses_[i].orientation =
        traj.start_.orientation.slerp(c, traj.goal_.orientation);
  }

  // Clamped knot vector: degree+1 zeros, uniform interior, degree+1 ones.
  const std::size_t n_knots = n_ctrl + static_cast<std::size_t>(degree) + 1;
  const std::size_t n_interior = n_knots - 2 * (static_cast<std::size_t>(degree) + 1);
  traj.knots_.assign(n_knots, 0.0);
  for (std::size_t i = 0; i < n_interior; ++i) {
    traj.knots_[static_cast<std::size_t>(degree) + 1 + i] =
        static_cast<double>(i + 1) / static_cast<double>(n_interior + 1);
  }
  for (std::size_t i = n_knots - static_cast<std::size_t>(degree) - 1; i < n_knots; ++i) {
    traj.knots_[i] = 1.0;
  }
  return traj;
}

double CartesianTrajectory::progress(double t) const {
  const double u = std::clamp(t / duration_, 0.0, 1.0);
  return de_boor(knots_, control_progress_, degree_, u);
}

Pose CartesianTrajectory::evaluate(double t) const {
  const double u = std::clamp(t / duration_, 0.0, 1.0);
  std::vector<Eigen::Vector3d> pts(control_poses_.size());
  for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = control_poses_[i].position;
  Pose out;
  out.position = de_boor(knots_, pts, degree_, u);
  const double s = std::clamp(de_boor(knots_, control_progress_, degree_, u), 0.0, 1.0);
  out.orientation = start_.orientation.slerp(s, goal_.orientation);
  return out;
}

std::vector<TimedPose> sample_cartesian(const CartesianTrajectory& traj, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw ValidationError("sample_cartesian: dt must be positive");
  }
  const std::size_t count = uniform_sample_count(traj.duration(), dt);
  std::vector<TimedPose> out(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double t = traj.duration() *
                     (static_cast<double>(k) / static_cast<double>(count - 1));
    out[k].t = t;
    out[k].pose = traj.evaluate(t);
  }
  return out;
}

JointTrajectory min_jerk_joint_motion(const JointVector& q_start, const JointVector& q_goal,
                                      double duration, double dt) {
  if (!(duration > 0.0) || !std::isfinite(duration)) {
    throw ValidationError("min_jerk_joint_motion: duration must be positive");
  }
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw ValidationError("min_jerk_joint_motion: dt must be positive");
  }
  const std::size_t count = uniform_sample_count(duration, dt);
  JointTrajectory traj;
  traj.dt = duration / static_cast<double>(count - 1);
  traj.samples.resize(count);
  const JointVector delta = q_goal - q_start;
  for (std::size_t k = 0; k < count; ++k) {
    const double tau = static_cast<double>(k) / static_cast<double>(count - 1);
    const double s = tau * tau * tau * (10.0 + tau * (-15.0 + 6.0 * tau));
    traj.samples[k] = q_start + s * delta;
  }
  return traj;
}

}  // namespace remo
