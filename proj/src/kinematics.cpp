#include "remo/kinematics.hpp"

#include <cmath>

#include "remo/errors.hpp"

namespace remo {

namespace {

bool finite_vec(const Eigen::Vector3d& v) {
  return std::isfinite(v.x()) && std::isfinite(v.y()) && std::isfinite(v.z());
}

/// Homogeneous standard-DH transform Rz(theta) * Tz(d) * Tx(a) * Rx(alpha).
RigidTransform dh_transform(double theta, double a, double alpha, double d) {
  const double ct = std::cos(theta), st = std::sin(theta);
  const double ca = std::cos(alpha), sa = std::sin(alpha);
  RigidTransform t;
  t.rotation << ct, -st * ca, st * sa,
                st,  ct * ca, -ct * sa,
                0.0,      sa,       ca;
  t.translation << a * ct, a * st, d;
  return t;
}

}  // namespace

Eigen::Matrix3d KinematicModel::base_alignment() {
  // DH base -> world: x stays forward, DH z becomes world y, DH -y becomes world z.
  Eigen::Matrix3d r;
  r << 1.0, 0.0, 0.0,
       0.0, 0.0, 1.0,
       0.0, -1.0, 0.0;
  return r;
}

KinematicModel build_model(const BodyDimensions& dims) {
  if (!finite_vec(dims.spine) || !finite_vec(dims.humerus) || !finite_vec(dims.radius)) {
    throw ValidationError("build_model: non-finite segment dimension");
  }
  if (dims.spine.minCoeff() < 0.0 || dims.humerus.minCoeff() < 0.0 ||
      dims.radius.minCoeff() < 0.0) {
    throw ValidationError("build_model: negative segment dimension");
  }

  const double half_pi = kPi / 2.0;
  const Eigen::Vector3d& s = dims.spine;
  const Eigen::Vector3d& h = dims.humerus;
  const Eigen::Vector3d& r = dims.radius;

  KinematicModel m;
  m.dims_ = dims;
  m.rows_ = {{
      {0.0,      s.z(),  -half_pi, -s.y(), 1},
      {0.0,      0.0,     half_pi, -s.x(), 2},
      {half_pi,  0.0,     half_pi,  0.0,   3},
      {-half_pi, -h.x(),  half_pi, -h.z(), 4},
      {kPi,      0.0,     half_pi, -h.y(), 5},
      {half_pi,  -r.y(),  half_pi, -r.z(), 6},
      {half_pi,  0.0,     half_pi, -r.x(), 7},
      {0.0,      0.0,     0.0,      0.0,   8},
  }};
  m.total_length_ = s.norm() + h.norm() + r.norm();
  return m;
}

SegmentPoses forward_kinematics(const KinematicModel& model, const JointVector& q) {
  if (!q.allFinite()) {
    throw ValidationError("forward_kinematics: non-finite joint angle");
  }

  RigidTransform t;
  t.rotation = KinematicModel::base_alignment();

  SegmentPoses poses;
  poses.pelvis = t;
  const auto& rows = model.rows();
  for (int i = 0; i < kNumJoints; ++i) {
    const DHRow& row = rows[static_cast<std::size_t>(i)];
    t = t * detail::dh_row_transform(row, q[i]);
    switch (i) {
      case 0: poses.spine = t; break;
      case 2: poses.shoulder = t; break;
      case 4: poses.elbow = t; break;
      case 6: poses.wrist = t; break;
      case 7: poses.hand = t; break;
      default: break;
    }
  }
  return poses;
}

RigidTransform object_pose(const KinematicModel& model, const JointVector& q,
                           const RigidTransform& grasp_offset) {
  return forward_kinematics(model, q).hand * grasp_offset;
}

double horizontal_distance(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  return std::hypot(a.x() - b.x(), a.y() - b.y());
}

RigidTransform detail::dh_row_transform(const DHRow& row, double q) {
  return dh_transform(q + row.theta_offset, row.a, row.alpha, row.d);
}

BodyDimensions scale_from_anthropometry(double height, const SegmentRatios& ratios) {
  if (!std::isfinite(height) || height <= 0.5 || height >= 2.5) {
    throw ValidationError("scale_from_anthropometry: height must be in (0.5, 2.5) m");
  }
  if (!finite_vec(ratios.spine) || !finite_vec(ratios.humerus) || !finite_vec(ratios.radius) ||
      ratios.spine.minCoeff() < 0.0 || ratios.humerus.minCoeff() < 0.0 ||
      ratios.radius.minCoeff() < 0.0) {
    throw ValidationError("scale_from_anthropometry: ratios must be finite and non-negative");
  }
  BodyDimensions dims;
  dims.spine = ratios.spine * height;
  dims.humerus = ratios.humerus * height;
  dims.radius = ratios.radius * height;
  return dims;
}

}  // namespace remo
