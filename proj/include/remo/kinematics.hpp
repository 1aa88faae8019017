/**
 * @file kinematics.hpp
 * @brief 8-DoF trunk+arm kinematic chain of the prosthesis-user model.
 *
 * The chain is described by standard (distal) Denavit-Hartenberg rows,
 * one per joint: spine flexion, the spherical shoulder (abduction/adduction,
 * flexion/extension, internal/external rotation), elbow flexion and forearm
 * pronation, and the condyloid wrist (flexion/extension, ulnar/radial
 * deviation). Segment lengths enter the table as signed axis components of
 * the spine, humerus and radius links.
 *
 * World frame: pelvis at the origin, +z vertical, the user facing +x,
 * +y to the user's left. At the natural posture (elbow flexed 90 degrees,
 * everything else zero) the trunk is upright and the forearm points
 * forward along +x.
 */

#pragma once

#include <array>

#include "remo/types.hpp"

namespace remo {

/// Per-segment length components in meters, indexed by the segment's local
/// x/y/z axes as they appear in the DH table. Dominant components carry the
/// anatomical segment lengths; the remaining entries are small offsets that
/// default to zero.
struct BodyDimensions {
  Eigen::Vector3d spine = Eigen::Vector3d::Zero();
  Eigen::Vector3d humerus = Eigen::Vector3d::Zero();
  Eigen::Vector3d radius = Eigen::Vector3d::Zero();
};

/// One standard-DH row: A(q) = Rz(q + theta_offset) * Tz(d) * Tx(a) * Rx(alpha).
struct DHRow {
  double theta_offset = 0.0;  ///< constant added to the joint angle [rad]
  double a = 0.0;             ///< link length along x [m]
  double alpha = 0.0;         ///< link twist about x [rad]
  double d = 0.0;             ///< link offset along z [m]
  int joint_index = 0;        ///< 1-based joint index driving this row
};

/// Named landmark poses of the chain, all expressed in the world frame.
struct SegmentPoses {
  RigidTransform pelvis;
  RigidTransform spine;
  RigidTransform shoulder;
  RigidTransform elbow;
  RigidTransform wrist;
  RigidTransform hand;
};

/// Immutable trunk+arm model. Construct via build_model(); all member data
/// is fixed afterwards, so instances are safe to share across threads.
class KinematicModel {
 public:
  const std::array<DHRow, kNumJoints>& rows() const { return rows_; }
  const BodyDimensions& dimensions() const { return dims_; }

  /// Fixed rotation from the DH base frame to the world frame.
  static Eigen::Matrix3d base_alignment();

  /// Upper bound on the chain length; Lipschitz constant for positions w.r.t. q.
  double total_length() const { return total_length_; }

 private:
  friend KinematicModel build_model(const BodyDimensions& dims);
  std::array<DHRow, kNumJoints> rows_{};
  BodyDimensions dims_;
  double total_length_ = 0.0;
};

/// Builds the 8-row DH model for the given segment dimensions.
/// Throws ValidationError on non-finite or negative components.
KinematicModel build_model(const BodyDimensions& dims);

/// Chains the DH transforms for the given joint angles and returns the named
/// landmark poses in the world frame. Pure function.
SegmentPoses forward_kinematics(const KinematicModel& model, const JointVector& q);

/// Pose of the grasped object: hand pose composed with the grasp offset.
RigidTransform object_pose(const KinematicModel& model, const JointVector& q,
                           const RigidTransform& grasp_offset);

/// Euclidean distance between the ground-plane (z dropped) projections of two points.
double horizontal_distance(const Eigen::Vector3d& a, const Eigen::Vector3d& b);

/// Segment-length ratios relative to subject height. Dominant entries default
/// to classic anthropometric table values; non-dominant offsets default to zero
/// because the source model does not specify their magnitudes.
struct SegmentRatios {
  Eigen::Vector3d spine{0.288, 0.0, 0.0};
  Eigen::Vector3d humerus{0.0, 0.186, 0.0};
  Eigen::Vector3d radius{0.146, 0.0, 0.0};
  /// Pelvis height above the floor as a fraction of body height; used by the
  /// harness to convert floor-referenced heights into the pelvis frame.
  double pelvis_height = 0.530;
};

/// Scales the ratio table by the subject height (meters).
/// Throws ValidationError for heights outside (0.5, 2.5) m or negative ratios.
BodyDimensions scale_from_anthropometry(double height, const SegmentRatios& ratios = {});

namespace detail {
/// Transform of a single DH row at joint angle q. Building block behind
/// forward_kinematics, shared with the solver's incremental Jacobians.
RigidTransform dh_row_transform(const DHRow& row, double q);
}  // namespace detail

}  // namespace remo
