/**
 * @file types.hpp
 * @brief Core value types shared across the library: joint vectors, rigid
 *        transforms and angle-unit helpers.
 */

#pragma once

#include <Eigen/Dense>
#include <cmath>

namespace remo {

/// Number of degrees of freedom of the trunk+arm chain.
inline constexpr int kNumJoints = 8;

/// Joint angles in radians, ordered q1..q8:
/// spine flex/ext, shoulder abd/add, shoulder flex/ext, shoulder int/ext
/// rotation, elbow flex/ext, forearm pronation/supination, wrist flex/ext,
/// wrist ulnar/radial deviation.
using JointVector = Eigen::Matrix<double, kNumJoints, 1>;

inline constexpr double kPi = 3.14159265358979323846;

inline double deg_to_rad(double deg) { return deg * (kPi / 180.0); }
inline double rad_to_deg(double rad) { return rad * (180.0 / kPi); }

inline JointVector deg_to_rad(const JointVector& deg) { return deg * (kPi / 180.0); }
inline JointVector rad_to_deg(const JointVector& rad) { return rad * (180.0 / kPi); }

/**
 * @brief Proper rigid-body transform: orthonormal rotation plus translation.
 *
 * Composition follows the usual convention: (a * b) maps a point p to
 * a.rotation * (b.rotation * p + b.translation) + a.translation.
 */
struct RigidTransform {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  static RigidTransform identity() { return {}; }

  RigidTransform operator*(const RigidTransform& other) const {
    return {rotation * other.rotation, rotation * other.translation + translation};
  }

  Eigen::Vector3d apply(const Eigen::Vector3d& p) const {
    return rotation * p + translation;
  }

  /// Max deviation of R^T R from identity plus det error; 0 for a clean rotation.
  double orthonormality_error() const {
    const Eigen::Matrix3d e = rotation.transpose() * rotation - Eigen::Matrix3d::Identity();
    return std::max(e.cwiseAbs().maxCoeff(), std::abs(rotation.determinant() - 1.0));
  }
};

}  // namespace remo
