/**
 * @file mobility.hpp
 * @brief Impairment weighting, impaired range-of-motion and the posture
 *        optimization objective.
 *
 * The impairment model is a diagonal weight per joint in [0, 1]: 1 marks a
 * complete functional loss, 0 a fully healthy joint, intermediate values a
 * partial loss (fraction of mobility lost). The compensation cost is the
 * squared deviation of the functioning joints from a natural posture,
 * weighted by the complement of the impairment.
 */

#pragma once

#include <array>

#include "remo/types.hpp"

namespace remo {

/// Diagonal impairment weights w_i in [0, 1] per joint.
class ImpairmentModel {
 public:
  ImpairmentModel();  ///< all joints healthy (weights zero)
  explicit ImpairmentModel(const JointVector& weights);

  const JointVector& weights() const { return weights_; }
  /// Complementary weights (1 - w_i), the mobility retained per joint.
  const JointVector& complement() const { return complement_; }

  bool any_fully_blocked() const { return weights_.maxCoeff() >= 1.0; }

 private:
  JointVector weights_;
  JointVector complement_;
};

/// Per-joint feasible angle intervals [rad].
struct RoMBounds {
  JointVector q_min;
  JointVector q_max;

  /// Throws ValidationError unless q_min <= q_max componentwise and finite.
  void validate() const;
  bool contains(const JointVector& q, double tol = 0.0) const;
  JointVector clamp(const JointVector& q) const;
};

/// Inputs of one posture optimization: measured posture, natural posture and
/// the trade-off parameters.
struct PostureContext {
  JointVector q_measured;   ///< current measured posture q_m
  JointVector q_natural;    ///< neutral, comfortable posture q_n
  double alpha = 0.10;      ///< weight of the compensation term
  double zeta = 0.0;        ///< residual adjustment range of impaired joints [rad]

  /// Throws ValidationError for negative alpha/zeta or non-finite postures.
  void validate() const;
};

/// Impaired bounds plus bookkeeping about clamping performed during the
/// computation.
struct ImpairedBounds {
  RoMBounds bounds;
  bool q_measured_clamped = false;              ///< q_m fell outside healthy range
  std::array<bool, kNumJoints> side_clamped{};  ///< interval edge clipped to healthy range
};

/// Compensation cost ||(I - W)(q - q_n)||^2 of a posture.
double compensation_cost(const JointVector& q, const JointVector& q_natural,
                         const ImpairmentModel& w);

/// Shrinks the healthy range of motion around the measured posture according
/// to the impairment weights; a joint with weight 1 keeps only [q_m +- zeta].
/// Results are clipped to the healthy range; clips are flagged in the result.
/// Throws ValidationError for negative zeta.
ImpairedBounds impaired_bounds(const RoMBounds& healthy, const ImpairmentModel& w,
                               const JointVector& q_measured, double zeta);

/// Optimization objective ||W(q - q_m)||^2 + alpha ||(I - W)(q - q_n)||^2.
double posture_objective(const JointVector& q, const PostureContext& ctx,
                         const ImpairmentModel& w);

/// Analytic gradient of posture_objective with respect to q.
JointVector posture_objective_gradient(const JointVector& q, const PostureContext& ctx,
                                       const ImpairmentModel& w);

}  // namespace remo
