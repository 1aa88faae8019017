/**
 * @file optimizer.hpp
 * @brief Constrained posture optimization.
 *
 * solve_posture() minimizes the posture objective subject to the impaired
 * range of motion, the robot task-space region, a single-coordinate equality
 * on the object position and two horizontal safety distances. The solver is
 * an augmented-Lagrangian method: inequality constraints enter through
 * slack-free max(0,.)^2 augmented terms, multipliers are updated after each
 * inner solve, and the inner subproblems are handled by a bound-projected
 * quasi-Newton descent with a safeguarded backtracking line search. Bounds
 * are enforced exactly by projection.
 *
 * multi_start_oracle() is an independent cross-check: a plain quadratic
 * penalty method driven by projected Barzilai-Borwein gradient descent from
 * many start points. It shares no solver code with solve_posture().
 */

#pragma once

#include <cstdint>
#include <limits>

#include "remo/kinematics.hpp"
#include "remo/mobility.hpp"
#include "remo/types.hpp"

namespace remo {

/// Reachable region for the handover object: a sphere around the robot base,
/// optionally intersected with an axis-aligned workspace box.
struct TaskSpace {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();  ///< robot base [m]
  double radius = 0.85;                              ///< sphere radius [m]
  bool has_box = false;
  Eigen::Vector3d box_min = Eigen::Vector3d::Zero();
  Eigen::Vector3d box_max = Eigen::Vector3d::Zero();

  /// Throws ValidationError unless the region has positive volume.
  void validate() const;

  /// Signed distance to the region boundary; <= 0 inside.
  double signed_distance(const Eigen::Vector3d& p) const;

  /// True when the plane {coordinate axis == value} intersects the region.
  bool intersects_plane(int axis, double value) const;
};

/// Task-side constraints of one handover solve.
struct TaskConstraints {
  TaskSpace task_space;
  int equality_axis = 1;    ///< 0 = x, 1 = y, 2 = z
  double p_task = 0.0;      ///< required object coordinate on equality_axis [m]
  double d_safe_th = 0.0;   ///< min horizontal object-to-pelvis distance [m]
  double d_elbow_th = 0.0;  ///< min horizontal elbow-to-pelvis distance [m]

  /// Throws ValidationError on negative thresholds, bad axis, or an equality
  /// plane that misses the task space.
  void validate() const;
};

/// Residuals of every constraint family at a posture. Sign convention:
/// <= 0 means satisfied (the equality is satisfied when |residual| is small).
struct ConstraintReport {
  JointVector bound_violation = JointVector::Zero();  ///< max(q - hi, lo - q) [rad]
  double task_space_distance = 0.0;                   ///< signed distance [m]
  double equality_residual = 0.0;                     ///< p_obj - p_task [m]
  double safety_deficit = 0.0;                        ///< d_safe_th - d_obj [m]
  double elbow_deficit = 0.0;                         ///< d_elbow_th - d_elbow [m]

  /// Largest violation across all families (0 when feasible).
  double max_violation() const;
  bool feasible(double tol) const { return max_violation() <= tol; }
};

struct OptimizationResult {
  JointVector q_star = JointVector::Zero();
  double objective_value = std::numeric_limits<double>::infinity();
  ConstraintReport constraint_report;
  bool converged = false;
  int iterations = 0;   ///< outer iterations of the winning start
  int starts_used = 0;
  /// For inverse-kinematics solves: distance between the achieved object
  /// position and the target (meaningful when not converged).
  double closest_approach = std::numeric_limits<double>::quiet_NaN();
};

struct SolverOptions {
  double feasibility_tol = 1e-6;   ///< outer tolerance on constraint residuals
  double stationarity_tol = 1e-8;  ///< inner tolerance on the projected gradient
  int max_outer = 50;
  int max_inner = 400;
  int extra_starts = 6;            ///< sampled starts tried after q_m and q_n
  std::uint64_t seed = 0;
  double fd_step = 1e-7;           ///< central-difference step on FK [rad]
};

/// Solves the constrained posture optimization. Deterministic for identical
/// inputs and seed. A result with converged == false carries the best attempt
/// and its residuals.
OptimizationResult solve_posture(const KinematicModel& model, const PostureContext& ctx,
                                 const ImpairmentModel& w, const RoMBounds& healthy,
                                 const TaskConstraints& tc, const RigidTransform& grasp_offset,
                                 const SolverOptions& opts = {});

/// Independent verification oracle: quadratic-penalty descent from n_starts
/// uniform samples in the impaired bounds plus q_m and q_n. Returns the best
/// feasible result; deterministic under a fixed seed.
OptimizationResult multi_start_oracle(const KinematicModel& model, const PostureContext& ctx,
                                      const ImpairmentModel& w, const RoMBounds& healthy,
                                      const TaskConstraints& tc, const RigidTransform& grasp_offset,
                                      int n_starts, std::uint64_t seed,
                                      const SolverOptions& opts = {});

/// Evaluates all constraint residuals at q; pure function, exactly the checks
/// used by solve_posture.
ConstraintReport constraint_residuals(const KinematicModel& model, const JointVector& q,
                                      const RoMBounds& bounds, const TaskConstraints& tc,
                                      const RigidTransform& grasp_offset);

/// Posture for reaching a fixed object position chosen by someone else (the
/// human-passer baseline): minimizes the posture objective subject to the
/// impaired bounds and the three-coordinate equality x_obj(q) == target.
/// An unreachable target yields converged == false with closest_approach set.
OptimizationResult resolve_ik_posture(const KinematicModel& model,
                                      const Eigen::Vector3d& target_object_position,
                                      const ImpairmentModel& w, const RoMBounds& healthy,
                                      const PostureContext& ctx, const RigidTransform& grasp_offset,
                                      const SolverOptions& opts = {});

}  // namespace remo
