/**
 * @file metrics.hpp
 * @brief Evaluation metrics over joint trajectories: task duration, mean
 *        compensation cost, interaction cost, jerk cost and wrist excursions.
 */

#pragma once

#include <vector>

#include "remo/mobility.hpp"
#include "remo/trajectory.hpp"
#include "remo/types.hpp"

namespace remo {

/// Metric values of one approach trajectory.
struct MetricReport {
  double duration = 0.0;                ///< T_f [s]
  double psi_bar = 0.0;                 ///< mean compensation cost over the approach
  double psi_interaction = 0.0;         ///< compensation cost at the final pose
  double jerk = 0.0;                    ///< integrated squared joint jerk [rad^2/s^5]
  double wrist_excursion_max_deg = 0.0; ///< peak blocked-joint deviation [deg]
  std::size_t sample_count = 0;         ///< K_f
};

/// Percent change of one metric; undefined when the baseline is zero.
struct PercentChange {
  double percent = 0.0;
  bool defined = false;
};

/// Per-metric percent changes of condition B against baseline A.
struct ComparisonRow {
  PercentChange duration;
  PercentChange psi_bar;
  PercentChange psi_interaction;
  PercentChange jerk;
  PercentChange wrist_excursion;
};

struct ComparisonSummary {
  std::vector<ComparisonRow> per_scenario;
  ComparisonRow mean;  ///< mean over scenarios with a defined baseline
};

/// Mean of the compensation cost over all samples (Eq. of the running cost
/// averaged over the approach). Throws ValidationError on an empty trajectory.
double mean_compensation_cost(const JointTrajectory& traj, const JointVector& q_natural,
                              const ImpairmentModel& w);

/// Integrated squared joint jerk: dt * sum_k ||qdddot[k]||^2. Jerk is obtained
/// by numerically differentiating velocity, which itself comes from
/// differentiating the samples: central differences at interior points,
/// third-order one-sided stencils at the boundaries. Requires >= 4 samples.
double jerk_cost(const JointTrajectory& traj);

/// Compensation cost of the final (interaction) pose; same formula as
/// compensation_cost.
double interaction_cost(const JointVector& q_final, const JointVector& q_natural,
                        const ImpairmentModel& w);

/// Peak deviation norm of the blocked joints from the reference posture,
/// reported in degrees. Throws ValidationError when blocked_indices is empty
/// or out of range.
double wrist_excursion(const JointTrajectory& traj, const JointVector& q_ref,
                       const std::vector<int>& blocked_indices);

/// Percent change of condition B against baseline A, per scenario and
/// averaged. Lists must be non-empty and of equal length (same scenario order).
ComparisonSummary compare_conditions(const std::vector<MetricReport>& a,
                                     const std::vector<MetricReport>& b);

/// Differentiates a sampled series: central differences inside, third-order
/// one-sided stencils at the ends. Exposed for reuse by ingestion utilities.
std::vector<double> differentiate_series(const std::vector<double>& x, double dt);

}  // namespace remo
