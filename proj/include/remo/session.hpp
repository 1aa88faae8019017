/**
 * @file session.hpp
 * @brief Simulated handover sessions, motion-log ingestion and file exports.
 */

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "remo/metrics.hpp"
#include "remo/optimizer.hpp"
#include "remo/scenario.hpp"
#include "remo/trajectory.hpp"

namespace remo {

enum class Condition { HumanPasser, RobotPasser };

std::string to_string(Condition c);
Condition condition_from_string(const std::string& s);

/// Outcome of one handover at one p_task value.
struct SessionEntry {
  Condition condition = Condition::RobotPasser;
  double p_task = 0.0;
  bool converged = false;
  std::string failure;                 ///< empty unless the solve failed
  OptimizationResult solution;
  Eigen::Vector3d handover_position = Eigen::Vector3d::Zero();  ///< where the object waits
  CartesianTrajectory robot_motion;    ///< robot handover motion (RP only)
  bool has_robot_motion = false;
  JointTrajectory approach;            ///< simulated user approach
  MetricReport metrics;
};

struct SessionReport {
  Scenario scenario;
  std::vector<SessionEntry> hp_entries;
  std::vector<SessionEntry> rp_entries;
  std::optional<ComparisonSummary> comparison;  ///< RP vs HP, converged entries

  bool any_converged() const;
};

/// Runs one condition of the scenario: for every p_task value, chooses the
/// handover pose (constrained optimization for the robot passer, the passer
/// heuristic plus inverse kinematics for the human passer), synthesizes the
/// user approach and computes metrics. Deterministic under the scenario seed.
SessionReport run_session(const Scenario& scenario, Condition condition);

/// Merges an HP and an RP report of the same scenario; fills `comparison`
/// over the p_task values where both conditions converged.
SessionReport combine_sessions(const SessionReport& hp, const SessionReport& rp);

/// Reads a motion-log CSV (header `time_s,q1_deg,...,q8_deg`), validates it
/// and returns a uniform trajectory at spacing dt. Non-uniform input is
/// linearly resampled (flagged in the result). Throws ValidationError with
/// the offending row number, or IoError.
JointTrajectory ingest_motion_log(const std::string& path, double dt);

/// Writes a trajectory as a motion-log CSV. Degree values are chosen so the
/// radian samples survive the file round trip bit-exactly where possible.
void write_motion_log(const JointTrajectory& traj, const std::string& path);

/// Writes per-sample skeleton landmark positions plus joint angles for every
/// session entry. Column order is documented in docs/formats.md.
void export_frames(const SessionReport& report, const std::string& path);

/// Serializes the report as deterministic JSON text.
std::string report_to_json(const SessionReport& report);

/// Writes report_to_json to a file. Throws IoError on failure.
void write_report(const SessionReport& report, const std::string& path);

/// Reads back the per-entry metric lists of a report file (for `compare`).
struct LoadedReport {
  std::string scenario_name;
  std::vector<double> p_task_values;
  std::vector<MetricReport> hp_metrics;
  std::vector<MetricReport> rp_metrics;
};
LoadedReport load_report(const std::string& path);

}  // namespace remo
