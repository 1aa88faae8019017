/**
 * @file scenario.hpp
 * @brief Scenario files: subject anthropometry, impairment, optimization
 *        parameters and task description.
 *
 * Scenario files are UTF-8 JSON (conventionally *.scn). Angles are given in
 * degrees and lengths in meters; the loader converts everything to radians.
 * See docs/formats.md for the schema.
 */

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "remo/kinematics.hpp"
#include "remo/mobility.hpp"
#include "remo/optimizer.hpp"
#include "remo/trajectory.hpp"

namespace remo {

struct ScenarioSubject {
  double height_m = 1.75;
  SegmentRatios ratios;
  JointVector natural_posture = JointVector::Zero();  ///< q_n [rad]
  RoMBounds healthy;                                  ///< healthy RoM [rad]
};

struct ScenarioParameters {
  double alpha = 0.10;
  double zeta = 0.0;                    ///< [rad]
  double d_safe_th = 0.20;              ///< [m]
  double d_elbow_th = 0.25;             ///< [m]
  double dt = 1.0 / 60.0;               ///< sampling interval [s]
  double approach_duration_hp = 2.5;    ///< [s]
  double approach_duration_rp = 2.5;    ///< [s]
  double robot_motion_duration = 3.0;   ///< [s]
  int bspline_degree = 5;
};

struct ScenarioTask {
  int equality_axis = 1;                ///< 0 = x, 1 = y, 2 = z
  std::vector<double> p_task_values;    ///< equality targets [m]
  TaskSpace task_space;
  RigidTransform grasp_offset;
  Pose robot_home;                      ///< start pose of the robot handover motion
  double passer_shoulder_forward = 1.10;///< passer heuristic: shoulder x offset [m]
  double chest_height_ratio = 0.72;     ///< passer heuristic: delivery height / subject height
};

struct Scenario {
  std::string name;
  ScenarioSubject subject;
  JointVector impairment_weights = JointVector::Zero();
  bool impairment_defaulted = false;  ///< no impairment block in the file
  ScenarioParameters parameters;
  ScenarioTask task;
  std::uint64_t seed = 0;

  ImpairmentModel impairment() const { return ImpairmentModel(impairment_weights); }
  KinematicModel model() const {
    return build_model(scale_from_anthropometry(subject.height_m, subject.ratios));
  }
  /// Indices of fully blocked joints (weight == 1).
  std::vector<int> blocked_joints() const;
};

/// Built-in healthy range-of-motion table [deg], used when a scenario omits it.
RoMBounds default_healthy_rom();

/// Loads and fully validates a scenario file. Degrees are converted to
/// radians here. Throws ValidationError (schema or value problems, naming the
/// offending field) or IoError (unreadable file).
Scenario load_scenario(const std::string& path);

/// Same, but from an in-memory JSON string; `name` labels error messages.
Scenario parse_scenario(const std::string& json_text, const std::string& name);

}  // namespace remo
