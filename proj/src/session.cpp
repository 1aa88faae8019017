#include "remo/session.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "remo/errors.hpp"

namespace remo {

namespace {

using nlohmann::ordered_json;

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

/// Degree value whose parse-back via deg * (pi/180) reproduces `rad` exactly
/// when such a double exists nearby; keeps file round trips bit-faithful.
double degrees_for_roundtrip(double rad) {
  const double c = kPi / 180.0;
  double deg = rad / c;
  if (deg * c == rad) return deg;
  double up = deg, down = deg;
  for (int k = 0; k < 4; ++k) {
    up = std::nextafter(up, std::numeric_limits<double>::infinity());
    if (up * c == rad) return up;
    down = std::nextafter(down, -std::numeric_limits<double>::infinity());
    if (down * c == rad) return down;
  }
  return deg;
}

Eigen::Quaterniond hand_orientation(const KinematicModel& model, const JointVector& q,
                                    const RigidTransform& grasp) {
  const RigidTransform pose = object_pose(model, q, grasp);
  return Eigen::Quaterniond(pose.rotation);
}

MetricReport compute_metrics(const JointTrajectory& approach, const Scenario& sc,
                             const ImpairmentModel& w, const JointVector& q_ref,
                             const std::vector<int>& blocked) {
  MetricReport m;
  m.duration = approach.duration();
  m.sample_count = approach.size();
  m.psi_bar = mean_compensation_cost(approach, sc.subject.natural_posture, w);
  m.psi_interaction =
      interaction_cost(approach.samples.back(), sc.subject.natural_posture, w);
  m.jerk = approach.size() >= 4 ? jerk_cost(approach) : 0.0;
  m.wrist_excursion_max_deg =
      blocked.empty() ? 0.0 : wrist_excursion(approach, q_ref, blocked);
  return m;
}

}  // namespace

std::string to_string(Condition c) {
  return c == Condition::HumanPasser ? "HP" : "RP";
}

Condition condition_from_string(const std::string& s) {
  if (s == "HP" || s == "hp") return Condition::HumanPasser;
  if (s == "RP" || s == "rp") return Condition::RobotPasser;
  throw ValidationError("unknown condition '" + s + "' (expected HP or RP)");
}

bool SessionReport::any_converged() const {
  const auto pred = [](const SessionEntry& e) { return e.converged; };
  return std::any_of(hp_entries.begin(), hp_entries.end(), pred) ||
         std::any_of(rp_entries.begin(), rp_entries.end(), pred);
}

SessionReport run_session(const Scenario& scenario, Condition condition) {
  SessionReport report;
  report.scenario = scenario;

  const KinematicModel model = scenario.model();
  const ImpairmentModel w = scenario.impairment();
  const std::vector<int> blocked = scenario.blocked_joints();
  const ScenarioParameters& par = scenario.parameters;

  PostureContext ctx;
  ctx.q_measured = scenario.subject.natural_posture;  // user at rest before the handover
  ctx.q_natural = scenario.subject.natural_posture;
  ctx.alpha = par.alpha;
  ctx.zeta = par.zeta;

  auto& entries = condition == Condition::HumanPasser ? report.hp_entries : report.rp_entries;
  for (std::size_t i = 0; i < scenario.task.p_task_values.size(); ++i) {
    const double p_task = scenario.task.p_task_values[i];
    SessionEntry entry;
    entry.condition = condition;
    entry.p_task = p_task;

    SolverOptions opts;
    opts.seed = scenario.seed + i;

    if (condition == Condition::RobotPasser) {
      TaskConstraints tc{scenario.task.task_space, scenario.task.equality_axis, p_task,
                         par.d_safe_th, par.d_elbow_th};
      entry.solution = solve_posture(model, ctx, w, scenario.subject.healthy, tc,
                                     scenario.task.grasp_offset, opts);
      if (entry.solution.converged) {
        entry.handover_position =
            object_pose(model, entry.solution.q_star, scenario.task.grasp_offset).translation;
        Pose goal;
        goal.position = entry.handover_position;
        goal.orientation = hand_orientation(model, entry.solution.q_star, scenario.task.grasp_offset);
        entry.robot_motion = plan_bspline(scenario.task.robot_home, goal,
                                          par.robot_motion_duration, par.bspline_degree);
        entry.has_robot_motion = true;
      }
    } else {
      // Passer heuristic: midway between the passer's shoulder and the user's
      // pelvis, at the commanded lateral offset and standing chest height.
      Eigen::Vector3d target;
      target.x() = 0.5 * scenario.task.passer_shoulder_forward;
      target.y() = p_task;
      target.z() = (scenario.task.chest_height_ratio - scenario.subject.ratios.pelvis_height) *
                   scenario.subject.height_m;
      entry.handover_position = target;
      entry.solution = resolve_ik_posture(model, target, w, scenario.subject.healthy, ctx,
                                          scenario.task.grasp_offset, opts);
    }

    entry.converged = entry.solution.converged;
    if (entry.converged) {
      const double duration = condition == Condition::HumanPasser ? par.approach_duration_hp
                                                                  : par.approach_duration_rp;
      entry.approach =
          min_jerk_joint_motion(ctx.q_measured, entry.solution.q_star, duration, par.dt);
      entry.metrics = compute_metrics(entry.approach, scenario, w, ctx.q_measured, blocked);
    } else {
      std::ostringstream msg;
      msg << "no feasible posture (max violation "
          << entry.solution.constraint_report.max_violation();
      if (condition == Condition::HumanPasser && std::isfinite(entry.solution.closest_approach)) {
        msg << ", closest approach " << entry.solution.closest_approach << " m";
      }
      msg << ")";
      entry.failure = msg.str();
    }
    entries.push_back(std::move(entry));
  }
  return report;
}

SessionReport combine_sessions(const SessionReport& hp, const SessionReport& rp) {
  if (hp.scenario.name != rp.scenario.name ||
      hp.scenario.task.p_task_values != rp.scenario.task.p_task_values) {
    throw ValidationError("combine_sessions: reports come from different scenarios");
  }
  SessionReport merged;
  merged.scenario = hp.scenario;
  merged.hp_entries = hp.hp_entries;
  merged.rp_entries = rp.rp_entries;

  std::vector<MetricReport> a, b;
  for (std::size_t i = 0; i < merged.hp_entries.size() && i < merged.rp_entries.size(); ++i) {
    if (merged.hp_entries[i].converged && merged.rp_entries[i].converged) {
      a.push_back(merged.hp_entries[i].metrics);
      b.push_back(merged.rp_entries[i].metrics);
    }
  }
  if (!a.empty()) {
    merged.comparison = compare_conditions(a, b);
  }
  return merged;
}

// ---------------------------------------------------------------------------
// Motion logs
// ---------------------------------------------------------------------------

namespace {

constexpr const char* kMotionLogHeader =
    "time_s,q1_deg,q2_deg,q3_deg,q4_deg,q5_deg,q6_deg,q7_deg,q8_deg";

double parse_double(const std::string& token, std::size_t row, const std::string& path) {
  double value = 0.0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc() || res.ptr != end) {
    throw ValidationError("motion log '" + path + "' row " + std::to_string(row) +
                          ": cannot parse number '" + token + "'");
  }
  if (!std::isfinite(value)) {
    throw ValidationError("motion log '" + path + "' row " + std::to_string(row) +
                          ": non-finite entry");
  }
  return value;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string token;
  std::istringstream ss(line);
  while (std::getline(ss, token, ',')) {
    // trim surrounding whitespace
    const auto first = token.find_first_not_of(" \t\r");
    const auto last = token.find_last_not_of(" \t\r");
    out.push_back(first == std::string::npos ? "" : token.substr(first, last - first + 1));
  }
  return out;
}

}  // namespace

JointTrajectory ingest_motion_log(const std::string& path, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw ValidationError("ingest_motion_log: dt must be positive");
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open motion log: " + path);

  std::string line;
  if (!std::getline(in, line)) {
    throw ValidationError("motion log '" + path + "': empty file");
  }
  const auto header = split_csv(line);
  const auto expected = split_csv(kMotionLogHeader);
  if (header != expected) {
    throw ValidationError("motion log '" + path + "' row 1: header must be '" +
                          std::string(kMotionLogHeader) + "'");
  }

  std::vector<double> times;
  std::vector<JointVector> samples;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto tokens = split_csv(line);
    if (tokens.size() != 9) {
      throw ValidationError("motion log '" + path + "' row " + std::to_string(row) +
                            ": expected 9 columns, got " + std::to_string(tokens.size()));
    }
    const double t = parse_double(tokens[0], row, path);
    if (!times.empty() && t <= times.back()) {
      throw ValidationError("motion log '" + path + "' row " + std::to_string(row) +
                            ": non-monotone time");
    }
    JointVector q;
    for (int j = 0; j < kNumJoints; ++j) {
      q[j] = deg_to_rad(parse_double(tokens[static_cast<std::size_t>(j) + 1], row, path));
    }
    times.push_back(t);
    samples.push_back(q);
  }
  if (samples.size() < 2) {
    throw ValidationError("motion log '" + path + "': at least 2 samples required");
  }

  // Uniformity check on the native spacing.
  const double native = times[1] - times[0];
  bool uniform = true;
  for (std::size_t k = 1; k + 1 < times.size(); ++k) {
    if (std::abs((times[k + 1] - times[k]) - native) > 1e-9 * std::max(1.0, native)) {
      uniform = false;
      break;
    }
  }

  JointTrajectory traj;
  if (uniform) {
    traj.dt = std::abs(native - dt) <= 1e-9 * dt ? dt : native;
    traj.samples = std::move(samples);
    return traj;
  }

  // Linear resampling onto a uniform grid at dt.
  traj.dt = dt;
  traj.resampled = true;
  const double t0 = times.front();
  const double span = times.back() - t0;
  const std::size_t count = static_cast<std::size_t>(std::floor(span / dt + 1e-9)) + 1;
  traj.samples.reserve(count);
  std::size_t seg = 0;
  for (std::size_t k = 0; k < count; ++k) {
    const double t = t0 + static_cast<double>(k) * dt;
    while (seg + 2 < times.size() && times[seg + 1] < t) ++seg;
    const double t_a = times[seg], t_b = times[seg + 1];
    const double u = std::clamp((t - t_a) / (t_b - t_a), 0.0, 1.0);
    traj.samples.push_back(samples[seg] + u * (samples[seg + 1] - samples[seg]));
  }
  return traj;
}

void write_motion_log(const JointTrajectory& traj, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write motion log: " + path);
  out << kMotionLogHeader << "\n";
  for (std::size_t k = 0; k < traj.samples.size(); ++k) {
    out << format_double(static_cast<double>(k) * traj.dt);
    for (int j = 0; j < kNumJoints; ++j) {
      out << ',' << format_double(degrees_for_roundtrip(traj.samples[k][j]));
    }
    out << "\n";
  }
  if (!out) throw IoError("failed while writing motion log: " + path);
}

// ---------------------------------------------------------------------------
// Frame export
// ---------------------------------------------------------------------------

void export_frames(const SessionReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write frame export: " + path);

  out << "condition,p_task_m,t_s";
  for (int j = 1; j <= kNumJoints; ++j) out << ",q" << j << "_deg";
  for (const char* lm : {"pelvis", "spine", "shoulder", "elbow", "wrist", "hand", "object"}) {
    out << ',' << lm << "_x" << ',' << lm << "_y" << ',' << lm << "_z";
  }
  out << "\n";

  const KinematicModel model = report.scenario.model();
  const RigidTransform& grasp = report.scenario.task.grasp_offset;

  auto dump_entries = [&](const std::vector<SessionEntry>& entries) {
    for (const SessionEntry& entry : entries) {
      for (std::size_t k = 0; k < entry.approach.samples.size(); ++k) {
        const JointVector& q = entry.approach.samples[k];
        out << to_string(entry.condition) << ',' << format_double(entry.p_task) << ','
            << format_double(static_cast<double>(k) * entry.approach.dt);
        for (int j = 0; j < kNumJoints; ++j) {
          out << ',' << format_double(degrees_for_roundtrip(q[j]));
        }
        const SegmentPoses poses = forward_kinematics(model, q);
        const Eigen::Vector3d object = (poses.hand * grasp).translation;
        for (const Eigen::Vector3d& p :
             {poses.pelvis.translation, poses.spine.translation, poses.shoulder.translation,
              poses.elbow.translation, poses.wrist.translation, poses.hand.translation, object}) {
          out << ',' << format_double(p.x()) << ',' << format_double(p.y()) << ','
              << format_double(p.z());
        }
        out << "\n";
      }
    }
  };
  dump_entries(report.hp_entries);
  dump_entries(report.rp_entries);
  if (!out) throw IoError("failed while writing frame export: " + path);
}

// ---------------------------------------------------------------------------
// Report serialization
// ---------------------------------------------------------------------------

namespace {

ordered_json json_joint_deg(const JointVector& q) {
  ordered_json arr = ordered_json::array();
  for (int i = 0; i < kNumJoints; ++i) arr.push_back(rad_to_deg(q[i]));
  return arr;
}

ordered_json json_vec3(const Eigen::Vector3d& v) {
  return ordered_json::array({v.x(), v.y(), v.z()});
}

ordered_json json_percent(const PercentChange& pc) {
  if (!pc.defined) return nullptr;
  return pc.percent;
}

ordered_json json_metrics(const MetricReport& m) {
  ordered_json j;
  j["duration_s"] = m.duration;
  j["psi_bar"] = m.psi_bar;
  j["psi_interaction"] = m.psi_interaction;
  j["jerk"] = m.jerk;
  j["wrist_excursion_max_deg"] = m.wrist_excursion_max_deg;
  j["samples"] = m.sample_count;
  return j;
}

ordered_json json_comparison_row(const ComparisonRow& row) {
  ordered_json j;
  j["duration_s"] = json_percent(row.duration);
  j["psi_bar"] = json_percent(row.psi_bar);
  j["psi_interaction"] = json_percent(row.psi_interaction);
  j["jerk"] = json_percent(row.jerk);
  j["wrist_excursion"] = json_percent(row.wrist_excursion);
  return j;
}

ordered_json json_entry(const SessionEntry& e) {
  ordered_json j;
  j["condition"] = to_string(e.condition);
  j["p_task_m"] = e.p_task;
  j["converged"] = e.converged;
  if (!e.failure.empty()) j["failure"] = e.failure;
  j["q_star_deg"] = json_joint_deg(e.solution.q_star);
  j["objective"] = e.solution.objective_value;
  j["psi_star"] = e.converged ? ordered_json(e.metrics.psi_interaction) : ordered_json(nullptr);
  const ConstraintReport& r = e.solution.constraint_report;
  ordered_json res;
  {
    ordered_json bounds = ordered_json::array();
    for (int i = 0; i < kNumJoints; ++i) bounds.push_back(r.bound_violation[i]);
    res["bound_violation_rad"] = bounds;
  }
  res["task_space_distance_m"] = r.task_space_distance;
  res["equality_residual_m"] = r.equality_residual;
  res["safety_deficit_m"] = r.safety_deficit;
  res["elbow_deficit_m"] = r.elbow_deficit;
  res["max_violation"] = r.max_violation();
  j["residuals"] = res;
  j["iterations"] = e.solution.iterations;
  j["starts_used"] = e.solution.starts_used;
  j["handover_position_m"] = json_vec3(e.handover_position);
  if (e.has_robot_motion) {
    ordered_json rm;
    rm["degree"] = e.robot_motion.degree();
    rm["duration_s"] = e.robot_motion.duration();
    ordered_json pts = ordered_json::array();
    for (const Pose& p : e.robot_motion.control_poses()) {
      ordered_json cp;
      cp["position_m"] = json_vec3(p.position);
      cp["quaternion_wxyz"] = ordered_json::array(
          {p.orientation.w(), p.orientation.x(), p.orientation.y(), p.orientation.z()});
      pts.push_back(cp);
    }
    rm["control_poses"] = pts;
    j["robot_motion"] = rm;
  }
  if (e.converged) {
    j["metrics"] = json_metrics(e.metrics);
    j["approach_samples"] = e.approach.size();
    j["approach_dt_s"] = e.approach.dt;
  }
  return j;
}

MetricReport metrics_from_json(const nlohmann::json& j) {
  MetricReport m;
  m.duration = j.at("duration_s").get<double>();
  m.psi_bar = j.at("psi_bar").get<double>();
  m.psi_interaction = j.at("psi_interaction").get<double>();
  m.jerk = j.at("jerk").get<double>();
  m.wrist_excursion_max_deg = j.at("wrist_excursion_max_deg").get<double>();
  m.sample_count = j.at("samples").get<std::size_t>();
  return m;
}

}  // namespace

std::string report_to_json(const SessionReport& report) {
  ordered_json j;
  j["scenario"] = report.scenario.name;
  j["seed"] = report.scenario.seed;
  j["subject_height_m"] = report.scenario.subject.height_m;
  ordered_json p_tasks = ordered_json::array();
  for (double v : report.scenario.task.p_task_values) p_tasks.push_back(v);
  j["p_task_m"] = p_tasks;

  ordered_json conditions;
  if (!report.hp_entries.empty()) {
    ordered_json arr = ordered_json::array();
    for (const SessionEntry& e : report.hp_entries) arr.push_back(json_entry(e));
    conditions["HP"] = arr;
  }
  if (!report.rp_entries.empty()) {
    ordered_json arr = ordered_json::array();
    for (const SessionEntry& e : report.rp_entries) arr.push_back(json_entry(e));
    conditions["RP"] = arr;
  }
  j["conditions"] = conditions;

  if (report.comparison.has_value()) {
    ordered_json cmp;
    cmp["mean"] = json_comparison_row(report.comparison->mean);
    ordered_json rows = ordered_json::array();
    for (const ComparisonRow& row : report.comparison->per_scenario) {
      rows.push_back(json_comparison_row(row));
    }
    cmp["per_task"] = rows;
    j["comparison"] = cmp;
  }
  return j.dump(2) + "\n";
}

void write_report(const SessionReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write report: " + path);
  out << report_to_json(report);
  if (!out) throw IoError("failed while writing report: " + path);
}

LoadedReport load_report(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open report: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("report '" + path + "': invalid JSON: " + e.what());
  }
  LoadedReport out;
  try {
    out.scenario_name = j.at("scenario").get<std::string>();
    for (const auto& v : j.at("p_task_m")) out.p_task_values.push_back(v.get<double>());
    const auto& conditions = j.at("conditions");
    if (conditions.contains("HP")) {
      for (const auto& e : conditions.at("HP")) {
        if (e.value("converged", false) && e.contains("metrics")) {
          out.hp_metrics.push_back(metrics_from_json(e.at("metrics")));
        }
      }
    }
    if (conditions.contains("RP")) {
      for (const auto& e : conditions.at("RP")) {
        if (e.value("converged", false) && e.contains("metrics")) {
          out.rp_metrics.push_back(metrics_from_json(e.at("metrics")));
        }
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("report '" + path + "': missing field: " + e.what());
  }
  return out;
}

}  // namespace remo
