#include "remo/scenario.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "remo/errors.hpp"

namespace remo {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& scenario, const std::string& field,
                       const std::string& problem) {
  throw ValidationError("scenario '" + scenario + "': field '" + field + "': " + problem);
}

double get_number(const json& j, const std::string& scenario, const std::string& field) {
  if (!j.is_number()) fail(scenario, field, "expected a number");
  return j.get<double>();
}

double number_or(const json& parent, const std::string& scenario, const std::string& key,
                 double fallback) {
  if (!parent.contains(key)) return fallback;
  return get_number(parent.at(key), scenario, key);
}

JointVector get_joint_vector(const json& j, const std::string& scenario,
                             const std::string& field) {
  if (!j.is_array() || j.size() != static_cast<std::size_t>(kNumJoints)) {
    fail(scenario, field, "expected an array of 8 numbers");
  }
  JointVector v;
  for (int i = 0; i < kNumJoints; ++i) {
    v[i] = get_number(j.at(static_cast<std::size_t>(i)), scenario, field);
  }
  return v;
}

Eigen::Vector3d get_vec3(const json& j, const std::string& scenario, const std::string& field) {
  if (!j.is_array() || j.size() != 3) fail(scenario, field, "expected an array of 3 numbers");
  Eigen::Vector3d v;
  for (int i = 0; i < 3; ++i) v[i] = get_number(j.at(static_cast<std::size_t>(i)), scenario, field);
  return v;
}

int axis_from_string(const std::string& s, const std::string& scenario, const std::string& field) {
  if (s == "x") return 0;
  if (s == "y") return 1;
  if (s == "z") return 2;
  fail(scenario, field, "expected one of \"x\", \"y\", \"z\"");
}

}  // namespace

std::vector<int> Scenario::blocked_joints() const {
  std::vector<int> out;
  for (int i = 0; i < kNumJoints; ++i) {
    if (impairment_weights[i] >= 1.0) out.push_back(i);
  }
  return out;
}

RoMBounds default_healthy_rom() {
  // Degrees; signs follow the model's joint conventions (see docs/formats.md).
  JointVector lo, hi;
  lo << -30.0, -120.0, -60.0, -90.0, 0.0, -90.0, -70.0, -35.0;
  hi << 80.0, 120.0, 150.0, 90.0, 150.0, 90.0, 75.0, 20.0;
  RoMBounds b{deg_to_rad(lo), deg_to_rad(hi)};
  return b;
}

Scenario parse_scenario(const std::string& json_text, const std::string& name) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ValidationError("scenario '" + name + "': invalid JSON: " + e.what());
  }
  if (!root.is_object()) throw ValidationError("scenario '" + name + "': expected a JSON object");

  Scenario s;
  s.name = root.value("name", name);

  // --- subject ---
  if (!root.contains("subject")) fail(s.name, "subject", "missing");
  const json& subject = root.at("subject");
  s.subject.height_m = get_number(subject.at("height_m"), s.name, "subject.height_m");
  if (subject.contains("ratios")) {
    const json& ratios = subject.at("ratios");
    if (ratios.contains("spine"))
      s.subject.ratios.spine = get_vec3(ratios.at("spine"), s.name, "subject.ratios.spine");
    if (ratios.contains("humerus"))
      s.subject.ratios.humerus = get_vec3(ratios.at("humerus"), s.name, "subject.ratios.humerus");
    if (ratios.contains("radius"))
      s.subject.ratios.radius = get_vec3(ratios.at("radius"), s.name, "subject.ratios.radius");
    s.subject.ratios.pelvis_height =
        number_or(ratios, s.name, "pelvis_height", s.subject.ratios.pelvis_height);
  }
  if (subject.contains("natural_posture_deg")) {
    s.subject.natural_posture =
        deg_to_rad(get_joint_vector(subject.at("natural_posture_deg"), s.name,
                                    "subject.natural_posture_deg"));
  } else {
    JointVector qn = JointVector::Zero();
    qn[4] = deg_to_rad(90.0);  // elbow flexed, everything else neutral
    s.subject.natural_posture = qn;
  }
  if (subject.contains("healthy_rom_deg")) {
    const json& rom = subject.at("healthy_rom_deg");
    s.subject.healthy.q_min =
        deg_to_rad(get_joint_vector(rom.at("min"), s.name, "subject.healthy_rom_deg.min"));
    s.subject.healthy.q_max =
        deg_to_rad(get_joint_vector(rom.at("max"), s.name, "subject.healthy_rom_deg.max"));
  } else {
    s.subject.healthy = default_healthy_rom();
  }

  // --- impairment ---
  if (root.contains("impairment")) {
    s.impairment_weights = get_joint_vector(root.at("impairment").at("weights"), s.name,
                                            "impairment.weights");
  } else {
    s.impairment_defaulted = true;
    std::cerr << "scenario '" << s.name
              << "': no impairment block, assuming fully healthy joints\n";
  }

  // --- parameters ---
  ScenarioParameters& p = s.parameters;
  if (root.contains("parameters")) {
    const json& par = root.at("parameters");
    p.alpha = number_or(par, s.name, "alpha", p.alpha);
    p.zeta = deg_to_rad(number_or(par, s.name, "zeta_deg", rad_to_deg(p.zeta)));
    p.d_safe_th = number_or(par, s.name, "d_safe_th_m", p.d_safe_th);
    p.d_elbow_th = number_or(par, s.name, "d_elbow_th_m", p.d_elbow_th);
    p.dt = number_or(par, s.name, "dt_s", p.dt);
    p.approach_duration_hp = number_or(par, s.name, "approach_duration_hp_s", p.approach_duration_hp);
    p.approach_duration_rp = number_or(par, s.name, "approach_duration_rp_s", p.approach_duration_rp);
    p.robot_motion_duration = number_or(par, s.name, "robot_motion_duration_s", p.robot_motion_duration);
    if (par.contains("bspline_degree")) {
      if (!par.at("bspline_degree").is_number_integer()) {
        fail(s.name, "parameters.bspline_degree", "expected an integer");
      }
      p.bspline_degree = par.at("bspline_degree").get<int>();
    }
  }

  // --- task ---
  if (!root.contains("task")) fail(s.name, "task", "missing");
  const json& task = root.at("task");
  ScenarioTask& t = s.task;
  if (task.contains("equality_axis")) {
    if (!task.at("equality_axis").is_string()) fail(s.name, "task.equality_axis", "expected a string");
    t.equality_axis = axis_from_string(task.at("equality_axis").get<std::string>(), s.name,
                                       "task.equality_axis");
  }
  if (!task.contains("p_task_m")) fail(s.name, "task.p_task_m", "missing");
  const json& ptask = task.at("p_task_m");
  if (!ptask.is_array() || ptask.empty()) fail(s.name, "task.p_task_m", "expected a non-empty array");
  for (const json& v : ptask) t.p_task_values.push_back(get_number(v, s.name, "task.p_task_m"));

  t.task_space.center = Eigen::Vector3d(0.90, -0.20, 0.0);
  if (task.contains("task_space")) {
    const json& ts = task.at("task_space");
    if (ts.contains("center_m")) t.task_space.center = get_vec3(ts.at("center_m"), s.name, "task.task_space.center_m");
    t.task_space.radius = number_or(ts, s.name, "radius_m", t.task_space.radius);
    if (ts.contains("box_min_m") != ts.contains("box_max_m")) {
      fail(s.name, "task.task_space", "box_min_m and box_max_m must appear together");
    }
    if (ts.contains("box_min_m")) {
      t.task_space.has_box = true;
      t.task_space.box_min = get_vec3(ts.at("box_min_m"), s.name, "task.task_space.box_min_m");
      t.task_space.box_max = get_vec3(ts.at("box_max_m"), s.name, "task.task_space.box_max_m");
    }
  }
  if (task.contains("grasp_offset")) {
    const json& go = task.at("grasp_offset");
    if (go.contains("translation_m")) {
      t.grasp_offset.translation = get_vec3(go.at("translation_m"), s.name, "task.grasp_offset.translation_m");
    }
    if (go.contains("quaternion_wxyz")) {
      const json& qj = go.at("quaternion_wxyz");
      if (!qj.is_array() || qj.size() != 4) fail(s.name, "task.grasp_offset.quaternion_wxyz", "expected 4 numbers");
      Eigen::Quaterniond quat(get_number(qj.at(0), s.name, "quaternion_wxyz"),
                              get_number(qj.at(1), s.name, "quaternion_wxyz"),
                              get_number(qj.at(2), s.name, "quaternion_wxyz"),
                              get_number(qj.at(3), s.name, "quaternion_wxyz"));
      if (quat.norm() < 1e-9) fail(s.name, "task.grasp_offset.quaternion_wxyz", "zero quaternion");
      quat.normalize();
      t.grasp_offset.rotation = quat.toRotationMatrix();
    }
  }
  t.robot_home.position = t.task_space.center + Eigen::Vector3d(0.0, 0.0, 0.6);
  if (task.contains("robot_home_m")) {
    t.robot_home.position = get_vec3(task.at("robot_home_m"), s.name, "task.robot_home_m");
  }
  t.passer_shoulder_forward = number_or(task, s.name, "passer_shoulder_forward_m", t.passer_shoulder_forward);
  t.chest_height_ratio = number_or(task, s.name, "chest_height_ratio", t.chest_height_ratio);

  if (root.contains("seed")) {
    if (!root.at("seed").is_number_unsigned() && !root.at("seed").is_number_integer()) {
      fail(s.name, "seed", "expected an integer");
    }
    s.seed = root.at("seed").get<std::uint64_t>();
  }

  // --- validation (throws ValidationError with field context) ---
  try {
    scale_from_anthropometry(s.subject.height_m, s.subject.ratios);
  } catch (const ValidationError& e) {
    fail(s.name, "subject", e.what());
  }
  s.subject.healthy.validate();
  if (!s.subject.healthy.contains(s.subject.natural_posture)) {
    fail(s.name, "subject.natural_posture_deg", "natural posture outside the healthy RoM");
  }
  if (!s.impairment_weights.allFinite() || s.impairment_weights.minCoeff() < 0.0 ||
      s.impairment_weights.maxCoeff() > 1.0) {
    fail(s.name, "impairment.weights", "weights must lie in [0, 1]");
  }
  if (!(p.alpha >= 0.0)) fail(s.name, "parameters.alpha", "must be >= 0");
  if (!(p.zeta >= 0.0)) fail(s.name, "parameters.zeta_deg", "must be >= 0");
  if (!(p.d_safe_th >= 0.0)) fail(s.name, "parameters.d_safe_th_m", "must be >= 0");
  if (!(p.d_elbow_th >= 0.0)) fail(s.name, "parameters.d_elbow_th_m", "must be >= 0");
  if (!(p.dt > 0.0)) fail(s.name, "parameters.dt_s", "must be > 0");
  if (!(p.approach_duration_hp > 0.0)) fail(s.name, "parameters.approach_duration_hp_s", "must be > 0");
  if (!(p.approach_duration_rp > 0.0)) fail(s.name, "parameters.approach_duration_rp_s", "must be > 0");
  if (!(p.robot_motion_duration > 0.0)) fail(s.name, "parameters.robot_motion_duration_s", "must be > 0");
  if (p.bspline_degree != 3 && p.bspline_degree != 5) {
    fail(s.name, "parameters.bspline_degree", "must be 3 or 5");
  }
  try {
    t.task_space.validate();
  } catch (const ValidationError& e) {
    fail(s.name, "task.task_space", e.what());
  }
  for (double v : t.p_task_values) {
    TaskConstraints tc{t.task_space, t.equality_axis, v, p.d_safe_th, p.d_elbow_th};
    try {
      tc.validate();
    } catch (const ValidationError& e) {
      fail(s.name, "task.p_task_m", e.what());
    }
  }
  if (!(t.passer_shoulder_forward > 0.0)) fail(s.name, "task.passer_shoulder_forward_m", "must be > 0");
  if (!(t.chest_height_ratio > 0.0) || !(t.chest_height_ratio < 1.0)) {
    fail(s.name, "task.chest_height_ratio", "must be in (0, 1)");
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string name = path;
  const std::size_t slash = name.find_last_of("/\\");
  if (slash != std::string::npos) name = name.substr(slash + 1);
  const std::size_t dot = name.find_last_of('.');
  if (dot != std::string::npos) name = name.substr(0, dot);
  return parse_scenario(buf.str(), name);
}

}  // namespace remo
