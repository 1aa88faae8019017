// remo - residual-mobility handover planner CLI.
//
// Subcommands:
//   solve    one p_task value: optimal posture plus constraint residuals
//   session  full HP/RP sweep over the scenario's p_task list
//   compare  percent-change summary between two report files
//   ingest   metrics of an external motion-log CSV
//
// Exit codes: 0 success, 2 validation error, 3 infeasibility on all p_task
// values, 4 I/O error.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "remo/errors.hpp"
#include "remo/metrics.hpp"
#include "remo/optimizer.hpp"
#include "remo/scenario.hpp"
#include "remo/session.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitIo = 4;

struct CommonArgs {
  std::string scenario_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> dt;
};

remo::Scenario load_with_overrides(const CommonArgs& args) {
  remo::Scenario sc = remo::load_scenario(args.scenario_path);
  if (args.seed) sc.seed = *args.seed;
  if (args.dt) {
    if (!(*args.dt > 0.0)) throw remo::ValidationError("--dt must be positive");
    sc.parameters.dt = *args.dt;
  }
  return sc;
}

void print_residuals(const remo::ConstraintReport& r) {
  std::cout << "  residuals (<= 0 satisfied):\n";
  std::cout << "    bounds [rad]:";
  for (int i = 0; i < remo::kNumJoints; ++i) std::cout << ' ' << r.bound_violation[i];
  std::cout << '\n';
  std::cout << "    task space [m]:   " << r.task_space_distance << '\n';
  std::cout << "    equality [m]:     " << r.equality_residual << '\n';
  std::cout << "    safety [m]:       " << r.safety_deficit << '\n';
  std::cout << "    elbow [m]:        " << r.elbow_deficit << '\n';
  std::cout << "    max violation:    " << r.max_violation() << '\n';
}

int cmd_solve(const CommonArgs& args, std::optional<double> p_task_arg) {
  const remo::Scenario sc = load_with_overrides(args);
  const double p_task = p_task_arg.value_or(sc.task.p_task_values.front());

  remo::TaskConstraints tc{sc.task.task_space, sc.task.equality_axis, p_task,
                           sc.parameters.d_safe_th, sc.parameters.d_elbow_th};
  remo::PostureContext ctx;
  ctx.q_measured = sc.subject.natural_posture;
  ctx.q_natural = sc.subject.natural_posture;
  ctx.alpha = sc.parameters.alpha;
  ctx.zeta = sc.parameters.zeta;
  remo::SolverOptions opts;
  opts.seed = sc.seed;

  const remo::KinematicModel model = sc.model();
  const remo::OptimizationResult res = remo::solve_posture(
      model, ctx, sc.impairment(), sc.subject.healthy, tc, sc.task.grasp_offset, opts);

  std::cout << "scenario " << sc.name << ", p_task = " << p_task << " m ("
            << (res.converged ? "converged" : "infeasible") << ")\n";
  std::cout << "  q_star [deg]:";
  for (int i = 0; i < remo::kNumJoints; ++i) std::cout << ' ' << remo::rad_to_deg(res.q_star[i]);
  std::cout << '\n';
  std::cout << "  objective:        " << res.objective_value << '\n';
  std::cout << "  psi(q_star):      "
            << remo::compensation_cost(res.q_star, ctx.q_natural, sc.impairment()) << '\n';
  const Eigen::Vector3d obj =
      remo::object_pose(model, res.q_star, sc.task.grasp_offset).translation;
  std::cout << "  object [m]:       " << obj.x() << ' ' << obj.y() << ' ' << obj.z() << '\n';
  std::cout << "  iterations:       " << res.iterations << " (starts " << res.starts_used << ")\n";
  print_residuals(res.constraint_report);
  return res.converged ? kExitOk : kExitInfeasible;
}

int cmd_session(const CommonArgs& args, const std::string& condition_arg,
                const std::string& out_dir) {
  const remo::Scenario sc = load_with_overrides(args);
  std::filesystem::create_directories(out_dir);

  remo::SessionReport report;
  std::string tag;
  if (condition_arg == "both") {
    const remo::SessionReport hp = remo::run_session(sc, remo::Condition::HumanPasser);
    const remo::SessionReport rp = remo::run_session(sc, remo::Condition::RobotPasser);
    report = remo::combine_sessions(hp, rp);
    tag = "both";
  } else {
    const remo::Condition cond = remo::condition_from_string(condition_arg);
    report = remo::run_session(sc, cond);
    tag = cond == remo::Condition::HumanPasser ? "hp" : "rp";
  }

  const std::string base = out_dir + "/" + sc.name + "_" + tag;
  remo::write_report(report, base + "_report.json");
  remo::export_frames(report, base + "_frames.csv");
  for (const auto* entries : {&report.hp_entries, &report.rp_entries}) {
    std::size_t index = 0;
    for (const remo::SessionEntry& e : *entries) {
      if (e.converged) {
        std::ostringstream name;
        name << base << "_motion_" << (e.condition == remo::Condition::HumanPasser ? "hp" : "rp")
             << "_" << index << ".csv";
        remo::write_motion_log(e.approach, name.str());
      }
      ++index;
    }
  }
  std::cout << "wrote " << base << "_report.json and " << base << "_frames.csv\n";

  for (const auto* entries : {&report.hp_entries, &report.rp_entries}) {
    for (const remo::SessionEntry& e : *entries) {
      std::cout << "  " << remo::to_string(e.condition) << " p_task " << e.p_task << ": "
                << (e.converged ? "converged" : ("infeasible - " + e.failure));
      if (e.converged) {
        std::cout << " | psi_bar " << e.metrics.psi_bar << ", psi* " << e.metrics.psi_interaction
                  << ", J " << e.metrics.jerk << ", wrist " << e.metrics.wrist_excursion_max_deg
                  << " deg";
      }
      std::cout << '\n';
    }
  }
  if (report.comparison) {
    const remo::ComparisonRow& m = report.comparison->mean;
    std::cout << "  RP vs HP mean percent change:";
    if (m.psi_bar.defined) std::cout << " psi_bar " << m.psi_bar.percent << "%";
    if (m.psi_interaction.defined) std::cout << ", psi* " << m.psi_interaction.percent << "%";
    if (m.jerk.defined) std::cout << ", J " << m.jerk.percent << "%";
    std::cout << '\n';
  }
  return report.any_converged() ? kExitOk : kExitInfeasible;
}

int cmd_compare(const std::string& path_a, const std::string& path_b,
                const std::string& out_path) {
  const remo::LoadedReport a = remo::load_report(path_a);
  const remo::LoadedReport b = remo::load_report(path_b);
  const std::vector<remo::MetricReport>& base =
      a.hp_metrics.empty() ? a.rp_metrics : a.hp_metrics;
  const std::vector<remo::MetricReport>& other =
      b.rp_metrics.empty() ? b.hp_metrics : b.rp_metrics;
  const remo::ComparisonSummary summary = remo::compare_conditions(base, other);

  auto print_pc = [](const char* name, const remo::PercentChange& pc) {
    std::cout << "  " << name << ": ";
    if (pc.defined) {
      std::cout << pc.percent << "%\n";
    } else {
      std::cout << "undefined (zero baseline)\n";
    }
  };
  std::cout << "percent change (" << path_b << " vs " << path_a << "), mean over "
            << summary.per_scenario.size() << " tasks:\n";
  print_pc("duration", summary.mean.duration);
  print_pc("psi_bar", summary.mean.psi_bar);
  print_pc("psi_interaction", summary.mean.psi_interaction);
  print_pc("jerk", summary.mean.jerk);
  print_pc("wrist_excursion", summary.mean.wrist_excursion);

  if (!out_path.empty()) {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw remo::IoError("cannot write comparison: " + out_path);
    out << "metric,mean_percent_change,defined\n";
    auto row = [&](const char* name, const remo::PercentChange& pc) {
      out << name << ',' << pc.percent << ',' << (pc.defined ? 1 : 0) << '\n';
    };
    row("duration", summary.mean.duration);
    row("psi_bar", summary.mean.psi_bar);
    row("psi_interaction", summary.mean.psi_interaction);
    row("jerk", summary.mean.jerk);
    row("wrist_excursion", summary.mean.wrist_excursion);
  }
  return kExitOk;
}

int cmd_ingest(const CommonArgs& args, const std::string& log_path) {
  const remo::Scenario sc = load_with_overrides(args);
  const remo::JointTrajectory raw = remo::ingest_motion_log(log_path, sc.parameters.dt);
  if (raw.resampled) {
    std::cout << "note: non-uniform input resampled to dt = " << raw.dt << " s\n";
  }

  // Approach onset: first sample whose joint speed exceeds 2 deg/s.
  const double threshold = remo::deg_to_rad(2.0);
  std::size_t onset = 0;
  bool moving = false;
  if (raw.samples.size() >= 4) {
    std::vector<double> series(raw.samples.size());
    std::vector<std::vector<double>> velocity(remo::kNumJoints);
    for (int j = 0; j < remo::kNumJoints; ++j) {
      for (std::size_t k = 0; k < raw.samples.size(); ++k) series[k] = raw.samples[k][j];
      velocity[static_cast<std::size_t>(j)] = remo::differentiate_series(series, raw.dt);
    }
    for (std::size_t k = 0; k < raw.samples.size() && !moving; ++k) {
      double norm_sq = 0.0;
      for (int j = 0; j < remo::kNumJoints; ++j) {
        const double v = velocity[static_cast<std::size_t>(j)][k];
        norm_sq += v * v;
      }
      if (std::sqrt(norm_sq) > threshold) {
        onset = k;
        moving = true;
      }
    }
  }
  remo::JointTrajectory traj;
  traj.dt = raw.dt;
  traj.samples.assign(raw.samples.begin() + static_cast<std::ptrdiff_t>(moving ? onset : 0),
                      raw.samples.end());

  const remo::ImpairmentModel w = sc.impairment();
  const std::vector<int> blocked = sc.blocked_joints();
  remo::MetricReport m;
  m.duration = traj.duration();
  m.sample_count = traj.size();
  m.psi_bar = remo::mean_compensation_cost(traj, sc.subject.natural_posture, w);
  m.psi_interaction =
      remo::interaction_cost(traj.samples.back(), sc.subject.natural_posture, w);
  m.jerk = traj.size() >= 4 ? remo::jerk_cost(traj) : 0.0;
  m.wrist_excursion_max_deg =
      blocked.empty() ? 0.0 : remo::wrist_excursion(traj, traj.samples.front(), blocked);

  std::cout << "motion log " << log_path << " (" << raw.size() << " samples, dt " << raw.dt
            << " s)\n";
  std::cout << "  T_f [s]:            " << m.duration << '\n';
  std::cout << "  psi_bar:            " << m.psi_bar << '\n';
  std::cout << "  psi_interaction:    " << m.psi_interaction << '\n';
  std::cout << "  jerk J:             " << m.jerk << '\n';
  std::cout << "  wrist excursion:    " << m.wrist_excursion_max_deg << " deg\n";
  std::cout << "  samples K_f:        " << m.sample_count << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"residual-mobility handover planner"};
  app.require_subcommand(1);

  CommonArgs common;
  std::optional<double> p_task_arg;
  std::string condition = "both";
  std::string out_dir = ".";
  std::string compare_a, compare_b, compare_out;
  std::string log_path;

  auto add_common = [&common](CLI::App* cmd, bool scenario_required = true) {
    auto* opt = cmd->add_option("--scenario", common.scenario_path, "scenario file (.scn)");
    if (scenario_required) opt->required();
    cmd->add_option("--seed", common.seed, "override the scenario seed");
    cmd->add_option("--dt", common.dt, "override the sampling interval [s]");
  };

  CLI::App* solve = app.add_subcommand("solve", "solve one handover posture");
  add_common(solve);
  solve->add_option("--p-task", p_task_arg, "equality target [m]; default: first in scenario");

  CLI::App* session = app.add_subcommand("session", "run a full HP/RP session sweep");
  add_common(session);
  session->add_option("--condition", condition, "HP, RP or both")->default_val("both");
  session->add_option("--out-dir", out_dir, "output directory")->default_val(".");

  CLI::App* compare = app.add_subcommand("compare", "compare two report files");
  compare->add_option("baseline", compare_a, "baseline report (A)")->required();
  compare->add_option("candidate", compare_b, "candidate report (B)")->required();
  compare->add_option("--out", compare_out, "write the summary as CSV");

  CLI::App* ingest = app.add_subcommand("ingest", "compute metrics of a motion-log CSV");
  add_common(ingest);
  ingest->add_option("--log", log_path, "motion log CSV")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return cmd_solve(common, p_task_arg);
    if (session->parsed()) return cmd_session(common, condition, out_dir);
    if (compare->parsed()) return cmd_compare(compare_a, compare_b, compare_out);
    if (ingest->parsed()) return cmd_ingest(common, log_path);
  } catch (const remo::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const remo::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitOk;
}
