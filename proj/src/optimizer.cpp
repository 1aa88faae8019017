#include "remo/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "remo/errors.hpp"

namespace remo {

void TaskSpace::validate() const {
  if (!(radius > 0.0) || !std::isfinite(radius) || !center.allFinite()) {
    throw ValidationError("TaskSpace: sphere radius must be positive and finite");
  }
  if (has_box) {
    if (!box_min.allFinite() || !box_max.allFinite()) {
      throw ValidationError("TaskSpace: non-finite box");
    }
    for (int i = 0; i < 3; ++i) {
      if (!(box_min[i] < box_max[i])) {
        throw ValidationError("TaskSpace: box must have positive volume");
      }
    }
    // The sphere must meet the box: clamp the center into the box and check
    // the distance (exact for an axis-aligned box).
    const Eigen::Vector3d nearest = center.cwiseMax(box_min).cwiseMin(box_max);
    if ((nearest - center).norm() > radius) {
      throw ValidationError("TaskSpace: sphere and box do not intersect");
    }
  }
}

double TaskSpace::signed_distance(const Eigen::Vector3d& p) const {
  double sd = (p - center).norm() - radius;
  if (has_box) {
    for (int i = 0; i < 3; ++i) {
      sd = std::max(sd, box_min[i] - p[i]);
      sd = std::max(sd, p[i] - box_max[i]);
    }
  }
  return sd;
}

bool TaskSpace::intersects_plane(int axis, double value) const {
  Eigen::Vector3d candidate = center;
  candidate[axis] = value;
  if (has_box) {
    if (value < box_min[axis] || value > box_max[axis]) return false;
    candidate = candidate.cwiseMax(box_min).cwiseMin(box_max);
    candidate[axis] = value;
  }
  return (candidate - center).norm() <= radius;
}

void TaskConstraints::validate() const {
  task_space.validate();
  if (equality_axis < 0 || equality_axis > 2) {
    throw ValidationError("TaskConstraints: equality axis must be x, y or z");
  }
  if (!(d_safe_th >= 0.0) || !(d_elbow_th >= 0.0) ||
      !std::isfinite(d_safe_th) || !std::isfinite(d_elbow_th)) {
    throw ValidationError("TaskConstraints: distance thresholds must be >= 0");
  }
  if (!std::isfinite(p_task)) {
    throw ValidationError("TaskConstraints: p_task must be finite");
  }
  if (!task_space.intersects_plane(equality_axis, p_task)) {
    throw ValidationError("TaskConstraints: equality plane does not intersect the task space");
  }
}

double ConstraintReport::max_violation() const {
  double v = std::max(0.0, bound_violation.maxCoeff());
  v = std::max(v, task_space_distance);
  v = std::max(v, std::abs(equality_residual));
  v = std::max(v, safety_deficit);
  v = std::max(v, elbow_deficit);
  return std::max(v, 0.0);
}

namespace {

constexpr double kMuInitial = 10.0;
constexpr double kMuGrowth = 10.0;
constexpr double kMuMax = 1e9;
constexpr double kResidualDecrease = 0.25;

struct Landmarks {
  Eigen::Vector3d object;
  Eigen::Vector3d elbow;
};

Landmarks eval_landmarks(const KinematicModel& model, const JointVector& q,
                         const RigidTransform& grasp) {
  const SegmentPoses poses = forward_kinematics(model, q);
  return {(poses.hand * grasp).translation, poses.elbow.translation};
}

/// Position Jacobians of the object and elbow, by central differences on FK.
/// Each perturbation rebuilds only the affected DH row; the unchanged prefix
/// and suffix products of the chain are computed once and reused.
void fd_jacobians(const KinematicModel& model, const JointVector& q,
                  const RigidTransform& grasp, double step,
                  Eigen::Matrix<double, 3, kNumJoints>& j_obj,
                  Eigen::Matrix<double, 3, kNumJoints>& j_elbow) {
  constexpr int kElbowRows = 5;  // the elbow frame follows DH row 5
  const auto& rows = model.rows();

  std::array<RigidTransform, kNumJoints> link;
  for (int i = 0; i < kNumJoints; ++i) {
    link[static_cast<std::size_t>(i)] = detail::dh_row_transform(rows[static_cast<std::size_t>(i)], q[i]);
  }

  std::array<RigidTransform, kNumJoints + 1> prefix;
  prefix[0].rotation = KinematicModel::base_alignment();
  for (int i = 0; i < kNumJoints; ++i) {
    prefix[static_cast<std::size_t>(i) + 1] = prefix[static_cast<std::size_t>(i)] * link[static_cast<std::size_t>(i)];
  }

  // hand_suffix[j] = A_j * ... * A_7 * grasp; elbow_suffix[j] = A_j * ... * A_4
  std::array<RigidTransform, kNumJoints + 1> hand_suffix;
  hand_suffix[kNumJoints] = grasp;
  for (int j = kNumJoints - 1; j >= 0; --j) {
    hand_suffix[static_cast<std::size_t>(j)] = link[static_cast<std::size_t>(j)] * hand_suffix[static_cast<std::size_t>(j) + 1];
  }
  std::array<RigidTransform, kElbowRows + 1> elbow_suffix;
  elbow_suffix[kElbowRows] = RigidTransform::identity();
  for (int j = kElbowRows - 1; j >= 0; --j) {
    elbow_suffix[static_cast<std::size_t>(j)] = link[static_cast<std::size_t>(j)] * elbow_suffix[static_cast<std::size_t>(j) + 1];
  }

  for (int i = 0; i < kNumJoints; ++i) {
    const RigidTransform plus = detail::dh_row_transform(rows[static_cast<std::size_t>(i)], q[i] + step);
    const RigidTransform minus = detail::dh_row_transform(rows[static_cast<std::size_t>(i)], q[i] - step);
    const RigidTransform& pre = prefix[static_cast<std::size_t>(i)];

    const Eigen::Vector3d obj_plus = pre.apply(plus.apply(hand_suffix[static_cast<std::size_t>(i) + 1].translation));
    const Eigen::Vector3d obj_minus = pre.apply(minus.apply(hand_suffix[static_cast<std::size_t>(i) + 1].translation));
    j_obj.col(i) = (obj_plus - obj_minus) / (2.0 * step);

    if (i < kElbowRows) {
      const Eigen::Vector3d elbow_plus = pre.apply(plus.apply(elbow_suffix[static_cast<std::size_t>(i) + 1].translation));
      const Eigen::Vector3d elbow_minus = pre.apply(minus.apply(elbow_suffix[static_cast<std::size_t>(i) + 1].translation));
      j_elbow.col(i) = (elbow_plus - elbow_minus) / (2.0 * step);
    } else {
      j_elbow.col(i).setZero();  // distal joints cannot move the elbow
    }
  }
}

/// Constraint functions of one solve, in the form h(q) = 0 (n_eq entries)
/// and g(q) <= 0 (n_in entries). Two modes: the handover task (scalar
/// equality plus task-space / distance inequalities) and point IK (three
/// equality coordinates, no inequalities).
class ConstraintModel {
 public:
  enum class Mode { Handover, PointIk };

  ConstraintModel(const KinematicModel& model, const TaskConstraints& tc,
                  const RigidTransform& grasp, double fd_step)
      : model_(model), grasp_(grasp), fd_step_(fd_step), mode_(Mode::Handover), tc_(tc) {
    n_eq_ = 1;
    n_in_ = tc.task_space.has_box ? 9 : 3;
  }

  ConstraintModel(const KinematicModel& model, const Eigen::Vector3d& target,
                  const RigidTransform& grasp, double fd_step)
      : model_(model), grasp_(grasp), fd_step_(fd_step), mode_(Mode::PointIk), target_(target) {
    n_eq_ = 3;
    n_in_ = 0;
  }

  int n_eq() const { return n_eq_; }
  int n_in() const { return n_in_; }
  Mode mode() const { return mode_; }
  const Eigen::Vector3d& target() const { return target_; }
  const KinematicModel& model() const { return model_; }
  const RigidTransform& grasp() const { return grasp_; }

  void values(const JointVector& q, Eigen::VectorXd& h, Eigen::VectorXd& g,
              Landmarks* lm_out = nullptr) const {
    const Landmarks lm = eval_landmarks(model_, q, grasp_);
    if (lm_out != nullptr) *lm_out = lm;
    h.resize(n_eq_);
    g.resize(n_in_);
    if (mode_ == Mode::PointIk) {
      h = lm.object - target_;
      return;
    }
    h[0] = lm.object[tc_.equality_axis] - tc_.p_task;
    const Eigen::Vector3d& c = tc_.task_space.center;
    g[0] = (lm.object - c).norm() - tc_.task_space.radius;
    g[1] = tc_.d_safe_th - horizontal_distance(lm.object, Eigen::Vector3d::Zero());
    g[2] = tc_.d_elbow_th - horizontal_distance(lm.elbow, Eigen::Vector3d::Zero());
    if (tc_.task_space.has_box) {
      for (int i = 0; i < 3; ++i) {
        g[3 + 2 * i] = tc_.task_space.box_min[i] - lm.object[i];
        g[4 + 2 * i] = lm.object[i] - tc_.task_space.box_max[i];
      }
    }
  }

  void gradients(const JointVector& q, const Landmarks& lm, Eigen::MatrixXd& jh,
                 Eigen::MatrixXd& jg) const {
    Eigen::Matrix<double, 3, kNumJoints> j_obj, j_elbow;
    fd_jacobians(model_, q, grasp_, fd_step_, j_obj, j_elbow);

    jh.resize(n_eq_, kNumJoints);
    jg.resize(n_in_, kNumJoints);
    if (mode_ == Mode::PointIk) {
      jh = j_obj;
      return;
    }
    jh.row(0) = j_obj.row(tc_.equality_axis);

    const Eigen::Vector3d v = lm.object - tc_.task_space.center;
    const double vn = v.norm();
    if (vn > 1e-12) {
      jg.row(0) = (j_obj.transpose() * (v / vn)).transpose();
    } else {
      jg.row(0).setZero();
    }

    const Eigen::Vector2d uo = lm.object.head<2>();
    const double uon = uo.norm();
    if (uon > 1e-12) {
      jg.row(1) = -(j_obj.topRows<2>().transpose() * (uo / uon)).transpose();
    } else {
      jg.row(1).setZero();
    }

    const Eigen::Vector2d ue = lm.elbow.head<2>();
    const double uen = ue.norm();
    if (uen > 1e-12) {
      jg.row(2) = -(j_elbow.topRows<2>().transpose() * (ue / uen)).transpose();
    } else {
      jg.row(2).setZero();
    }

    if (tc_.task_space.has_box) {
      for (int i = 0; i < 3; ++i) {
        jg.row(3 + 2 * i) = -j_obj.row(i);
        jg.row(4 + 2 * i) = j_obj.row(i);
      }
    }
  }

  /// Max constraint violation (bounds excluded; those are handled by projection).
  double violation(const Eigen::VectorXd& h, const Eigen::VectorXd& g) const {
    double v = h.size() > 0 ? h.cwiseAbs().maxCoeff() : 0.0;
    if (g.size() > 0) v = std::max(v, g.maxCoeff());
    return std::max(v, 0.0);
  }

 private:
  const KinematicModel& model_;
  RigidTransform grasp_;
  double fd_step_;
  Mode mode_;
  TaskConstraints tc_{};
  Eigen::Vector3d target_ = Eigen::Vector3d::Zero();
  int n_eq_ = 0;
  int n_in_ = 0;
};

/// Objective pieces shared by both solvers.
struct ObjectiveModel {
  const PostureContext& ctx;
  const ImpairmentModel& w;
  double value(const JointVector& q) const { return posture_objective(q, ctx, w); }
  JointVector gradient(const JointVector& q) const {
    return posture_objective_gradient(q, ctx, w);
  }
};

/// Bound-projected L-BFGS with backtracking line search on the projection arc.
template <typename ValueGrad>
JointVector projected_lbfgs(JointVector x, ValueGrad&& fg, const RoMBounds& bounds,
                            double tol, int max_iter) {
  constexpr int kMemory = 8;
  constexpr double kArmijo = 1e-4;

  x = bounds.clamp(x);
  JointVector grad;
  double f = fg(x, grad);

  std::vector<JointVector> s_hist, y_hist;
  std::vector<double> rho_hist;

  for (int it = 0; it < max_iter; ++it) {
    const double pg = (x - bounds.clamp(x - grad)).cwiseAbs().maxCoeff();
    if (pg <= tol * std::max(1.0, x.cwiseAbs().maxCoeff())) break;

    JointVector d = -grad;
    const std::size_t mem = s_hist.size();
    if (mem > 0) {
      std::vector<double> alpha(mem);
      for (std::size_t i = mem; i-- > 0;) {
        alpha[i] = rho_hist[i] * s_hist[i].dot(d);
        d -= alpha[i] * y_hist[i];
      }
      d *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
      for (std::size_t i = 0; i < mem; ++i) {
        const double beta = rho_hist[i] * y_hist[i].dot(d);
        d += (alpha[i] - beta) * s_hist[i];
      }
    }
    if (d.dot(grad) > -1e-14 * d.norm() * grad.norm()) {
      d = -grad;  // safeguard: fall back to steepest descent
    }

    double step = 1.0;
    bool accepted = false;
    JointVector x_new, grad_new;
    double f_new = f;
    for (int ls = 0; ls < 60; ++ls) {
      x_new = bounds.clamp(x + step * d);
      f_new = fg(x_new, grad_new);
      if (f_new <= f + kArmijo * grad.dot(x_new - x)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted || (x_new - x).cwiseAbs().maxCoeff() == 0.0) break;

    const JointVector s = x_new - x;
    const JointVector y = grad_new - grad;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      s_hist.push_back(s);
      y_hist.push_back(y);
      rho_hist.push_back(1.0 / sy);
      if (s_hist.size() > kMemory) {
        s_hist.erase(s_hist.begin());
        y_hist.erase(y_hist.begin());
        rho_hist.erase(rho_hist.begin());
      }
    }
    x = x_new;
    f = f_new;
    grad = grad_new;
  }
  return x;
}

struct StartOutcome {
  JointVector q = JointVector::Zero();
  bool feasible = false;
  int outer_iterations = 0;
  double violation = std::numeric_limits<double>::infinity();
};

/// One augmented-Lagrangian run from a single start point.
StartOutcome augmented_lagrangian(const ConstraintModel& cm, const ObjectiveModel& obj,
                                  const RoMBounds& bounds, const JointVector& start,
                                  const SolverOptions& opts) {
  Eigen::VectorXd lambda_eq = Eigen::VectorXd::Zero(cm.n_eq());
  Eigen::VectorXd lambda_in = Eigen::VectorXd::Zero(cm.n_in());
  double mu = kMuInitial;

  JointVector q = bounds.clamp(start);
  double prev_violation = std::numeric_limits<double>::infinity();

  StartOutcome out;
  for (int outer = 1; outer <= opts.max_outer; ++outer) {
    auto fg = [&](const JointVector& x, JointVector& grad) -> double {
      Eigen::VectorXd h, g;
      Landmarks lm;
      cm.values(x, h, g, &lm);
      Eigen::MatrixXd jh, jg;
      cm.gradients(x, lm, jh, jg);

      double value = obj.value(x);
      grad = obj.gradient(x);
      for (int j = 0; j < cm.n_eq(); ++j) {
        value += lambda_eq[j] * h[j] + 0.5 * mu * h[j] * h[j];
        grad += (lambda_eq[j] + mu * h[j]) * jh.row(j).transpose();
      }
      for (int i = 0; i < cm.n_in(); ++i) {
        const double t = lambda_in[i] + mu * g[i];
        if (t > 0.0) {
          value += lambda_in[i] * g[i] + 0.5 * mu * g[i] * g[i];
          grad += t * jg.row(i).transpose();
        } else {
          value -= 0.5 * lambda_in[i] * lambda_in[i] / mu;
        }
      }
      return value;
    };

    q = projected_lbfgs(q, fg, bounds, opts.stationarity_tol, opts.max_inner);

    Eigen::VectorXd h, g;
    cm.values(q, h, g);
    const double violation = cm.violation(h, g);
    out.q = q;
    out.outer_iterations = outer;
    out.violation = violation;
    if (violation <= opts.feasibility_tol) {
      out.feasible = true;
      return out;
    }
    lambda_eq += mu * h;
    lambda_in = (lambda_in + mu * g).cwiseMax(0.0);
    if (violation > kResidualDecrease * prev_violation) {
      mu = std::min(mu * kMuGrowth, kMuMax);
    }
    prev_violation = violation;
  }
  return out;
}

/// Projected Barzilai-Borwein gradient descent; the oracle's workhorse.
template <typename ValueGrad>
JointVector projected_bb_descent(JointVector x, ValueGrad&& fg, const RoMBounds& bounds,
                                 double tol, int max_iter) {
  x = bounds.clamp(x);
  JointVector grad;
  double f = fg(x, grad);

  JointVector x_prev = x, grad_prev = grad;
  bool have_prev = false;
  double step = 1e-3;

  for (int it = 0; it < max_iter; ++it) {
    const double pg = (x - bounds.clamp(x - grad)).cwiseAbs().maxCoeff();
    if (pg <= tol * std::max(1.0, x.cwiseAbs().maxCoeff())) break;

    if (have_prev) {
      const JointVector s = x - x_prev;
      const JointVector y = grad - grad_prev;
      const double sy = s.dot(y);
      step = sy > 1e-16 ? s.squaredNorm() / sy : 1e-3;
      step = std::clamp(step, 1e-8, 1e3);
    }

    double trial = step;
    bool accepted = false;
    JointVector x_new, grad_new;
    double f_new = f;
    for (int ls = 0; ls < 60; ++ls) {
      x_new = bounds.clamp(x - trial * grad);
      f_new = fg(x_new, grad_new);
      if (f_new < f) {
        accepted = true;
        break;
      }
      trial *= 0.5;
    }
    if (!accepted || (x_new - x).cwiseAbs().maxCoeff() == 0.0) break;

    x_prev = x;
    grad_prev = grad;
    have_prev = true;
    x = x_new;
    f = f_new;
    grad = grad_new;
  }
  return x;
}

/// Quadratic-penalty solve from one start (oracle path, no multipliers).
StartOutcome penalty_descent(const ConstraintModel& cm, const ObjectiveModel& obj,
                             const RoMBounds& bounds, const JointVector& start,
                             const SolverOptions& opts) {
  JointVector q = bounds.clamp(start);
  StartOutcome out;
  double mu = kMuInitial;
  int stages = 0;
  while (mu <= kMuMax) {
    ++stages;
    auto fg = [&](const JointVector& x, JointVector& grad) -> double {
      Eigen::VectorXd h, g;
      Landmarks lm;
      cm.values(x, h, g, &lm);
      Eigen::MatrixXd jh, jg;
      cm.gradients(x, lm, jh, jg);

      double value = obj.value(x);
      grad = obj.gradient(x);
      for (int j = 0; j < cm.n_eq(); ++j) {
        value += 0.5 * mu * h[j] * h[j];
        grad += mu * h[j] * jh.row(j).transpose();
      }
      for (int i = 0; i < cm.n_in(); ++i) {
        const double gp = std::max(g[i], 0.0);
        if (gp > 0.0) {
          value += 0.5 * mu * gp * gp;
          grad += mu * gp * jg.row(i).transpose();
        }
      }
      return value;
    };

    // early stages need only coarse stationarity; tighten as mu grows
    const double stage_tol = std::max(1e-9, 1e-4 / mu);
    q = projected_bb_descent(q, fg, bounds, stage_tol, opts.max_inner);

    Eigen::VectorXd h, g;
    cm.values(q, h, g);
    out.q = q;
    out.outer_iterations = stages;
    out.violation = cm.violation(h, g);
    if (out.violation <= opts.feasibility_tol) {
      out.feasible = true;
      return out;
    }
    mu *= kMuGrowth;
  }
  return out;
}

/// Deterministic start points: q_m, q_n, then uniform samples in the bounds.
std::vector<JointVector> make_starts(const RoMBounds& bounds, const PostureContext& ctx,
                                     int n_samples, std::uint64_t seed) {
  std::vector<JointVector> starts;
  starts.reserve(static_cast<std::size_t>(n_samples) + 2);
  starts.push_back(bounds.clamp(ctx.q_measured));
  starts.push_back(bounds.clamp(ctx.q_natural));
  std::mt19937_64 rng(seed);
  for (int s = 0; s < n_samples; ++s) {
    JointVector q;
    for (int i = 0; i < kNumJoints; ++i) {
      // 53-bit uniform in [0, 1); explicit mapping keeps runs reproducible.
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      q[i] = bounds.q_min[i] + u * (bounds.q_max[i] - bounds.q_min[i]);
    }
    starts.push_back(q);
  }
  return starts;
}

ConstraintReport build_report(const ConstraintModel& cm, const JointVector& q,
                              const RoMBounds& bounds) {
  ConstraintReport report;
  for (int i = 0; i < kNumJoints; ++i) {
    report.bound_violation[i] = std::max(q[i] - bounds.q_max[i], bounds.q_min[i] - q[i]);
  }
  Eigen::VectorXd h, g;
  Landmarks lm;
  cm.values(q, h, g, &lm);
  if (cm.mode() == ConstraintModel::Mode::PointIk) {
    report.equality_residual = h.norm();
  } else {
    report.equality_residual = h[0];
    report.task_space_distance = g[0];
    if (g.size() > 3) {
      for (int i = 3; i < g.size(); ++i) {
        report.task_space_distance = std::max(report.task_space_distance, g[i]);
      }
    }
    report.safety_deficit = g[1];
    report.elbow_deficit = g[2];
  }
  return report;
}

/// Runs a solver callback over all starts and assembles the result.
template <typename StartSolver>
OptimizationResult run_starts(const ConstraintModel& cm, const ObjectiveModel& obj,
                              const RoMBounds& bounds, const std::vector<JointVector>& starts,
                              StartSolver&& solve_one) {
  OptimizationResult result;
  StartOutcome best_infeasible;

  for (const JointVector& start : starts) {
    ++result.starts_used;
    const StartOutcome outcome = solve_one(start);
    if (outcome.feasible) {
      const double value = obj.value(outcome.q);
      if (!result.converged || value < result.objective_value) {
        result.converged = true;
        result.q_star = outcome.q;
        result.objective_value = value;
        result.iterations = outcome.outer_iterations;
      }
    } else if (!result.converged && outcome.violation < best_infeasible.violation) {
      best_infeasible = outcome;
    }
  }

  if (!result.converged) {
    result.q_star = best_infeasible.violation == std::numeric_limits<double>::infinity()
                        ? bounds.clamp(JointVector::Zero())
                        : best_infeasible.q;
    result.objective_value = obj.value(result.q_star);
    result.iterations = best_infeasible.outer_iterations;
  }
  result.constraint_report = build_report(cm, result.q_star, bounds);
  return result;
}

}  // namespace

OptimizationResult solve_posture(const KinematicModel& model, const PostureContext& ctx,
                                 const ImpairmentModel& w, const RoMBounds& healthy,
                                 const TaskConstraints& tc, const RigidTransform& grasp_offset,
                                 const SolverOptions& opts) {
  ctx.validate();
  tc.validate();
  const RoMBounds bounds = impaired_bounds(healthy, w, ctx.q_measured, ctx.zeta).bounds;

  const ConstraintModel cm(model, tc, grasp_offset, opts.fd_step);
  const ObjectiveModel obj{ctx, w};
  const auto starts = make_starts(bounds, ctx, opts.extra_starts, opts.seed);

  OptimizationResult result = run_starts(cm, obj, bounds, starts, [&](const JointVector& q0) {
    return augmented_lagrangian(cm, obj, bounds, q0, opts);
  });
  return result;
}

OptimizationResult multi_start_oracle(const KinematicModel& model, const PostureContext& ctx,
                                      const ImpairmentModel& w, const RoMBounds& healthy,
                                      const TaskConstraints& tc, const RigidTransform& grasp_offset,
                                      int n_starts, std::uint64_t seed,
                                      const SolverOptions& opts) {
  if (n_starts < 1) {
    throw ValidationError("multi_start_oracle: n_starts must be >= 1");
  }
  ctx.validate();
  tc.validate();
  const RoMBounds bounds = impaired_bounds(healthy, w, ctx.q_measured, ctx.zeta).bounds;

  const ConstraintModel cm(model, tc, grasp_offset, opts.fd_step);
  const ObjectiveModel obj{ctx, w};
  const auto starts = make_starts(bounds, ctx, n_starts, seed);

  return run_starts(cm, obj, bounds, starts, [&](const JointVector& q0) {
    return penalty_descent(cm, obj, bounds, q0, opts);
  });
}

ConstraintReport constraint_residuals(const KinematicModel& model, const JointVector& q,
                                      const RoMBounds& bounds, const TaskConstraints& tc,
                                      const RigidTransform& grasp_offset) {
  const ConstraintModel cm(model, tc, grasp_offset, SolverOptions{}.fd_step);
  return build_report(cm, q, bounds);
}

OptimizationResult resolve_ik_posture(const KinematicModel& model,
                                      const Eigen::Vector3d& target_object_position,
                                      const ImpairmentModel& w, const RoMBounds& healthy,
                                      const PostureContext& ctx, const RigidTransform& grasp_offset,
                                      const SolverOptions& opts) {
  ctx.validate();
  if (!target_object_position.allFinite()) {
    throw ValidationError("resolve_ik_posture: non-finite target");
  }
  const RoMBounds bounds = impaired_bounds(healthy, w, ctx.q_measured, ctx.zeta).bounds;
  const ConstraintModel cm(model, target_object_position, grasp_offset, opts.fd_step);
  const ObjectiveModel obj{ctx, w};

  const double reach = model.total_length() + grasp_offset.translation.norm();
  const bool plainly_unreachable = target_object_position.norm() > reach;

  OptimizationResult result;
  if (!plainly_unreachable) {
    const auto starts = make_starts(bounds, ctx, opts.extra_starts, opts.seed);
    result = run_starts(cm, obj, bounds, starts, [&](const JointVector& q0) {
      return augmented_lagrangian(cm, obj, bounds, q0, opts);
    });
  }

  if (!result.converged) {
    // Closest-approach posture: minimize the distance to the target alone.
    auto fg = [&](const JointVector& x, JointVector& grad) -> double {
      Eigen::VectorXd h, g;
      Landmarks lm;
      cm.values(x, h, g, &lm);
      Eigen::MatrixXd jh, jg;
      cm.gradients(x, lm, jh, jg);
      grad = 2.0 * (jh.transpose() * h);
      return h.squaredNorm();
    };
    const JointVector q_near =
        projected_bb_descent(bounds.clamp(ctx.q_measured), fg, bounds, 1e-10, opts.max_inner);
    result.q_star = q_near;
    result.objective_value = obj.value(q_near);
    result.converged = false;
    result.constraint_report = build_report(cm, q_near, bounds);
    if (result.starts_used == 0) result.starts_used = 1;
  }

  result.closest_approach = result.constraint_report.equality_residual;
  return result;
}

}  // namespace remo
