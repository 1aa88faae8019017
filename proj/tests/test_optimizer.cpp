#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "remo/errors.hpp"
#include "remo/kinematics.hpp"
#include "remo/optimizer.hpp"

using namespace remo;

namespace {

struct Setup {
  KinematicModel model = build_model(scale_from_anthropometry(
      1.83, [] {
        SegmentRatios r;
        r.spine = Eigen::Vector3d(0.288, 0.129, 0.0);
        return r;
      }()));
  RoMBounds healthy;
  ImpairmentModel wrist_blocked;
  PostureContext ctx;
  TaskConstraints tc;
  RigidTransform grasp;

  Setup() {
    JointVector lo, hi;
    lo << -30, -120, -60, -90, 0, -90, -70, -35;
    hi << 80, 120, 150, 90, 150, 90, 75, 20;
    healthy.q_min = deg_to_rad(lo);
    healthy.q_max = deg_to_rad(hi);

    JointVector w = JointVector::Zero();
    w[6] = w[7] = 1.0;
    wrist_blocked = ImpairmentModel(w);

    JointVector qn = JointVector::Zero();
    qn[4] = deg_to_rad(90.0);
    ctx.q_measured = qn;
    ctx.q_natural = qn;
    ctx.alpha = 0.10;
    ctx.zeta = deg_to_rad(5.0);

    tc.task_space.center = Eigen::Vector3d(0.90, -0.20, 0.0);
    tc.task_space.radius = 0.85;
    tc.equality_axis = 1;
    tc.p_task = -0.20;
    tc.d_safe_th = 0.20;
    tc.d_elbow_th = 0.25;
  }
};

}  // namespace

TEST_CASE("task space validation and geometry") {
  TaskSpace ts;
  ts.center = Eigen::Vector3d(1.0, 0.0, 0.0);
  ts.radius = 0.5;
  CHECK_NOTHROW(ts.validate());
  CHECK(ts.signed_distance(ts.center) == doctest::Approx(-0.5));
  CHECK(ts.signed_distance(Eigen::Vector3d(1.5, 0.0, 0.0)) == doctest::Approx(0.0));
  CHECK(ts.intersects_plane(0, 1.4));
  CHECK_FALSE(ts.intersects_plane(0, 1.6));

  ts.radius = -1.0;
  CHECK_THROWS_AS(ts.validate(), ValidationError);
  ts.radius = 0.5;
  ts.has_box = true;
  ts.box_min = Eigen::Vector3d(0.9, -0.1, -0.1);
  ts.box_max = Eigen::Vector3d(1.1, 0.1, 0.1);
  CHECK_NOTHROW(ts.validate());
  CHECK(ts.signed_distance(Eigen::Vector3d(1.0, 0.0, 0.2)) == doctest::Approx(0.1));
  CHECK_FALSE(ts.intersects_plane(0, 1.2));  // plane misses the box
  ts.box_max.x() = 0.8;
  CHECK_THROWS_AS(ts.validate(), ValidationError);  // inverted box

  TaskConstraints tc;
  tc.task_space = TaskSpace{};
  tc.task_space.center = Eigen::Vector3d(0.9, -0.2, 0.0);
  tc.equality_axis = 1;
  tc.p_task = 5.0;
  CHECK_THROWS_AS(tc.validate(), ValidationError);  // plane misses the sphere
}

TEST_CASE("constraint residual reporting") {
  const Setup s;

  SUBCASE("upper-bound violation shows up at the right joint") {
    const RoMBounds bounds = s.healthy;
    JointVector q = s.ctx.q_natural;
    q[2] = bounds.q_max[2] + 0.2;
    const ConstraintReport r = constraint_residuals(s.model, q, bounds, s.tc, s.grasp);
    CHECK(r.bound_violation[2] == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(r.bound_violation[0] <= 0.0);
    CHECK(r.max_violation() >= 0.2 - 1e-12);
  }

  SUBCASE("object exactly on the sphere boundary has zero task-space residual") {
    const JointVector q = s.ctx.q_natural;
    const Eigen::Vector3d obj = object_pose(s.model, q, s.grasp).translation;
    TaskConstraints tc = s.tc;
    tc.task_space.radius = (obj - tc.task_space.center).norm();
    tc.p_task = obj.y();
    const ConstraintReport r = constraint_residuals(s.model, q, s.healthy, tc, s.grasp);
    CHECK(std::abs(r.task_space_distance) <= 1e-12);
    CHECK(std::abs(r.equality_residual) <= 1e-12);
  }

  SUBCASE("rejection-sampled feasible postures have non-positive residuals") {
    std::mt19937_64 rng(21);
    const RoMBounds bounds =
        impaired_bounds(s.healthy, s.wrist_blocked, s.ctx.q_measured, s.ctx.zeta).bounds;
    int found = 0;
    for (int trial = 0; trial < 20000 && found < 25; ++trial) {
      JointVector q;
      for (int i = 0; i < kNumJoints; ++i) {
        std::uniform_real_distribution<double> dist(bounds.q_min[i], bounds.q_max[i]);
        q[i] = dist(rng);
      }
      const Eigen::Vector3d obj = object_pose(s.model, q, s.grasp).translation;
      const Eigen::Vector3d elbow = forward_kinematics(s.model, q).elbow.translation;
      // independent feasibility test mirroring the constraint definitions
      if ((obj - s.tc.task_space.center).norm() > s.tc.task_space.radius) continue;
      if (horizontal_distance(obj, Eigen::Vector3d::Zero()) < s.tc.d_safe_th) continue;
      if (horizontal_distance(elbow, Eigen::Vector3d::Zero()) < s.tc.d_elbow_th) continue;
      TaskConstraints tc = s.tc;
      tc.p_task = obj[1];
      const ConstraintReport r = constraint_residuals(s.model, q, bounds, tc, s.grasp);
      CHECK(r.max_violation() <= 1e-12);
      ++found;
    }
    CHECK(found >= 10);  // the sampler must actually exercise the check
  }
}

TEST_CASE("solve_posture on the experiment settings") {
  const Setup s;
  for (double p_task : {0.05, -0.20, -0.45}) {
    TaskConstraints tc = s.tc;
    tc.p_task = p_task;
    const OptimizationResult res =
        solve_posture(s.model, s.ctx, s.wrist_blocked, s.healthy, tc, s.grasp);
    REQUIRE(res.converged);
    CHECK(res.constraint_report.max_violation() <= 1e-6);
    CHECK(std::abs(res.q_star[6] - s.ctx.q_measured[6]) <= s.ctx.zeta + 1e-9);
    CHECK(std::abs(res.q_star[7] - s.ctx.q_measured[7]) <= s.ctx.zeta + 1e-9);
    CHECK(res.objective_value >= 0.0);
    // the equality coordinate is met
    const Eigen::Vector3d obj = object_pose(s.model, res.q_star, s.grasp).translation;
    CHECK(std::abs(obj.y() - p_task) <= 1e-6);
  }
}

TEST_CASE("fully pinned posture solves trivially or reports infeasibility") {
  const Setup s;
  const ImpairmentModel all_blocked((JointVector::Ones()));
  PostureContext ctx = s.ctx;
  ctx.zeta = 0.0;

  SUBCASE("feasible pin: p_task matches the measured posture") {
    TaskConstraints tc = s.tc;
    tc.d_elbow_th = 0.0;
    tc.d_safe_th = 0.0;
    tc.p_task = object_pose(s.model, ctx.q_measured, s.grasp).translation.y();
    const OptimizationResult res =
        solve_posture(s.model, ctx, all_blocked, s.healthy, tc, s.grasp);
    REQUIRE(res.converged);
    CHECK((res.q_star - ctx.q_measured).cwiseAbs().maxCoeff() <= 1e-9);
  }

  SUBCASE("infeasible pin: p_task elsewhere") {
    TaskConstraints tc = s.tc;
    tc.p_task = -0.45;  // pinned posture cannot reach this coordinate
    const OptimizationResult res =
        solve_posture(s.model, ctx, all_blocked, s.healthy, tc, s.grasp);
    CHECK_FALSE(res.converged);
    CHECK(res.constraint_report.max_violation() > 1e-6);
  }
}

TEST_CASE("multi-start oracle behaviour") {
  const Setup s;

  SUBCASE("fixed seed is bit-deterministic") {
    const OptimizationResult a =
        multi_start_oracle(s.model, s.ctx, s.wrist_blocked, s.healthy, s.tc, s.grasp, 8, 99);
    const OptimizationResult b =
        multi_start_oracle(s.model, s.ctx, s.wrist_blocked, s.healthy, s.tc, s.grasp, 8, 99);
    REQUIRE(a.converged);
    CHECK(a.q_star == b.q_star);
    CHECK(a.objective_value == b.objective_value);
  }

  SUBCASE("n_starts must be positive") {
    CHECK_THROWS_AS(
        multi_start_oracle(s.model, s.ctx, s.wrist_blocked, s.healthy, s.tc, s.grasp, 0, 1),
        ValidationError);
  }

  SUBCASE("restarting at an optimum cannot improve on it") {
    // fully pinned instance whose optimum is q_m itself; the oracle's first
    // start is q_m, so a single-start run descends from the optimum
    const ImpairmentModel all_blocked((JointVector::Ones()));
    PostureContext ctx = s.ctx;
    ctx.zeta = 0.0;
    TaskConstraints tc = s.tc;
    tc.d_elbow_th = 0.0;
    tc.d_safe_th = 0.0;
    tc.p_task = object_pose(s.model, ctx.q_measured, s.grasp).translation.y();
    const OptimizationResult solver =
        solve_posture(s.model, ctx, all_blocked, s.healthy, tc, s.grasp);
    const OptimizationResult oracle =
        multi_start_oracle(s.model, ctx, all_blocked, s.healthy, tc, s.grasp, 1, 5);
    REQUIRE(solver.converged);
    REQUIRE(oracle.converged);
    CHECK(oracle.objective_value >= solver.objective_value - 1e-12);
  }

  SUBCASE("oracle does not beat the solver by more than the tolerance") {
    const OptimizationResult solver =
        solve_posture(s.model, s.ctx, s.wrist_blocked, s.healthy, s.tc, s.grasp);
    const OptimizationResult oracle =
        multi_start_oracle(s.model, s.ctx, s.wrist_blocked, s.healthy, s.tc, s.grasp, 16, 7);
    REQUIRE(solver.converged);
    REQUIRE(oracle.converged);
    CHECK(solver.objective_value <=
          oracle.objective_value + 0.01 * std::max(oracle.objective_value, 1e-6));
  }
}

TEST_CASE("constraint-slack solve matches the closed-form blend") {
  const Setup s;
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> wdist(0.0, 1.0);

  for (int trial = 0; trial < 10; ++trial) {
    JointVector weights;
    for (int i = 0; i < kNumJoints; ++i) weights[i] = wdist(rng);
    const ImpairmentModel w(weights);

    PostureContext ctx = s.ctx;
    ctx.alpha = 0.05 + 0.5 * wdist(rng);
    for (int i = 0; i < kNumJoints; ++i) {
      const double span = s.healthy.q_max[i] - s.healthy.q_min[i];
      ctx.q_measured[i] = s.healthy.q_min[i] + (0.25 + 0.5 * wdist(rng)) * span;
      ctx.q_natural[i] = s.healthy.q_min[i] + (0.25 + 0.5 * wdist(rng)) * span;
    }
    ctx.zeta = deg_to_rad(5.0);

    // closed form of the separable quadratic, clamped into the impaired box
    const RoMBounds bounds =
        impaired_bounds(s.healthy, w, ctx.q_measured, ctx.zeta).bounds;
    JointVector blend;
    for (int i = 0; i < kNumJoints; ++i) {
      const double a = weights[i] * weights[i];
      const double b = ctx.alpha * (1.0 - weights[i]) * (1.0 - weights[i]);
      blend[i] = (a + b) > 0.0
                     ? (a * ctx.q_measured[i] + b * ctx.q_natural[i]) / (a + b)
                     : ctx.q_natural[i];
    }
    blend = bounds.clamp(blend);

    // slack instance: giant sphere, zero thresholds, equality at the optimum
    TaskConstraints tc;
    tc.task_space.center = Eigen::Vector3d::Zero();
    tc.task_space.radius = 50.0;
    tc.equality_axis = 1;
    tc.p_task = object_pose(s.model, blend, s.grasp).translation.y();
    tc.d_safe_th = 0.0;
    tc.d_elbow_th = 0.0;

    const OptimizationResult res = solve_posture(s.model, ctx, w, s.healthy, tc, s.grasp);
    REQUIRE(res.converged);
    CHECK((res.q_star - blend).cwiseAbs().maxCoeff() <= 1e-6);
  }
}

TEST_CASE("wrist lock holds on converged solves") {
  const Setup s;
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> pdist(-0.5, 0.1);
  for (int trial = 0; trial < 15; ++trial) {
    TaskConstraints tc = s.tc;
    tc.p_task = pdist(rng);
    PostureContext ctx = s.ctx;
    ctx.zeta = deg_to_rad(5.0);
    SolverOptions opts;
    opts.seed = static_cast<std::uint64_t>(trial);
    const OptimizationResult res =
        solve_posture(s.model, ctx, s.wrist_blocked, s.healthy, tc, s.grasp, opts);
    if (!res.converged) continue;
    CHECK(std::abs(res.q_star[6] - ctx.q_measured[6]) <= ctx.zeta + 1e-12);
    CHECK(std::abs(res.q_star[7] - ctx.q_measured[7]) <= ctx.zeta + 1e-12);
  }
}

TEST_CASE("raising alpha never raises the compensation term") {
  const Setup s;
  // exact-mathematics property of the argmin family; solve tightly so the
  // numerical argmin error sits well below the asserted tolerance
  SolverOptions tight;
  tight.feasibility_tol = 1e-10;
  tight.stationarity_tol = 1e-11;
  tight.max_outer = 80;
  double prev_psi = std::numeric_limits<double>::infinity();
  for (double alpha : {0.02, 0.10, 0.50, 2.0}) {
    PostureContext ctx = s.ctx;
    ctx.alpha = alpha;
    const OptimizationResult res =
        solve_posture(s.model, ctx, s.wrist_blocked, s.healthy, s.tc, s.grasp, tight);
    REQUIRE(res.converged);
    const double psi = compensation_cost(res.q_star, ctx.q_natural, s.wrist_blocked);
    CHECK(psi <= prev_psi + 1e-8);
    prev_psi = psi;
  }
}

TEST_CASE("inverse-kinematics posture resolution") {
  const Setup s;

  SUBCASE("target at the current object position is a no-op") {
    const Eigen::Vector3d target =
        object_pose(s.model, s.ctx.q_measured, s.grasp).translation;
    const OptimizationResult res =
        resolve_ik_posture(s.model, target, s.wrist_blocked, s.healthy, s.ctx, s.grasp);
    REQUIRE(res.converged);
    CHECK(res.objective_value <= 1e-10);
    CHECK((res.q_star - s.ctx.q_measured).cwiseAbs().maxCoeff() <= 1e-5);
  }

  SUBCASE("a millimetre displacement is tracked to solver precision") {
    const Eigen::Vector3d target =
        object_pose(s.model, s.ctx.q_measured, s.grasp).translation +
        Eigen::Vector3d(0.001, 0.0, 0.0);
    const OptimizationResult res =
        resolve_ik_posture(s.model, target, s.wrist_blocked, s.healthy, s.ctx, s.grasp);
    REQUIRE(res.converged);
    CHECK(res.objective_value > 0.0);
    const Eigen::Vector3d reached = object_pose(s.model, res.q_star, s.grasp).translation;
    CHECK((reached - target).norm() <= 1e-6);
  }

  SUBCASE("unreachable target produces an infeasibility report") {
    const double reach = s.model.total_length();
    const Eigen::Vector3d target(2.0 * reach, 0.0, 0.0);
    const OptimizationResult res =
        resolve_ik_posture(s.model, target, s.wrist_blocked, s.healthy, s.ctx, s.grasp);
    CHECK_FALSE(res.converged);
    CHECK(std::isfinite(res.closest_approach));
    CHECK(res.closest_approach > reach * 0.5);
  }
}
