#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "remo/errors.hpp"
#include "remo/metrics.hpp"

using namespace remo;

namespace {

JointTrajectory make_traj(double dt, std::size_t n,
                          const std::function<JointVector(double)>& f) {
  JointTrajectory traj;
  traj.dt = dt;
  traj.samples.resize(n);
  for (std::size_t k = 0; k < n; ++k) traj.samples[k] = f(static_cast<double>(k) * dt);
  return traj;
}

JointVector unit(int j) {
  JointVector v = JointVector::Zero();
  v[j] = 1.0;
  return v;
}

}  // namespace

TEST_CASE("mean compensation cost") {
  const JointVector q_n = JointVector::Zero();
  const ImpairmentModel healthy;

  SUBCASE("constant trajectory at the natural posture") {
    const JointTrajectory traj = make_traj(0.1, 10, [&](double) { return q_n; });
    CHECK(mean_compensation_cost(traj, q_n, healthy) == 0.0);
  }

  SUBCASE("two samples average arithmetically") {
    JointTrajectory traj;
    traj.dt = 0.5;
    traj.samples.push_back(q_n);                          // cost 0
    traj.samples.push_back(std::sqrt(0.02) * unit(2));    // cost 0.02
    CHECK(mean_compensation_cost(traj, q_n, healthy) ==
          doctest::Approx(0.01).epsilon(1e-12));
  }

  SUBCASE("matches an independent summation loop") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    JointVector weights;
    for (int i = 0; i < kNumJoints; ++i) weights[i] = 0.5 * (dist(rng) + 1.0);
    const ImpairmentModel w(weights);
    JointVector qn;
    for (int i = 0; i < kNumJoints; ++i) qn[i] = dist(rng);

    JointTrajectory traj;
    traj.dt = 1.0 / 60.0;
    for (int k = 0; k < 257; ++k) {
      JointVector q;
      for (int i = 0; i < kNumJoints; ++i) q[i] = dist(rng);
      traj.samples.push_back(q);
    }

    double expected = 0.0;
    for (const JointVector& q : traj.samples) {
      double psi = 0.0;
      for (int i = 0; i < kNumJoints; ++i) {
        const double term = (1.0 - weights[i]) * (q[i] - qn[i]);
        psi += term * term;
      }
      expected += psi;
    }
    expected /= static_cast<double>(traj.samples.size());
    CHECK(mean_compensation_cost(traj, qn, w) == doctest::Approx(expected).epsilon(1e-12));
  }

  SUBCASE("empty trajectory is rejected") {
    JointTrajectory empty;
    empty.dt = 0.1;
    CHECK_THROWS_AS(mean_compensation_cost(empty, q_n, healthy), ValidationError);
  }
}

TEST_CASE("jerk cost") {
  SUBCASE("linear and quadratic trajectories have exactly zero jerk") {
    const double dt = 1.0 / 60.0;
    const auto linear = make_traj(dt, 61, [&](double t) {
      return JointVector::Constant(2.0 * t + 1.0).eval();
    });
    CHECK(jerk_cost(linear) <= 1e-18);
    const auto quadratic = make_traj(dt, 61, [&](double t) {
      return JointVector::Constant(3.0 * t * t + 2.0 * t + 1.0).eval();
    });
    CHECK(jerk_cost(quadratic) <= 1e-18);
  }

  SUBCASE("unit quintic calibrates against the closed-form integral") {
    // integral of squared jerk of the unit quintic over 1 s is 720
    const double dt = 1.0 / 240.0;
    const auto quintic = make_traj(dt, 241, [&](double t) {
      const double tau = t;
      const double s = tau * tau * tau * (10.0 + tau * (-15.0 + 6.0 * tau));
      return (s * unit(0)).eval();
    });
    const double j = jerk_cost(quintic);
    CHECK(std::abs(j - 720.0) / 720.0 <= 0.02);
  }

  SUBCASE("too few samples are rejected") {
    const auto tiny = make_traj(0.1, 3, [&](double) { return JointVector::Zero().eval(); });
    CHECK_THROWS_AS(jerk_cost(tiny), ValidationError);
  }

  SUBCASE("offset invariance and quadratic scaling") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    JointTrajectory traj;
    traj.dt = 0.02;
    for (int k = 0; k < 120; ++k) {
      JointVector q;
      for (int i = 0; i < kNumJoints; ++i) q[i] = dist(rng);
      traj.samples.push_back(q);
    }
    const double base = jerk_cost(traj);

    JointTrajectory shifted = traj;
    const JointVector offset = JointVector::Constant(0.7);
    for (auto& q : shifted.samples) q += offset;
    CHECK(jerk_cost(shifted) == doctest::Approx(base).epsilon(1e-9));

    JointTrajectory scaled = traj;
    for (auto& q : scaled.samples) q *= 3.0;
    CHECK(jerk_cost(scaled) == doctest::Approx(9.0 * base).epsilon(1e-12));
  }
}

TEST_CASE("interaction cost equals the compensation cost") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    JointVector q, qn, weights;
    for (int i = 0; i < kNumJoints; ++i) {
      q[i] = dist(rng);
      qn[i] = dist(rng);
      weights[i] = 0.5 * (dist(rng) + 1.0);
    }
    const ImpairmentModel w(weights);
    CHECK(interaction_cost(q, qn, w) == compensation_cost(q, qn, w));
  }
}

TEST_CASE("wrist excursion") {
  const JointVector q_ref = JointVector::Zero();
  const std::vector<int> wrist{6, 7};

  SUBCASE("constant trajectory has zero excursion") {
    const auto traj = make_traj(0.1, 5, [&](double) { return q_ref; });
    CHECK(wrist_excursion(traj, q_ref, wrist) == 0.0);
  }

  SUBCASE("a single six-degree deviation reports six degrees") {
    JointTrajectory traj;
    traj.dt = 0.1;
    traj.samples.push_back(q_ref);
    traj.samples.push_back(deg_to_rad(6.0) * unit(6));
    CHECK(wrist_excursion(traj, q_ref, wrist) == doctest::Approx(6.0).epsilon(1e-12));
  }

  SUBCASE("non-blocked joints are invisible") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    JointTrajectory traj;
    traj.dt = 0.1;
    for (int k = 0; k < 30; ++k) {
      JointVector q = q_ref;
      for (int i = 0; i < 6; ++i) q[i] = dist(rng);
      q[6] = 0.01 * dist(rng);
      q[7] = 0.01 * dist(rng);
      traj.samples.push_back(q);
    }
    const double with_noise = wrist_excursion(traj, q_ref, wrist);
    for (auto& q : traj.samples) {
      for (int i = 0; i < 6; ++i) q[i] = 0.0;
    }
    CHECK(wrist_excursion(traj, q_ref, wrist) == with_noise);
  }

  SUBCASE("empty or invalid blocked sets are rejected") {
    const auto traj = make_traj(0.1, 5, [&](double) { return q_ref; });
    CHECK_THROWS_AS(wrist_excursion(traj, q_ref, {}), ValidationError);
    CHECK_THROWS_AS(wrist_excursion(traj, q_ref, {8}), ValidationError);
  }
}

TEST_CASE("condition comparison") {
  MetricReport a;
  a.duration = 2.0;
  a.psi_bar = 0.4;
  a.psi_interaction = 0.8;
  a.jerk = 10.0;
  a.wrist_excursion_max_deg = 2.0;
  a.sample_count = 100;

  SUBCASE("identical reports change by zero percent") {
    const ComparisonSummary s = compare_conditions({a, a}, {a, a});
    CHECK(s.mean.psi_bar.defined);
    CHECK(s.mean.psi_bar.percent == 0.0);
    CHECK(s.mean.jerk.percent == 0.0);
    CHECK(s.per_scenario.size() == 2);
  }

  SUBCASE("halved jerk reports minus fifty percent") {
    MetricReport b = a;
    b.jerk = 5.0;
    const ComparisonSummary s = compare_conditions({a}, {b});
    CHECK(s.mean.jerk.percent == doctest::Approx(-50.0).epsilon(1e-12));
  }

  SUBCASE("zero baselines are flagged undefined") {
    MetricReport z = a;
    z.psi_bar = 0.0;
    const ComparisonSummary s = compare_conditions({z}, {a});
    CHECK_FALSE(s.mean.psi_bar.defined);
    CHECK(s.mean.jerk.defined);
  }

  SUBCASE("mismatched scenario sets are rejected") {
    CHECK_THROWS_AS(compare_conditions({a}, {a, a}), ValidationError);
    CHECK_THROWS_AS(compare_conditions({}, {}), ValidationError);
  }
}

TEST_CASE("mean compensation over concatenated halves averages the halves") {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  const ImpairmentModel w;
  JointVector qn;
  for (int i = 0; i < kNumJoints; ++i) qn[i] = dist(rng);

  JointTrajectory first, second, both;
  first.dt = second.dt = both.dt = 0.05;
  for (int k = 0; k < 40; ++k) {
    JointVector qa, qb;
    for (int i = 0; i < kNumJoints; ++i) {
      qa[i] = dist(rng);
      qb[i] = dist(rng);
    }
    first.samples.push_back(qa);
    second.samples.push_back(qb);
    both.samples.push_back(qa);
  }
  for (const auto& q : second.samples) both.samples.push_back(q);

  const double lhs = mean_compensation_cost(both, qn, w);
  const double rhs = 0.5 * (mean_compensation_cost(first, qn, w) +
                            mean_compensation_cost(second, qn, w));
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}
