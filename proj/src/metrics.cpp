#include "remo/metrics.hpp"

#include <cmath>

#include "remo/errors.hpp"

namespace remo {

double mean_compensation_cost(const JointTrajectory& traj, const JointVector& q_natural,
                              const ImpairmentModel& w) {
  if (traj.samples.empty()) {
    throw ValidationError("mean_compensation_cost: empty trajectory");
  }
  double sum = 0.0;
  for (const JointVector& q : traj.samples) {
    sum += compensation_cost(q, q_natural, w);
  }
  return sum / static_cast<double>(traj.samples.size());
}

std::vector<double> differentiate_series(const std::vector<double>& x, double dt) {
  const std::size_t n = x.size();
  std::vector<double> d(n);
  for (std::size_t k = 1; k + 1 < n; ++k) {
    d[k] = (x[k + 1] - x[k - 1]) / (2.0 * dt);
  }
  d[0] = (-11.0 * x[0] + 18.0 * x[1] - 9.0 * x[2] + 2.0 * x[3]) / (6.0 * dt);
  d[n - 1] = (11.0 * x[n - 1] - 18.0 * x[n - 2] + 9.0 * x[n - 3] - 2.0 * x[n - 4]) / (6.0 * dt);
  return d;
}

double jerk_cost(const JointTrajectory& traj) {
  if (traj.samples.size() < 4) {
    throw ValidationError("jerk_cost: at least 4 samples required");
  }
  if (!(traj.dt > 0.0)) {
    throw ValidationError("jerk_cost: dt must be positive");
  }
  const std::size_t n = traj.samples.size();
  double total = 0.0;
  std::vector<double> series(n);
  for (int j = 0; j < kNumJoints; ++j) {
    for (std::size_t k = 0; k < n; ++k) series[k] = traj.samples[k][j];
    const std::vector<double> vel = differentiate_series(series, traj.dt);
    const std::vector<double> acc = differentiate_series(vel, traj.dt);
    const std::vector<double> jerk = differentiate_series(acc, traj.dt);
    for (double v : jerk) total += v * v;
  }
  return traj.dt * total;
}

double interaction_cost(const JointVector& q_final, const JointVector& q_natural,
                        const ImpairmentModel& w) {
  return compensation_cost(q_final, q_natural, w);
}

double wrist_excursion(const JointTrajectory& traj, const JointVector& q_ref,
                       const std::vector<int>& blocked_indices) {
  if (blocked_indices.empty()) {
    throw ValidationError("wrist_excursion: blocked index set is empty");
  }
  for (int i : blocked_indices) {
    if (i < 0 || i >= kNumJoints) {
      throw ValidationError("wrist_excursion: joint index out of range");
    }
  }
  double worst_sq = 0.0;
  for (const JointVector& q : traj.samples) {
    double sq = 0.0;
    for (int i : blocked_indices) {
      const double dev = q[i] - q_ref[i];
      sq += dev * dev;
    }
    worst_sq = std::max(worst_sq, sq);
  }
  return rad_to_deg(std::sqrt(worst_sq));
}

namespace {

PercentChange percent_change(double a, double b) {
  PercentChange pc;
  if (a != 0.0) {
    pc.percent = 100.0 * (b - a) / a;
    pc.defined = true;
  }
  return pc;
}

void accumulate(PercentChange& mean, int& count, const PercentChange& pc) {
  if (pc.defined) {
    mean.percent += pc.percent;
    ++count;
  }
}

void finalize(PercentChange& mean, int count) {
  if (count > 0) {
    mean.percent /= static_cast<double>(count);
    mean.defined = true;
  } else {
    mean.percent = 0.0;
  }
}

}  // namespace

ComparisonSummary compare_conditions(const std::vector<MetricReport>& a,
                                     const std::vector<MetricReport>& b) {
  if (a.empty() || b.empty()) {
    throw ValidationError("compare_conditions: empty report list");
  }
  if (a.size() != b.size()) {
    throw ValidationError("compare_conditions: mismatched scenario sets");
  }

  ComparisonSummary summary;
  summary.per_scenario.resize(a.size());
  int n_dur = 0, n_psi = 0, n_int = 0, n_jerk = 0, n_wrist = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ComparisonRow& row = summary.per_scenario[i];
    row.duration = percent_change(a[i].duration, b[i].duration);
    row.psi_bar = percent_change(a[i].psi_bar, b[i].psi_bar);
    row.psi_interaction = percent_change(a[i].psi_interaction, b[i].psi_interaction);
    row.jerk = percent_change(a[i].jerk, b[i].jerk);
    row.wrist_excursion = percent_change(a[i].wrist_excursion_max_deg, b[i].wrist_excursion_max_deg);
    accumulate(summary.mean.duration, n_dur, row.duration);
    accumulate(summary.mean.psi_bar, n_psi, row.psi_bar);
    accumulate(summary.mean.psi_interaction, n_int, row.psi_interaction);
    accumulate(summary.mean.jerk, n_jerk, row.jerk);
    accumulate(summary.mean.wrist_excursion, n_wrist, row.wrist_excursion);
  }
  finalize(summary.mean.duration, n_dur);
  finalize(summary.mean.psi_bar, n_psi);
  finalize(summary.mean.psi_interaction, n_int);
  finalize(summary.mean.jerk, n_jerk);
  finalize(summary.mean.wrist_excursion, n_wrist);
  return summary;
}

}  // namespace remo
