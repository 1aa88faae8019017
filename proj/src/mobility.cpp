#include "remo/mobility.hpp"

#include <cmath>

#include "remo/errors.hpp"

namespace remo {

ImpairmentModel::ImpairmentModel() : weights_(JointVector::Zero()), complement_(JointVector::Ones()) {}

ImpairmentModel::ImpairmentModel(const JointVector& weights) : weights_(weights) {
  if (!weights.allFinite() || weights.minCoeff() < 0.0 || weights.maxCoeff() > 1.0) {
    throw ValidationError("ImpairmentModel: weights must lie in [0, 1]");
  }
  complement_ = JointVector::Ones() - weights_;
}

void RoMBounds::validate() const {
  if (!q_min.allFinite() || !q_max.allFinite()) {
    throw ValidationError("RoMBounds: non-finite bound");
  }
  for (int i = 0; i < kNumJoints; ++i) {
    if (q_min[i] > q_max[i]) {
      throw ValidationError("RoMBounds: q_min exceeds q_max at joint " + std::to_string(i + 1));
    }
  }
}

bool RoMBounds::contains(const JointVector& q, double tol) const {
  for (int i = 0; i < kNumJoints; ++i) {
    if (q[i] < q_min[i] - tol || q[i] > q_max[i] + tol) return false;
  }
  return true;
}

JointVector RoMBounds::clamp(const JointVector& q) const {
  return q.cwiseMax(q_min).cwiseMin(q_max);
}

void PostureContext::validate() const {
  if (!q_measured.allFinite() || !q_natural.allFinite()) {
    throw ValidationError("PostureContext: non-finite posture");
  }
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw ValidationError("PostureContext: alpha must be >= 0");
  }
  if (!(zeta >= 0.0) || !std::isfinite(zeta)) {
    throw ValidationError("PostureContext: zeta must be >= 0");
  }
}

double compensation_cost(const JointVector& q, const JointVector& q_natural,
                         const ImpairmentModel& w) {
  return (w.complement().cwiseProduct(q - q_natural)).squaredNorm();
}

ImpairedBounds impaired_bounds(const RoMBounds& healthy, const ImpairmentModel& w,
                               const JointVector& q_measured, double zeta) {
  if (!(zeta >= 0.0) || !std::isfinite(zeta)) {
    throw ValidationError("impaired_bounds: zeta must be >= 0");
  }
  healthy.validate();

  ImpairedBounds out;
  const JointVector q_m = healthy.clamp(q_measured);
  out.q_measured_clamped = (q_m - q_measured).cwiseAbs().maxCoeff() > 0.0;

  for (int i = 0; i < kNumJoints; ++i) {
    const double wi = w.weights()[i];
    // w = 0 and w = 1 reduce algebraically to the healthy range and to
    // [q_m +- zeta]; evaluate those limits directly so they hold bit-exactly.
    double lo, hi;
    if (wi == 0.0) {
      lo = healthy.q_min[i];
      hi = healthy.q_max[i];
    } else if (wi == 1.0) {
      lo = q_m[i] - zeta;
      hi = q_m[i] + zeta;
    } else {
      lo = healthy.q_min[i] + wi * ((q_m[i] - zeta) - healthy.q_min[i]);
      hi = healthy.q_max[i] - wi * (healthy.q_max[i] - (q_m[i] + zeta));
    }
    if (lo < healthy.q_min[i]) {
      lo = healthy.q_min[i];
      out.side_clamped[static_cast<std::size_t>(i)] = true;
    }
    if (hi > healthy.q_max[i]) {
      hi = healthy.q_max[i];
      out.side_clamped[static_cast<std::size_t>(i)] = true;
    }
    out.bounds.q_min[i] = lo;
    out.bounds.q_max[i] = hi;
  }
  out.bounds.validate();
  return out;
}

double posture_objective(const JointVector& q, const PostureContext& ctx,
                         const ImpairmentModel& w) {
  const double tracking = (w.weights().cwiseProduct(q - ctx.q_measured)).squaredNorm();
  return tracking + ctx.alpha * compensation_cost(q, ctx.q_natural, w);
}

JointVector posture_objective_gradient(const JointVector& q, const PostureContext& ctx,
                                       const ImpairmentModel& w) {
  const JointVector w2 = w.weights().cwiseProduct(w.weights());
  const JointVector c2 = w.complement().cwiseProduct(w.complement());
  return 2.0 * w2.cwiseProduct(q - ctx.q_measured) +
         2.0 * ctx.alpha * c2.cwiseProduct(q - ctx.q_natural);
}

}  // namespace remo
