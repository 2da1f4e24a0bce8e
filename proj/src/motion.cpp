#include "fusetrack/motion.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <string>

#include "fusetrack/error.hpp"

namespace fusetrack {

namespace {

constexpr double kMinExtent = 1e-6;

using MeasVector = Eigen::Matrix<double, 4, 1>;
using MeasMatrix = Eigen::Matrix<double, 4, 4>;
using GainMatrix = Eigen::Matrix<double, 8, 4>;

void require_finite(const KalmanState& state) {
  if (!state.mean.allFinite() || !state.covariance.allFinite()) {
    throw Error(ErrorCode::kNumeric, "non-finite Kalman state");
  }
}

void clamp_extent(StateVector& mean) {
  mean(2) = std::max(mean(2), kMinExtent);
  mean(3) = std::max(mean(3), kMinExtent);
}

void symmetrize(StateMatrix& m) { m = 0.5 * (m + m.transpose()).eval(); }

}  // namespace

void validate(const KalmanConfig& cfg) {
  auto positive = [](double v, const char* name) {
    if (!(std::isfinite(v) && v > 0.0)) {
      throw Error(ErrorCode::kValidation, std::string("kalman.") + name + " must be > 0");
    }
  };
  positive(cfg.process_noise_pos, "process_noise_pos");
  positive(cfg.process_noise_vel, "process_noise_vel");
  positive(cfg.measurement_noise, "measurement_noise");
  if (!(cfg.gate_threshold >= 0.0 && cfg.gate_threshold <= 1.0)) {
    throw Error(ErrorCode::kValidation, "kalman.gate_threshold must be in [0,1]");
  }
}

KalmanState kf_init(const BBox& box, const KalmanConfig& cfg) {
  require_valid(box);
  KalmanState s;
  s.mean << box.cx(), box.cy(), box.w, box.h, 0.0, 0.0, 0.0, 0.0;
  s.covariance.setZero();
  s.covariance.diagonal().head<4>().setConstant(cfg.measurement_noise);
  s.covariance.diagonal().tail<4>().setConstant(100.0 * cfg.process_noise_vel);
  return s;
}

KalmanState kf_predict(const KalmanState& state, const KalmanConfig& cfg) {
  require_finite(state);
  StateMatrix transition = StateMatrix::Identity();
  transition.topRightCorner<4, 4>().setIdentity();

  KalmanState out;
  out.mean = transition * state.mean;
  clamp_extent(out.mean);
  out.covariance = transition * state.covariance * transition.transpose();
  out.covariance.diagonal().head<4>().array() += cfg.process_noise_pos;
  out.covariance.diagonal().tail<4>().array() += cfg.process_noise_vel;
  symmetrize(out.covariance);
  return out;
}

KalmanState kf_correct(const KalmanState& state, const BBox& obs, const KalmanConfig& cfg) {
  require_finite(state);
  require_valid(obs);
  if (kf_iou(state, obs) < cfg.gate_threshold) return state;

  Eigen::Matrix<double, 4, 8> proj = Eigen::Matrix<double, 4, 8>::Zero();
  proj.leftCols<4>().setIdentity();

  MeasVector z;
  z << obs.cx(), obs.cy(), obs.w, obs.h;
  const MeasVector innovation = z - proj * state.mean;
  const MeasMatrix innovation_cov =
      proj * state.covariance * proj.transpose() +
      cfg.measurement_noise * MeasMatrix::Identity();

  Eigen::LLT<MeasMatrix> llt(innovation_cov);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::kNumeric, "singular innovation covariance");
  }
  const Eigen::Matrix<double, 8, 4> pht = state.covariance * proj.transpose();
  const GainMatrix gain = llt.solve(pht.transpose()).transpose();

  KalmanState out;
  out.mean = state.mean + gain * innovation;
  clamp_extent(out.mean);
  // Joseph form keeps the posterior symmetric PSD under round-off.
  const StateMatrix ikh = StateMatrix::Identity() - gain * proj;
  out.covariance = ikh * state.covariance * ikh.transpose() +
                   cfg.measurement_noise * gain * gain.transpose();
  symmetrize(out.covariance);
  require_finite(out);
  return out;
}

double kf_iou(const KalmanState& state, const BBox& candidate) {
  return iou(state.box(), candidate);
}

}  // namespace fusetrack
