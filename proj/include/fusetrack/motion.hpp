#pragma once

#include <Eigen/Core>

#include "fusetrack/geometry.hpp"

namespace fusetrack {

using StateVector = Eigen::Matrix<double, 8, 1>;
using StateMatrix = Eigen::Matrix<double, 8, 8>;

/// Constant-velocity box state: (cx, cy, w, h, v_cx, v_cy, v_w, v_h), pixels
/// and pixels/frame.
struct KalmanState {
  StateVector mean = StateVector::Zero();
  StateMatrix covariance = StateMatrix::Zero();

  BBox box() const { return BBox::from_center(mean(0), mean(1), mean(2), mean(3)); }
};

struct KalmanConfig {
  double process_noise_pos = 1.0;
  double process_noise_vel = 0.01;
  double measurement_noise = 1.0;
  // Minimum KF-IoU between prediction and observation for a correction to be
  // applied. 0 disables gating.
  double gate_threshold = 0.0;
};

void validate(const KalmanConfig& cfg);

/// State seeded at `box` with zero velocity. Position variance equals the
/// measurement noise; velocity variance is 100x the velocity process noise.
KalmanState kf_init(const BBox& box, const KalmanConfig& cfg);

KalmanState kf_predict(const KalmanState& state, const KalmanConfig& cfg);

/// Kalman update against (cx, cy, w, h) of `obs`. When the KF-IoU of the
/// state against `obs` falls below the gate threshold the state is returned
/// unchanged.
KalmanState kf_correct(const KalmanState& state, const BBox& obs, const KalmanConfig& cfg);

double kf_iou(const KalmanState& state, const BBox& candidate);

}  // namespace fusetrack
