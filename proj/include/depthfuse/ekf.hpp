#pragma once

#include <Eigen/Dense>

namespace depthfuse {

// Distance and distance rate along the camera-to-body ray (meters, m/s).
struct FilterState {
  Eigen::Vector2d x = Eigen::Vector2d::Zero();  // [p, p_dot]
  Eigen::Matrix2d P = Eigen::Matrix2d::Identity();
  double timestamp = 0.0;

  double p() const { return x(0); }
  double p_dot() const { return x(1); }
};

struct NoiseConfig {
  double sigma_p_sq = 0.02;    // m^2, process noise on distance
  double sigma_pdot_sq = 0.8;  // m^2/s^2, process noise on distance rate
  double sigma_z_sq = 0.018;   // m^2, depth measurement variance

  void validate() const;
};

inline constexpr double kMinDistance = 0.05;

struct Prediction {
  FilterState state;
  bool clamped = false;  // predicted distance was non-positive and floored
};

// Constant-velocity propagation: x' = F x, P' = F P F^T + Q,
// F = [[1, dt], [0, 1]], Q = diag(sigma_p_sq, sigma_pdot_sq).
// Throws DomainError for dt <= 0.
Prediction ekf_predict(const FilterState& state, double dt, const NoiseConfig& noise,
                       double min_distance = kMinDistance);

// Direct distance measurement, H = [1, 0], R = r. P' = (I - K H) P,
// then symmetrised.
// Throws DomainError for z <= 0.
FilterState ekf_correct(const FilterState& state, double z, double r);
inline FilterState ekf_correct(const FilterState& state, double z, const NoiseConfig& noise) {
  return ekf_correct(state, z, noise.sigma_z_sq);
}

// Distance component of the Kalman gain for a measurement of variance r.
double distance_gain(const FilterState& state, double r);

}  // namespace depthfuse
