#include "depthfuse/ekf.hpp"

#include <string>

#include "depthfuse/errors.hpp"

namespace depthfuse {

void NoiseConfig::validate() const {
  if (!(sigma_p_sq > 0.0) || !(sigma_pdot_sq > 0.0) || !(sigma_z_sq > 0.0)) {
    throw ConfigError("noise variances must be strictly positive");
  }
}

Prediction ekf_predict(const FilterState& state, double dt, const NoiseConfig& noise,
                       double min_distance) {
  if (!(dt > 0.0)) throw DomainError("ekf_predict: dt must be positive, got " + std::to_string(dt));

  Eigen::Matrix2d F;
  F << 1.0, dt, 0.0, 1.0;
  const Eigen::Matrix2d Q = Eigen::Vector2d(noise.sigma_p_sq, noise.sigma_pdot_sq).asDiagonal();

  Prediction out;
  out.state.x = F * state.x;
  out.state.P = F * state.P * F.transpose() + Q;
  out.state.timestamp = state.timestamp + dt;
  if (!(out.state.x(0) > 0.0)) {
    out.state.x(0) = min_distance;
    out.clamped = true;
  }
  return out;
}

double distance_gain(const FilterState& state, double r) {
  return state.P(0, 0) / (state.P(0, 0) + r);
}

FilterState ekf_correct(const FilterState& state, double z, double r) {
  if (!(z > 0.0)) throw DomainError("ekf_correct: measurement must be positive");

  const Eigen::RowVector2d H(1.0, 0.0);
  const double innovation_var = H * state.P * H.transpose() + r;
  const Eigen::Vector2d K = state.P * H.transpose() / innovation_var;

  FilterState out = state;
  out.x = state.x + K * (z - state.x(0));
  out.P = (Eigen::Matrix2d::Identity() - K * H) * state.P;
  out.P = 0.5 * (out.P + out.P.transpose()).eval();
  return out;
}

}  // namespace depthfuse
