#include "depthfuse/monocular_model.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "depthfuse/errors.hpp"

namespace depthfuse {

double ImageSize::diagonal() const {
  return std::hypot(static_cast<double>(width), static_cast<double>(height));
}

void MonocularModelParams::validate() const {
  if (!(branch1_shift < branch_boundary) || !(branch2_shift < branch_boundary)) {
    throw ConfigError("monocular model: both branch shifts must lie below the branch boundary");
  }
  if (!(branch1_scale < 0.0) || !(branch2_scale < 0.0)) {
    throw ConfigError("monocular model: branch scales must be negative");
  }
}

double sh_pixel_distance(const KeypointFrame& frame) {
  if (!frame.valid) throw InvalidFrameError("keypoint frame is not valid");
  const double d = std::hypot(frame.hip_mid.u - frame.shoulder_mid.u,
                              frame.hip_mid.v - frame.shoulder_mid.v);
  if (!(d > 0.0)) throw DomainError("shoulder and hip midpoints coincide");
  return d;
}

double monocular_cb_estimate(double sh_px, const MonocularModelParams& p) {
  const bool lower = sh_px < p.branch_boundary;
  const double arg = sh_px - (lower ? p.branch1_shift : p.branch2_shift);
  if (!(arg > 0.0)) {
    throw DomainError("monocular model: S-H length " + std::to_string(sh_px) +
                      " px is outside the logarithm domain");
  }
  const double cb = lower ? p.branch1_scale * std::log(arg) + p.branch1_offset
                          : p.branch2_scale * std::log(arg) + p.branch2_offset;
  if (!(cb > 0.0) || !std::isfinite(cb)) {
    throw DomainError("monocular model: S-H length " + std::to_string(sh_px) +
                      " px maps to a non-positive distance");
  }
  return cb;
}

BranchSeam branch_seam(const MonocularModelParams& p) {
  return {p.branch1_scale * std::log(p.branch_boundary - p.branch1_shift) + p.branch1_offset,
          p.branch2_scale * std::log(p.branch_boundary - p.branch2_shift) + p.branch2_offset};
}

double monocular_cb_inverse(double cb_cm, const MonocularModelParams& p, double max_px) {
  if (!(cb_cm > 0.0)) throw OutOfRangeError("monocular inverse: distance must be positive");
  const BranchSeam seam = branch_seam(p);
  double x = 0.0;
  if (cb_cm <= seam.above_cm) {
    x = p.branch2_shift + std::exp((p.branch2_offset - cb_cm) / -p.branch2_scale);
  } else if (cb_cm > seam.below_cm) {
    x = p.branch1_shift + std::exp((p.branch1_offset - cb_cm) / -p.branch1_scale);
  } else {
    throw DomainError("monocular inverse: " + std::to_string(cb_cm) +
                      " cm falls in the seam between the model branches");
  }
  if (!(x > 0.0) || !(x <= max_px)) {
    throw OutOfRangeError("monocular inverse: " + std::to_string(cb_cm) +
                          " cm maps outside the image (" + std::to_string(x) + " px)");
  }
  return x;
}

double monocular_sensitivity(double sh_px, const MonocularModelParams& p) {
  const bool lower = sh_px < p.branch_boundary;
  const double arg = sh_px - (lower ? p.branch1_shift : p.branch2_shift);
  if (!(arg > 0.0)) throw DomainError("monocular sensitivity: outside the logarithm domain");
  return std::abs(lower ? p.branch1_scale : p.branch2_scale) / arg;
}

bool sh_outlier_check(std::span<const ShSample> history, const ShOutlierConfig& cfg) {
  std::vector<TimedValue> series;
  series.reserve(history.size());
  for (const auto& s : history) series.push_back({s.timestamp, s.sh_px});
  return latest_is_derivative_outlier(series, cfg.gate_config());
}

}  // namespace depthfuse
