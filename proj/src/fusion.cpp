#include "depthfuse/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "depthfuse/errors.hpp"

namespace depthfuse {

void FusionConfig::validate() const {
  model.validate();
  noise.validate();
  sh_outlier.gate_config().validate();
  gate.gate_config().validate();
  if (velocity.window < 2) throw ConfigError("monocular velocity window must be >= 2");
  if (!(velocity.max_age > 0.0)) throw ConfigError("monocular velocity max_age must be > 0");
  if (!(velocity.max_sensitivity_cm_per_px > 0.0)) {
    throw ConfigError("monocular velocity max_sensitivity must be > 0");
  }
  if (!(velocity.max_speed > 0.0)) throw ConfigError("monocular velocity max_speed must be > 0");
  if (!(velocity.measurement_variance > 0.0)) {
    throw ConfigError("monocular measurement variance must be > 0");
  }
  if (!(init.var_p > 0.0) || !(init.var_pdot > 0.0)) {
    throw ConfigError("initial variances must be > 0");
  }
  if (!(min_distance > 0.0)) throw ConfigError("min_distance must be > 0");
}

SensorFrame SensorFrame::from(double t, const std::optional<KeypointFrame>& kp,
                              const std::optional<DepthLineSample>& depth) {
  SensorFrame f;
  f.t = t;
  if (kp && kp->valid) f.sh_px = sh_pixel_distance(*kp);
  if (depth && depth->valid()) f.depth_m = depth->mean_depth;
  return f;
}

FusionFilter::FusionFilter(FusionConfig cfg)
    : cfg_(std::move(cfg)),
      depth_gate_(cfg_.gate.gate_config()),
      sh_gate_(cfg_.sh_outlier.gate_config()) {
  cfg_.validate();
}

std::optional<double> FusionFilter::monocular_slope() const {
  if (mono_history_.size() < 2) return std::nullopt;
  double t_mean = 0.0;
  double v_mean = 0.0;
  for (const auto& s : mono_history_) {
    t_mean += s.t;
    v_mean += s.value;
  }
  const auto n = static_cast<double>(mono_history_.size());
  t_mean /= n;
  v_mean /= n;
  double num = 0.0;
  double den = 0.0;
  for (const auto& s : mono_history_) {
    num += (s.t - t_mean) * (s.value - v_mean);
    den += (s.t - t_mean) * (s.t - t_mean);
  }
  if (!(den > 0.0)) return std::nullopt;
  return num / den;
}

void FusionFilter::initialise(double t, double p, FusionOutput& out) {
  state_.x = Eigen::Vector2d(p, 0.0);
  state_.P = Eigen::Vector2d(cfg_.init.var_p, cfg_.init.var_pdot).asDiagonal();
  state_.timestamp = t;
  initialised_ = true;
  out.initialised_here = true;
  out.fused_cb = p;
  out.covariance_trace = state_.P.trace();
}

FusionOutput FusionFilter::step(const SensorFrame& frame) {
  const double t = frame.t;
  if (!std::isfinite(t)) throw NonMonotoneTimestampError(0, "timestamp is not finite");
  if (last_t_ && !(t > *last_t_)) {
    throw NonMonotoneTimestampError(0, "timestamp " + std::to_string(t) +
                                           " does not follow " + std::to_string(*last_t_));
  }
  last_t_ = t;
  ++frames_seen_;

  FusionOutput out;
  out.timestamp = t;
  out.no_modality = !frame.sh_px && !frame.depth_m;

  // Monocular channel.
  bool mono_usable = false;
  if (frame.sh_px && std::isfinite(*frame.sh_px) && *frame.sh_px > 0.0) {
    out.sh_outlier = sh_gate_.update(t, *frame.sh_px);
    try {
      out.monocular_cb = monocular_cb_estimate(*frame.sh_px, cfg_.model) / 100.0;
    } catch (const DomainError&) {
    }
    if (out.monocular_cb && !out.sh_outlier) {
      mono_usable = true;
      if (monocular_sensitivity(*frame.sh_px, cfg_.model) <=
          cfg_.velocity.max_sensitivity_cm_per_px) {
        mono_history_.push_back({t, *out.monocular_cb});
        if (mono_history_.size() > cfg_.velocity.window) mono_history_.pop_front();
      }
    }
  }
  while (!mono_history_.empty() && t - mono_history_.front().t > cfg_.velocity.max_age) {
    mono_history_.pop_front();
  }
  const bool fresh_mono_sample = !mono_history_.empty() && mono_history_.back().t == t;

  // Depth channel.
  bool depth_outlier = false;
  if (frame.depth_m && std::isfinite(*frame.depth_m) && *frame.depth_m > 0.0) {
    out.depth_cb = *frame.depth_m;
    depth_outlier = depth_gate_.update(t, *frame.depth_m);
  }

  if (!initialised_) {
    if (out.depth_cb) {
      initialise(t, *out.depth_cb, out);
      out.gate_open = true;
    } else if (frames_seen_ > cfg_.init.depth_wait_frames && out.monocular_cb) {
      initialise(t, *out.monocular_cb, out);
    }
    return out;
  }

  // Prediction, with the distance rate taken from the monocular channel
  // whenever this frame produced a usable estimate.
  double velocity = state_.p_dot();
  if (fresh_mono_sample) {
    if (auto slope = monocular_slope()) {
      velocity = std::clamp(*slope, -cfg_.velocity.max_speed, cfg_.velocity.max_speed);
      out.monocular_velocity = true;
    }
  }
  state_.x(1) = velocity;
  out.velocity_used = velocity;

  const Prediction pred = ekf_predict(state_, t - state_.timestamp, cfg_.noise, cfg_.min_distance);
  state_ = pred.state;
  state_.timestamp = t;
  out.clamped = pred.clamped;
  out.predicted_cb = state_.p();

  if (out.depth_cb && !depth_outlier) {
    state_ = ekf_correct(state_, *out.depth_cb, cfg_.noise);
    out.gate_open = true;
  }
  if (cfg_.velocity.as_measurement && mono_usable) {
    state_ = ekf_correct(state_, *out.monocular_cb, cfg_.velocity.measurement_variance);
  }

  out.fused_cb = state_.p();
  out.covariance_trace = state_.P.trace();
  return out;
}

bool gate_check(std::span<const TimedValue> depth_history, const GateConfig& cfg) {
  return latest_is_derivative_outlier(depth_history, cfg.gate_config());
}

std::vector<FusionOutput> run_fusion(std::span<const SensorFrame> stream,
                                     const FusionConfig& cfg) {
  FusionFilter filter(cfg);
  std::vector<FusionOutput> out;
  out.reserve(stream.size());
  for (std::size_t i = 0; i < stream.size(); ++i) {
    if (i > 0 && !(stream[i].t > stream[i - 1].t)) {
      throw NonMonotoneTimestampError(i, "frame " + std::to_string(i) + ": timestamp " +
                                             std::to_string(stream[i].t) +
                                             " is not after the previous frame");
    }
    out.push_back(filter.step(stream[i]));
  }
  return out;
}

}  // namespace depthfuse
