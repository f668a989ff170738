#pragma once

#include <cstddef>
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "depthfuse/depth_channel.hpp"
#include "depthfuse/derivative_gate.hpp"
#include "depthfuse/ekf.hpp"
#include "depthfuse/monocular_model.hpp"

namespace depthfuse {

struct GateConfig {
  std::size_t window = 10;
  double rel_threshold = 1.25;
  std::size_t recovery_after = 20;

  DerivativeGateConfig gate_config() const { return {window, rel_threshold, recovery_after}; }
};

// How the monocular channel drives the prediction step.
struct MonocularVelocityConfig {
  // Valid estimates in the least-squares slope. 2 is a plain finite
  // difference of consecutive estimates.
  std::size_t window = 10;
  // Estimates older than this (seconds) are dropped from the slope window.
  double max_age = 0.5;
  // Frames whose monocular model slope |df/dx| exceeds this (cm/px) do not feed the
  // velocity: one pixel of keypoint jitter would move them by more.
  double max_sensitivity_cm_per_px = 2.0;
  // Physical bound on |p_dot| in m/s.
  double max_speed = 3.0;
  // Optional second measurement channel: also correct with the monocular
  // distance using this variance (m^2). Off by default.
  bool as_measurement = false;
  double measurement_variance = 0.04;
};

struct InitConfig {
  double var_p = 0.25;     // m^2
  double var_pdot = 1.0;   // m^2/s^2
  // Without any depth sample during this many frames, the first valid
  // monocular estimate initialises the filter.
  std::size_t depth_wait_frames = 10;
};

struct FusionConfig {
  MonocularModelParams model;
  ShOutlierConfig sh_outlier;
  NoiseConfig noise;
  GateConfig gate;
  MonocularVelocityConfig velocity;
  InitConfig init;
  double min_distance = kMinDistance;

  void validate() const;
};

// One time step of paired sensor data. Either channel may be missing.
struct SensorFrame {
  double t = 0.0;
  std::optional<double> sh_px;    // S-H length in pixels
  std::optional<double> depth_m;  // mean depth along the S-H line

  static SensorFrame from(double t, const std::optional<KeypointFrame>& kp,
                          const std::optional<DepthLineSample>& depth);
};

struct FusionOutput {
  double timestamp = 0.0;
  std::optional<double> fused_cb;      // meters; absent until initialised
  std::optional<double> monocular_cb;  // meters, this frame's monocular model estimate
  std::optional<double> depth_cb;      // meters, this frame's depth measurement
  bool gate_open = false;              // depth sample was used
  double covariance_trace = 0.0;       // m^2 (mixed units, aggregate only)

  // Diagnostics.
  std::optional<double> predicted_cb;  // prior distance before correction
  double velocity_used = 0.0;          // p_dot fed to the prediction
  bool monocular_velocity = false;     // velocity came from the monocular slope
  bool sh_outlier = false;
  bool clamped = false;
  bool no_modality = false;
  bool initialised_here = false;
};

// Sequential fusion filter for one tracked subject. Not thread-safe; a
// single instance must be driven strictly in timestamp order.
class FusionFilter {
 public:
  explicit FusionFilter(FusionConfig cfg = {});

  // Processes one frame. Throws NonMonotoneTimestampError(0, ...) when t
  // goes backwards.
  FusionOutput step(const SensorFrame& frame);

  bool initialised() const { return initialised_; }
  const FilterState& state() const { return state_; }
  const FusionConfig& config() const { return cfg_; }

 private:
  std::optional<double> monocular_slope() const;
  void initialise(double t, double p, FusionOutput& out);

  FusionConfig cfg_;
  FilterState state_;
  bool initialised_ = false;
  std::size_t frames_seen_ = 0;
  std::optional<double> last_t_;
  DerivativeGate depth_gate_;
  DerivativeGate sh_gate_;
  std::deque<TimedValue> mono_history_;
};

// Replays `depth_history` (timestamp, depth in meters) through the depth
// gate and reports whether the newest sample is rejected.
bool gate_check(std::span<const TimedValue> depth_history, const GateConfig& cfg = {});

// Runs a fresh filter over a time-ordered stream, one output per frame.
// Throws NonMonotoneTimestampError carrying the offending index.
std::vector<FusionOutput> run_fusion(std::span<const SensorFrame> stream,
                                     const FusionConfig& cfg = {});

}  // namespace depthfuse
