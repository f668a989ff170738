#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "depthfuse/depth_channel.hpp"
#include "depthfuse/fusion.hpp"
#include "depthfuse/monocular_model.hpp"

namespace depthfuse {

enum class ScenarioKind { discrete_fwd_back, continuous_fwd_back, lateral_sweep };

std::string_view to_string(ScenarioKind kind);
// Accepts the CLI names (discrete, continuous, lateral) and the enum names.
ScenarioKind parse_scenario_kind(std::string_view name);

// Stereo depth error versus range: flat inside the optimal range, growing
// exponentially beyond it, with a positive overshoot bias.
struct DepthNoiseModel {
  double base_sigma = 0.005;          // m
  double optimal_max = 4.0;           // m
  double min_range = 0.4;             // m
  double growth_rate = 0.8;           // 1/m
  double overshoot_bias_rate = 0.05;  // m of bias per m beyond optimal_max
  double max_range = 10.0;            // m

  double sigma(double range) const;
  double bias(double range) const;
  void validate() const;
};

// Spurious depth returns, arriving in short bursts. Every burst frame draws
// its own offset of magnitude min_magnitude + |N(0, magnitude_sigma)|; the
// offset points away from the camera with probability positive_fraction.
struct OutlierInjection {
  double probability_per_frame = 0.03;  // long-run fraction of outlier frames
  double magnitude_sigma = 1.0;         // m
  double min_magnitude = 0.6;           // m
  double positive_fraction = 0.8;
  int burst_min = 1;  // frames
  int burst_max = 5;  // frames
  double edge_fov_multiplier = 4.0;  // lateral sweep only
  double edge_fraction = 0.8;        // of the half-FOV lateral extent

  void validate() const;
};

struct DiscreteProfile {
  double near = 1.5;        // m
  double far = 6.5;         // m
  double step = 1.0;        // m
  double pause = 3.0;       // s per plateau
  double ramp_speed = 0.5;  // m/s between plateaus
};

struct ContinuousProfile {
  double mean = 4.0;       // m
  double amplitude = 2.5;  // m
  double period = 20.0;    // s
};

struct LateralProfile {
  double distance = 3.0;        // m
  double sweep_fraction = 0.95; // of the half-FOV lateral extent
  double period = 16.0;         // s
};

struct CameraModel {
  ImageSize image;
  double hfov_deg = 87.0;

  double focal_px() const;
};

struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::discrete_fwd_back;
  double duration = 60.0;    // s
  double frame_rate = 30.0;  // Hz
  std::uint64_t seed = 0;
  DepthNoiseModel depth_noise;
  double keypoint_noise_px = 1.5;
  OutlierInjection outlier;
  DiscreteProfile discrete;
  ContinuousProfile continuous;
  LateralProfile lateral;
  CameraModel camera;
  MonocularModelParams model;
  // Ratio of the subject's S-H length to the one the model assumes.
  // 1.0 makes noiseless keypoints reproduce the true distance exactly.
  double height_mismatch = 1.0;

  void validate() const;
};

struct GroundTruthFrame {
  double timestamp = 0.0;
  double true_cb = 0.0;         // m
  double lateral_offset = 0.0;  // m
  KeypointFrame keypoints;      // noiseless
  bool in_model_seam = false;   // true_cb falls between the monocular model branches
  bool near_fov_edge = false;
};

struct SimulatedFrame {
  GroundTruthFrame truth;
  KeypointFrame keypoints;          // noisy; valid == false if off-image
  std::optional<double> sh_px;
  std::optional<double> depth_m;
  bool outlier_injected = false;

  SensorFrame sensor_frame() const { return {truth.timestamp, sh_px, depth_m}; }
};

double trajectory_distance(const ScenarioConfig& cfg, double t);
double trajectory_lateral_offset(const ScenarioConfig& cfg, double t);

std::vector<GroundTruthFrame> generate_trajectory(const ScenarioConfig& cfg);

// Deterministic in cfg.seed.
std::vector<SimulatedFrame> render_sensors(const std::vector<GroundTruthFrame>& truth,
                                           const ScenarioConfig& cfg);

inline std::vector<SimulatedFrame> simulate(const ScenarioConfig& cfg) {
  return render_sensors(generate_trajectory(cfg), cfg);
}

// Small synthetic depth image: background everywhere, `body_depth` on the
// rasterised S-H line, with a seeded fraction of line pixels turned into
// holes. Limited to 64x64 images.
DepthFrame synthesize_depth_frame(double timestamp, ImageSize size, const Pixel& shoulder_mid,
                                  const Pixel& hip_mid, double body_depth,
                                  double background_depth, double hole_fraction,
                                  std::uint64_t seed);

}  // namespace depthfuse
