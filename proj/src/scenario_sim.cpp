#include "depthfuse/scenario_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "depthfuse/errors.hpp"

namespace depthfuse {

std::string_view to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::discrete_fwd_back:
      return "discrete";
    case ScenarioKind::continuous_fwd_back:
      return "continuous";
    case ScenarioKind::lateral_sweep:
      return "lateral";
  }
  return "unknown";
}

ScenarioKind parse_scenario_kind(std::string_view name) {
  if (name == "discrete" || name == "discrete_fwd_back") return ScenarioKind::discrete_fwd_back;
  if (name == "continuous" || name == "continuous_fwd_back") {
    return ScenarioKind::continuous_fwd_back;
  }
  if (name == "lateral" || name == "lateral_sweep") return ScenarioKind::lateral_sweep;
  throw ConfigError("unknown scenario '" + std::string(name) + "'");
}

double DepthNoiseModel::sigma(double range) const {
  if (range <= optimal_max) return base_sigma;
  return base_sigma * std::exp(growth_rate * (range - optimal_max));
}

double DepthNoiseModel::bias(double range) const {
  return range > optimal_max ? overshoot_bias_rate * (range - optimal_max) : 0.0;
}

void DepthNoiseModel::validate() const {
  if (!(min_range < optimal_max && optimal_max < max_range)) {
    throw ConfigError("depth noise: require min_range < optimal_max < max_range");
  }
  if (!(base_sigma > 0.0)) throw ConfigError("depth noise: base_sigma must be > 0");
  if (!(growth_rate >= 0.0)) throw ConfigError("depth noise: growth_rate must be >= 0");
  if (!(overshoot_bias_rate >= 0.0)) {
    throw ConfigError("depth noise: overshoot_bias_rate must be >= 0");
  }
}

void OutlierInjection::validate() const {
  if (!(probability_per_frame >= 0.0 && probability_per_frame <= 1.0)) {
    throw ConfigError("outlier probability must lie in [0, 1]");
  }
  if (!(magnitude_sigma >= 0.0) || !(min_magnitude >= 0.0)) {
    throw ConfigError("outlier magnitudes must be >= 0");
  }
  if (!(positive_fraction >= 0.0 && positive_fraction <= 1.0)) {
    throw ConfigError("outlier positive_fraction must lie in [0, 1]");
  }
  if (burst_min < 1 || burst_max < burst_min) throw ConfigError("invalid outlier burst length");
  if (!(edge_fov_multiplier >= 1.0)) throw ConfigError("edge_fov_multiplier must be >= 1");
  if (!(edge_fraction > 0.0 && edge_fraction < 1.0)) {
    throw ConfigError("edge_fraction must lie in (0, 1)");
  }
}

double CameraModel::focal_px() const {
  const double half = hfov_deg * std::numbers::pi / 360.0;
  return 0.5 * image.width / std::tan(half);
}

namespace {

double half_fov(const CameraModel& cam) { return cam.hfov_deg * std::numbers::pi / 360.0; }

// Lateral offset at which a subject at `range` reaches the image edge.
double half_fov_extent(const CameraModel& cam, double range) {
  return range * std::sin(half_fov(cam));
}

std::pair<double, double> distance_bounds(const ScenarioConfig& cfg) {
  switch (cfg.kind) {
    case ScenarioKind::discrete_fwd_back:
      return {cfg.discrete.near, cfg.discrete.far};
    case ScenarioKind::continuous_fwd_back:
      return {cfg.continuous.mean - cfg.continuous.amplitude,
              cfg.continuous.mean + cfg.continuous.amplitude};
    case ScenarioKind::lateral_sweep:
      return {cfg.lateral.distance, cfg.lateral.distance};
  }
  return {0.0, 0.0};
}

double discrete_distance(const DiscreteProfile& d, double t) {
  const int levels = static_cast<int>(std::lround((d.far - d.near) / d.step)) + 1;
  if (levels < 2) return d.near;
  const double ramp = d.step / d.ramp_speed;
  const double leg = (levels - 1) * (d.pause + ramp);  // near -> far, excluding final pause
  const double cycle = 2.0 * leg;
  double tc = std::fmod(t, cycle);
  const bool outbound = tc < leg;
  if (!outbound) tc -= leg;
  const int segment = std::min(static_cast<int>(tc / (d.pause + ramp)), levels - 2);
  const double in_seg = tc - segment * (d.pause + ramp);
  double progress = static_cast<double>(segment);
  if (in_seg > d.pause) progress += std::min((in_seg - d.pause) / ramp, 1.0);
  const double level = outbound ? progress : (levels - 1) - progress;
  return d.near + level * d.step;
}

}  // namespace

void ScenarioConfig::validate() const {
  if (!(duration > 0.0)) throw ConfigError("scenario duration must be > 0");
  if (!(frame_rate > 0.0)) throw ConfigError("scenario frame_rate must be > 0");
  if (!(keypoint_noise_px >= 0.0)) throw ConfigError("keypoint noise must be >= 0");
  if (!(height_mismatch > 0.0)) throw ConfigError("height_mismatch must be > 0");
  depth_noise.validate();
  outlier.validate();
  model.validate();
  if (camera.image.width <= 0 || camera.image.height <= 0) {
    throw ConfigError("camera image size must be positive");
  }
  if (!(camera.hfov_deg > 0.0 && camera.hfov_deg < 180.0)) {
    throw ConfigError("camera hfov must lie in (0, 180) degrees");
  }
  switch (kind) {
    case ScenarioKind::discrete_fwd_back:
      if (!(discrete.step > 0.0) || !(discrete.far >= discrete.near) ||
          !(discrete.pause >= 0.0) || !(discrete.ramp_speed > 0.0)) {
        throw ConfigError("invalid discrete profile");
      }
      break;
    case ScenarioKind::continuous_fwd_back:
      if (!(continuous.amplitude >= 0.0) || !(continuous.period > 0.0)) {
        throw ConfigError("invalid continuous profile");
      }
      break;
    case ScenarioKind::lateral_sweep:
      if (!(lateral.sweep_fraction >= 0.0 && lateral.sweep_fraction < 1.0) ||
          !(lateral.period > 0.0)) {
        throw ConfigError("invalid lateral profile");
      }
      break;
  }
  const auto [lo, hi] = distance_bounds(*this);
  if (lo < 0.5 * depth_noise.min_range || hi > 1.2 * depth_noise.max_range) {
    throw ConfigError("trajectory distance must stay within [0.5 min_range, 1.2 max_range]");
  }
}

double trajectory_distance(const ScenarioConfig& cfg, double t) {
  switch (cfg.kind) {
    case ScenarioKind::discrete_fwd_back:
      return discrete_distance(cfg.discrete, t);
    case ScenarioKind::continuous_fwd_back:
      return cfg.continuous.mean -
             cfg.continuous.amplitude * std::cos(2.0 * std::numbers::pi * t / cfg.continuous.period);
    case ScenarioKind::lateral_sweep:
      return cfg.lateral.distance;
  }
  return 0.0;
}

double trajectory_lateral_offset(const ScenarioConfig& cfg, double t) {
  if (cfg.kind != ScenarioKind::lateral_sweep) return 0.0;
  const double extent = half_fov_extent(cfg.camera, cfg.lateral.distance);
  return cfg.lateral.sweep_fraction * extent *
         std::sin(2.0 * std::numbers::pi * t / cfg.lateral.period);
}

std::vector<GroundTruthFrame> generate_trajectory(const ScenarioConfig& cfg) {
  cfg.validate();
  const auto n = static_cast<std::size_t>(std::ceil(cfg.duration * cfg.frame_rate - 1e-9));
  const double focal = cfg.camera.focal_px();
  const double cx = 0.5 * (cfg.camera.image.width - 1);
  const double cy = 0.5 * (cfg.camera.image.height - 1);
  const BranchSeam seam = branch_seam(cfg.model);

  std::vector<GroundTruthFrame> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    GroundTruthFrame g;
    g.timestamp = static_cast<double>(k) / cfg.frame_rate;
    g.true_cb = trajectory_distance(cfg, g.timestamp);
    g.lateral_offset = trajectory_lateral_offset(cfg, g.timestamp);
    g.near_fov_edge = cfg.kind == ScenarioKind::lateral_sweep &&
                      std::abs(g.lateral_offset) >
                          cfg.outlier.edge_fraction * half_fov_extent(cfg.camera, g.true_cb);

    const double cb_cm = g.true_cb * 100.0;
    double sh_px = 0.0;
    g.keypoints.timestamp = g.timestamp;
    g.keypoints.valid = true;
    if (cb_cm > seam.above_cm && cb_cm <= seam.below_cm) {
      // No pixel length maps into the seam; the boundary pixel is the
      // closest the model gets.
      g.in_model_seam = true;
      sh_px = cfg.model.branch_boundary;
    } else {
      try {
        sh_px = monocular_cb_inverse(cb_cm, cfg.model, cfg.camera.image.diagonal());
      } catch (const Error&) {
        g.keypoints.valid = false;
      }
    }
    sh_px *= cfg.height_mismatch;

    const double bearing = std::asin(std::clamp(g.lateral_offset / g.true_cb, -1.0, 1.0));
    const double u = cx + focal * std::tan(bearing);
    g.keypoints.shoulder_mid = {u, cy - 0.5 * sh_px};
    g.keypoints.hip_mid = {u, cy + 0.5 * sh_px};
    if (!cfg.camera.image.contains(g.keypoints.shoulder_mid) ||
        !cfg.camera.image.contains(g.keypoints.hip_mid)) {
      g.keypoints.valid = false;
    }
    out.push_back(g);
  }
  return out;
}

std::vector<SimulatedFrame> render_sensors(const std::vector<GroundTruthFrame>& truth,
                                           const ScenarioConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> unit_normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit_uniform(0.0, 1.0);
  std::uniform_int_distribution<int> burst_length(cfg.outlier.burst_min, cfg.outlier.burst_max);

  const OutlierInjection& oi = cfg.outlier;
  const double mean_burst = 0.5 * (oi.burst_min + oi.burst_max);
  // Burst start probability per clean frame that yields a long-run outlier
  // frame fraction of p.
  auto start_probability = [&](double p) {
    if (p >= 1.0) return 1.0;
    return std::min(1.0, p / (mean_burst * (1.0 - p)));
  };

  std::vector<SimulatedFrame> out;
  out.reserve(truth.size());
  int burst_remaining = 0;
  for (const auto& g : truth) {
    // Fixed draw order per frame keeps streams aligned across configs.
    const double n_su = unit_normal(rng);
    const double n_sv = unit_normal(rng);
    const double n_hu = unit_normal(rng);
    const double n_hv = unit_normal(rng);
    const double n_depth = unit_normal(rng);
    const double u_start = unit_uniform(rng);
    const int len = burst_length(rng);
    const double n_mag = unit_normal(rng);
    const double u_sign = unit_uniform(rng);

    SimulatedFrame f;
    f.truth = g;
    f.keypoints = g.keypoints;
    if (f.keypoints.valid) {
      const double s = cfg.keypoint_noise_px;
      f.keypoints.shoulder_mid.u += s * n_su;
      f.keypoints.shoulder_mid.v += s * n_sv;
      f.keypoints.hip_mid.u += s * n_hu;
      f.keypoints.hip_mid.v += s * n_hv;
      if (cfg.camera.image.contains(f.keypoints.shoulder_mid) &&
          cfg.camera.image.contains(f.keypoints.hip_mid)) {
        try {
          f.sh_px = sh_pixel_distance(f.keypoints);
        } catch (const DomainError&) {
          f.keypoints.valid = false;
        }
      } else {
        f.keypoints.valid = false;
      }
    }

    double p = oi.probability_per_frame;
    if (g.near_fov_edge) p = std::min(1.0, p * oi.edge_fov_multiplier);
    if (burst_remaining == 0 && u_start < start_probability(p)) burst_remaining = len;
    if (burst_remaining > 0) {
      f.outlier_injected = true;
      --burst_remaining;
    }

    const DepthNoiseModel& dn = cfg.depth_noise;
    if (g.true_cb >= dn.min_range && g.true_cb <= dn.max_range) {
      double z = g.true_cb + dn.bias(g.true_cb) + dn.sigma(g.true_cb) * n_depth;
      if (f.outlier_injected) {
        const double magnitude = oi.min_magnitude + oi.magnitude_sigma * std::abs(n_mag);
        const bool away = u_sign < oi.positive_fraction || z - magnitude < dn.min_range;
        z += away ? magnitude : -magnitude;
      }
      if (z > 0.0) f.depth_m = z;
    }
    out.push_back(f);
  }
  return out;
}

DepthFrame synthesize_depth_frame(double timestamp, ImageSize size, const Pixel& shoulder_mid,
                                  const Pixel& hip_mid, double body_depth,
                                  double background_depth, double hole_fraction,
                                  std::uint64_t seed) {
  if (size.width > 64 || size.height > 64) {
    throw ConfigError("synthetic depth frames are limited to 64x64");
  }
  if (!(hole_fraction >= 0.0 && hole_fraction <= 1.0)) {
    throw ConfigError("hole_fraction must lie in [0, 1]");
  }
  DepthFrame frame(timestamp, size.width, size.height, static_cast<float>(background_depth));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit_uniform(0.0, 1.0);
  for (const auto& px : rasterize_line(shoulder_mid, hip_mid, size)) {
    frame.set(px, unit_uniform(rng) < hole_fraction ? 0.0f : static_cast<float>(body_depth));
  }
  return frame;
}

}  // namespace depthfuse
