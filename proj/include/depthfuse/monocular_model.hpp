#pragma once

#include <span>

#include "depthfuse/derivative_gate.hpp"

namespace depthfuse {

struct Pixel {
  double u = 0.0;  // column
  double v = 0.0;  // row
};

struct ImageSize {
  int width = 1280;
  int height = 720;

  bool contains(const Pixel& p) const {
    return p.u >= 0.0 && p.v >= 0.0 && p.u <= width - 1 && p.v <= height - 1;
  }
  double diagonal() const;
};

// Shoulder and hip midpoints detected on one monocular frame.
struct KeypointFrame {
  double timestamp = 0.0;
  Pixel shoulder_mid;
  Pixel hip_mid;
  bool valid = true;  // false when pose detection failed
};

// Piecewise logarithmic map from S-H pixel length x to camera-to-body
// distance in centimeters:
//
//   f(x) = branch1_scale * ln(x - branch1_shift) + branch1_offset,  x <  boundary
//   f(x) = branch2_scale * ln(x - branch2_shift) + branch2_offset,  x >= boundary
//
// The defaults were fitted for a 1.80 m tall subject.
struct MonocularModelParams {
  double branch1_scale = -48.03;
  double branch1_shift = 179.4;
  double branch1_offset = 401.0;
  double branch2_scale = -240.2;
  double branch2_shift = 47.3;
  double branch2_offset = 1457.0;
  double branch_boundary = 200.0;
  double assumed_height = 1.80;  // meters, documentation only

  void validate() const;
};

// Window and threshold for the leaning-subject filter on S-H length.
struct ShOutlierConfig {
  std::size_t window = 10;
  double rel_threshold = 1.25;
  std::size_t recovery_after = 10;

  DerivativeGateConfig gate_config() const { return {window, rel_threshold, recovery_after}; }
};

// Euclidean length of the S-H segment in pixels.
// Throws InvalidFrameError for invalid frames and DomainError when the two
// midpoints coincide.
double sh_pixel_distance(const KeypointFrame& frame);

// Camera-to-body distance in centimeters for an S-H length in pixels.
// Throws DomainError when the logarithm argument or the result is not
// strictly positive.
double monocular_cb_estimate(double sh_px, const MonocularModelParams& params = {});

// Pixel length that maps back to `cb_cm`. Distances up to f(boundary) are
// served by branch 2, distances above f(boundary^-) by branch 1. Distances
// in the seam between the two branches throw DomainError; results outside
// (0, max_px] throw OutOfRangeError.
double monocular_cb_inverse(double cb_cm, const MonocularModelParams& params = {},
                            double max_px = ImageSize{}.diagonal());

// |df/dx| in cm per pixel at `sh_px`. Grows without bound as x approaches
// branch1_shift, which is what limits the usable range of the model.
double monocular_sensitivity(double sh_px, const MonocularModelParams& params = {});

// Distance gap at the branch boundary: f(boundary^-) - f(boundary), in cm.
struct BranchSeam {
  double below_cm = 0.0;  // branch 1 evaluated at the boundary
  double above_cm = 0.0;  // branch 2 evaluated at the boundary
  double gap_cm() const { return below_cm - above_cm; }
};
BranchSeam branch_seam(const MonocularModelParams& params = {});

struct ShSample {
  double timestamp = 0.0;
  double sh_px = 0.0;
};

// True when the newest S-H sample changes faster than rel_threshold times
// the mean rate over the last `window` derivatives. Never flags during
// warm-up. Throws InsufficientHistoryError for fewer than two samples.
bool sh_outlier_check(std::span<const ShSample> history, const ShOutlierConfig& cfg = {});

}  // namespace depthfuse
