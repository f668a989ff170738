#pragma once

#include <cstddef>
#include <vector>

#include "depthfuse/monocular_model.hpp"

namespace depthfuse {

struct PixelIndex {
  int col = 0;
  int row = 0;
  friend bool operator==(const PixelIndex&, const PixelIndex&) = default;
};

// Depth image aligned with the monocular frame. Row-major, meters,
// 0.0 means the sensor returned nothing for that pixel.
class DepthFrame {
 public:
  DepthFrame(double timestamp, int width, int height, std::vector<float> depth);
  DepthFrame(double timestamp, int width, int height, float fill = 0.0f);

  double timestamp() const { return timestamp_; }
  int width() const { return width_; }
  int height() const { return height_; }
  ImageSize size() const { return {width_, height_}; }

  float at(PixelIndex p) const { return depth_[index(p)]; }
  void set(PixelIndex p, float meters);
  const std::vector<float>& data() const { return depth_; }

 private:
  std::size_t index(PixelIndex p) const {
    return static_cast<std::size_t>(p.row) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(p.col);
  }

  double timestamp_;
  int width_;
  int height_;
  std::vector<float> depth_;
};

// Observed range of line lengths for which the mean is considered reliable.
inline constexpr std::size_t kMinLinePixels = 50;
inline constexpr std::size_t kMaxLinePixels = 350;

struct DepthLineSample {
  double timestamp = 0.0;
  std::size_t pixel_count = 0;
  std::size_t valid_count = 0;
  double mean_depth = 0.0;  // meters, meaningful when valid_count > 0
  bool outside_pixel_envelope = false;  // pixel_count not in [50, 350]

  bool valid() const { return valid_count > 0 && mean_depth > 0.0; }
};

// 8-connected Bresenham line between the rounded endpoints, inclusive,
// ordered from `a` to `b`. Throws OutOfRangeError if an endpoint rounds
// outside `bounds`.
std::vector<PixelIndex> rasterize_line(const Pixel& a, const Pixel& b, ImageSize bounds = {});

// Mean of the strictly positive depth values along the S-H line.
// Throws NoValidPixelsError when every pixel on the line is a hole.
DepthLineSample extract_cb_measurement(const DepthFrame& frame, const Pixel& shoulder_mid,
                                       const Pixel& hip_mid);

}  // namespace depthfuse
