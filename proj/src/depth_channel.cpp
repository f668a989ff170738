#include "depthfuse/depth_channel.hpp"

#include <cmath>
#include <algorithm>
#include <cstdlib>
#include <string>

#include "depthfuse/errors.hpp"

namespace depthfuse {

DepthFrame::DepthFrame(double timestamp, int width, int height, std::vector<float> depth)
    : timestamp_(timestamp), width_(width), height_(height), depth_(std::move(depth)) {
  if (width <= 0 || height <= 0) throw ConfigError("depth frame dimensions must be positive");
  if (depth_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw ConfigError("depth frame buffer does not match width x height");
  }
  for (float d : depth_) {
    if (!std::isfinite(d) || d < 0.0f) throw ConfigError("depth values must be finite and >= 0");
  }
}

DepthFrame::DepthFrame(double timestamp, int width, int height, float fill)
    : DepthFrame(timestamp, width, height,
                 std::vector<float>(static_cast<std::size_t>(std::max(width, 0)) *
                                        static_cast<std::size_t>(std::max(height, 0)),
                                    fill)) {}

void DepthFrame::set(PixelIndex p, float meters) {
  if (p.col < 0 || p.row < 0 || p.col >= width_ || p.row >= height_) {
    throw OutOfRangeError("depth frame pixel out of bounds");
  }
  if (!std::isfinite(meters) || meters < 0.0f) throw ConfigError("depth must be finite and >= 0");
  depth_[index(p)] = meters;
}

namespace {

PixelIndex round_into(const Pixel& p, ImageSize bounds) {
  const PixelIndex r{static_cast<int>(std::lround(p.u)), static_cast<int>(std::lround(p.v))};
  if (r.col < 0 || r.row < 0 || r.col >= bounds.width || r.row >= bounds.height) {
    throw OutOfRangeError("line endpoint (" + std::to_string(p.u) + ", " + std::to_string(p.v) +
                          ") is outside the image");
  }
  return r;
}

}  // namespace

std::vector<PixelIndex> rasterize_line(const Pixel& a, const Pixel& b, ImageSize bounds) {
  const PixelIndex start = round_into(a, bounds);
  const PixelIndex end = round_into(b, bounds);

  const int dx = std::abs(end.col - start.col);
  const int dy = -std::abs(end.row - start.row);
  const int sx = start.col < end.col ? 1 : -1;
  const int sy = start.row < end.row ? 1 : -1;

  std::vector<PixelIndex> out;
  out.reserve(static_cast<std::size_t>(std::max(dx, -dy)) + 1);
  PixelIndex p = start;
  int err = dx + dy;
  while (true) {
    out.push_back(p);
    if (p == end) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      p.col += sx;
    }
    if (e2 <= dx) {
      err += dx;
      p.row += sy;
    }
  }
  return out;
}

DepthLineSample extract_cb_measurement(const DepthFrame& frame, const Pixel& shoulder_mid,
                                       const Pixel& hip_mid) {
  const auto line = rasterize_line(shoulder_mid, hip_mid, frame.size());

  DepthLineSample s;
  s.timestamp = frame.timestamp();
  s.pixel_count = line.size();
  double sum = 0.0;
  for (const auto& px : line) {
    const float d = frame.at(px);
    if (d > 0.0f) {
      sum += d;
      ++s.valid_count;
    }
  }
  s.outside_pixel_envelope = s.pixel_count < kMinLinePixels || s.pixel_count > kMaxLinePixels;
  if (s.valid_count == 0) {
    throw NoValidPixelsError("no valid depth pixel along the S-H line (" +
                             std::to_string(s.pixel_count) + " pixels sampled)");
  }
  s.mean_depth = sum / static_cast<double>(s.valid_count);
  return s;
}

}  // namespace depthfuse
