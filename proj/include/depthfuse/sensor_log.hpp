#pragma once

#include <istream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "depthfuse/fusion.hpp"
#include "depthfuse/scenario_sim.hpp"

namespace depthfuse {

// One row of the paired sensor log:
//   t,sh_px,depth_cb_m,gt_cb_m
// An empty field means the channel is absent for that frame.
struct SensorLogRecord {
  double t = 0.0;
  std::optional<double> sh_px;
  std::optional<double> depth_cb_m;
  std::optional<double> gt_cb_m;
  std::size_t line = 0;  // 1-based source line, 0 when not parsed

  SensorFrame sensor_frame() const { return {t, sh_px, depth_cb_m}; }
};

inline constexpr const char* kSensorLogHeader = "t,sh_px,depth_cb_m,gt_cb_m";
inline constexpr const char* kTraceHeader = "t,fused_m,keypoint_m,depth_m,gate_open,cov_trace";
inline constexpr const char* kPlotDataHeader = "t,series,value_m";

// Throws ParseError (header mismatch, malformed line, non-finite or
// non-positive value) or NonMonotoneTimestampError (index = record index).
std::vector<SensorLogRecord> parse_sensor_log(std::istream& in);
std::vector<SensorLogRecord> parse_sensor_log(const std::string& text);

// Fixed six-decimal rendering shared by every CSV writer.
std::string format_fixed6(double v);

std::string format_sensor_log(std::span<const SensorLogRecord> records);
std::vector<SensorLogRecord> to_log_records(std::span<const SimulatedFrame> frames);

std::string format_trace(std::span<const FusionOutput> outputs);

// Row of a parsed trace.csv.
struct TraceRecord {
  double t = 0.0;
  std::optional<double> fused_m;
  std::optional<double> keypoint_m;
  std::optional<double> depth_m;
  bool gate_open = false;
  double cov_trace = 0.0;
};
std::vector<TraceRecord> parse_trace(const std::string& text);

// Long-form per-frame series: truth, keypoint, depth, fused and the
// matching *_err rows (estimate - truth).
std::string format_plot_data(std::span<const SensorLogRecord> records,
                             std::span<const FusionOutput> outputs);

}  // namespace depthfuse
