#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "depthfuse/fusion.hpp"
#include "depthfuse/metrics.hpp"
#include "depthfuse/sensor_log.hpp"

namespace depthfuse {

// Process exit codes of the depthfuse tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,  // usage, configuration or input-format error
  kExitIo = 2,      // file could not be read or written
};

struct PipelineResult {
  std::vector<FusionOutput> outputs;
  // keypoint, depth, fused; empty when the log carries no ground truth.
  std::vector<MetricsReport> reports;
};

// Fuses a parsed log and scores every method that has ground truth.
PipelineResult run_pipeline(std::span<const SensorLogRecord> records, const FusionConfig& cfg);

// Entry point behind the executable. Diagnostics go to stderr only.
int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args);  // args[0] is the program name

}  // namespace depthfuse
