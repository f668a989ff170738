#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "depthfuse/derivative_gate.hpp"

namespace depthfuse {

enum class Method { keypoint, depth, fused };

std::string_view to_string(Method m);

// Error statistics of one estimation method against ground truth, in cm.
// mean_abs_of_signed_error is |mean(e)|, not mean(|e|); together with the
// population standard deviation it satisfies rmse^2 = mean^2 + std^2.
struct MetricsReport {
  Method method = Method::fused;
  double mean_abs_of_signed_error = 0.0;
  double rmse = 0.0;
  double std_dev = 0.0;
  std::size_t n_frames = 0;
  std::size_t n_excluded = 0;
};

// Associates every estimate with the nearest truth sample within
// `tolerance` seconds (default: half the median truth spacing) and
// summarises e = estimate - truth in centimeters. Truth frames without an
// estimate and estimates without truth are counted in n_excluded.
// Throws Error when nothing associates.
MetricsReport compute_metrics(Method method, std::span<const TimedValue> estimates,
                              std::span<const TimedValue> truth,
                              std::optional<double> tolerance = std::nullopt);

// Summary statistics of raw errors in centimeters.
MetricsReport summarize_errors(Method method, std::span<const double> errors_cm,
                               std::size_t n_excluded = 0);

// {"method", "mean_abs_err_cm", "rmse_cm", "std_cm", "n_frames", "n_excluded"}
std::string metrics_to_json(std::span<const MetricsReport> reports);
std::string metrics_to_csv(std::span<const MetricsReport> reports);

}  // namespace depthfuse
