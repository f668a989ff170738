#include "depthfuse/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "depthfuse/errors.hpp"
#include "json.hpp"

namespace depthfuse {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::keypoint:
      return "keypoint";
    case Method::depth:
      return "depth";
    case Method::fused:
      return "fused";
  }
  return "unknown";
}

MetricsReport summarize_errors(Method method, std::span<const double> errors_cm,
                               std::size_t n_excluded) {
  MetricsReport r;
  r.method = method;
  r.n_frames = errors_cm.size();
  r.n_excluded = n_excluded;
  if (errors_cm.empty()) throw Error("metrics: no errors to summarise");

  const auto n = static_cast<double>(errors_cm.size());
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double e : errors_cm) {
    sum += e;
    sum_sq += e * e;
  }
  const double mean = sum / n;
  double var = 0.0;
  for (double e : errors_cm) var += (e - mean) * (e - mean);
  r.mean_abs_of_signed_error = std::abs(mean);
  r.rmse = std::sqrt(sum_sq / n);
  r.std_dev = std::sqrt(var / n);
  return r;
}

MetricsReport compute_metrics(Method method, std::span<const TimedValue> estimates,
                              std::span<const TimedValue> truth,
                              std::optional<double> tolerance) {
  if (truth.empty()) throw Error("metrics: ground truth is empty");

  std::vector<TimedValue> sorted_truth(truth.begin(), truth.end());
  std::sort(sorted_truth.begin(), sorted_truth.end(),
            [](const TimedValue& a, const TimedValue& b) { return a.t < b.t; });

  double tol = 0.0;
  if (tolerance) {
    tol = *tolerance;
  } else if (sorted_truth.size() > 1) {
    std::vector<double> gaps;
    gaps.reserve(sorted_truth.size() - 1);
    for (std::size_t i = 1; i < sorted_truth.size(); ++i) {
      gaps.push_back(sorted_truth[i].t - sorted_truth[i - 1].t);
    }
    std::nth_element(gaps.begin(), gaps.begin() + static_cast<std::ptrdiff_t>(gaps.size() / 2),
                     gaps.end());
    tol = 0.5 * gaps[gaps.size() / 2];
  }

  std::vector<bool> used(sorted_truth.size(), false);
  std::vector<double> errors_cm;
  errors_cm.reserve(estimates.size());
  std::size_t unmatched_estimates = 0;
  for (const auto& est : estimates) {
    auto it = std::lower_bound(sorted_truth.begin(), sorted_truth.end(), est.t,
                               [](const TimedValue& a, double t) { return a.t < t; });
    std::ptrdiff_t best = -1;
    double best_gap = tol;
    for (auto cand : {it, it == sorted_truth.begin() ? it : std::prev(it)}) {
      if (cand == sorted_truth.end()) continue;
      const double gap = std::abs(cand->t - est.t);
      if (gap <= best_gap) {
        best_gap = gap;
        best = cand - sorted_truth.begin();
      }
    }
    if (best < 0 || used[static_cast<std::size_t>(best)]) {
      ++unmatched_estimates;
      continue;
    }
    used[static_cast<std::size_t>(best)] = true;
    errors_cm.push_back((est.value - sorted_truth[static_cast<std::size_t>(best)].value) * 100.0);
  }
  if (errors_cm.empty()) throw Error("metrics: no estimate associates with ground truth");

  const std::size_t truth_without_estimate =
      sorted_truth.size() - static_cast<std::size_t>(std::count(used.begin(), used.end(), true));
  return summarize_errors(method, errors_cm, truth_without_estimate + unmatched_estimates);
}

std::string metrics_to_json(std::span<const MetricsReport> reports) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : reports) {
    nlohmann::ordered_json j;
    j["method"] = std::string(to_string(r.method));
    j["mean_abs_err_cm"] = r.mean_abs_of_signed_error;
    j["rmse_cm"] = r.rmse;
    j["std_cm"] = r.std_dev;
    j["n_frames"] = r.n_frames;
    j["n_excluded"] = r.n_excluded;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

std::string metrics_to_csv(std::span<const MetricsReport> reports) {
  std::ostringstream os;
  os << "method,mean_abs_err_cm,rmse_cm,std_cm,n_frames,n_excluded\n";
  os << std::fixed << std::setprecision(6);
  for (const auto& r : reports) {
    os << to_string(r.method) << ',' << r.mean_abs_of_signed_error << ',' << r.rmse << ','
       << r.std_dev << ',' << r.n_frames << ',' << r.n_excluded << '\n';
  }
  return os.str();
}

}  // namespace depthfuse
