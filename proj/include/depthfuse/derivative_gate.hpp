#pragma once

#include <cstddef>
#include <deque>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace depthfuse {

struct TimedValue {
  double t = 0.0;
  double value = 0.0;
};

struct DerivativeGateConfig {
  std::size_t window = 10;
  double rel_threshold = 1.25;
  // Consecutive rejections after which the gate re-anchors on the rejected
  // streak. 0 disables recovery.
  std::size_t recovery_after = 20;

  void validate() const;
};

// Rolling derivative test shared by the S-H pixel filter and the depth gate.
//
// Each new sample is compared with the last accepted one. It is an outlier
// when |d value / dt| exceeds rel_threshold times the mean rate held in a
// window of the last `window` rates. Until the window is full nothing is
// flagged.
//
// A rejected rate enters the window clipped to the threshold it failed, so
// the mean neither collapses on noisy input nor inflates after an outlier.
//
// After `recovery_after` consecutive rejections (a subject that starts
// walking after a pause) the gate re-anchors on the rejected streak: the
// reference becomes the streak sample with the median value, the window is
// refilled with the median rate between consecutive streak samples, and
// the current sample is judged again. Medians keep a minority of outliers
// in the streak from capturing the gate.
class DerivativeGate {
 public:
  explicit DerivativeGate(DerivativeGateConfig cfg = {});

  // Feeds one sample and returns true when it is an outlier.
  // Throws NonMonotoneTimestampError(0, ...) if t does not advance.
  bool update(double t, double value);

  // Mean rate of the window; nullopt while warming up.
  std::optional<double> reference_rate() const;
  bool warmed_up() const { return window_.size() >= cfg_.window; }
  std::size_t consecutive_rejections() const { return streak_.size(); }
  std::size_t recoveries() const { return recoveries_; }
  const DerivativeGateConfig& config() const { return cfg_; }

 private:
  DerivativeGateConfig cfg_;
  std::optional<std::pair<double, double>> reference_;  // last accepted (t, value)
  std::optional<double> last_t_;
  std::deque<double> window_;
  std::vector<TimedValue> streak_;  // consecutive rejected samples
  std::size_t recoveries_ = 0;
};

// Replays `history` through a fresh DerivativeGate and reports whether the
// last sample is flagged. Requires at least two samples.
bool latest_is_derivative_outlier(std::span<const TimedValue> history,
                                  const DerivativeGateConfig& cfg);

}  // namespace depthfuse
