#include "depthfuse/derivative_gate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "depthfuse/errors.hpp"

namespace depthfuse {

void DerivativeGateConfig::validate() const {
  if (window < 2) throw ConfigError("derivative gate window must be >= 2");
  if (!(rel_threshold > 1.0)) throw ConfigError("derivative gate rel_threshold must be > 1");
}

DerivativeGate::DerivativeGate(DerivativeGateConfig cfg) : cfg_(cfg) { cfg_.validate(); }

std::optional<double> DerivativeGate::reference_rate() const {
  if (!warmed_up()) return std::nullopt;
  return std::accumulate(window_.begin(), window_.end(), 0.0) /
         static_cast<double>(window_.size());
}

bool DerivativeGate::update(double t, double value) {
  if (last_t_ && !(t > *last_t_)) {
    throw NonMonotoneTimestampError(
        0, "derivative gate: timestamp " + std::to_string(t) + " does not advance");
  }
  last_t_ = t;
  if (!reference_) {
    reference_ = {t, value};
    return false;
  }

  auto rate_from_reference = [&] {
    return std::abs(value - reference_->second) / (t - reference_->first);
  };
  auto push = [this](double r) {
    window_.push_back(r);
    if (window_.size() > cfg_.window) window_.pop_front();
  };

  double rate = rate_from_reference();
  if (!warmed_up()) {
    push(rate);
    reference_ = {t, value};
    return false;
  }

  double threshold = cfg_.rel_threshold * *reference_rate();
  if (rate <= threshold) {
    push(rate);
    reference_ = {t, value};
    streak_.clear();
    return false;
  }

  streak_.push_back({t, value});
  if (cfg_.recovery_after == 0 || streak_.size() < cfg_.recovery_after) {
    push(threshold);
    return true;
  }

  // Re-anchor on the streak.
  ++recoveries_;
  std::vector<double> rates;
  rates.reserve(streak_.size() - 1);
  for (std::size_t i = 1; i < streak_.size(); ++i) {
    rates.push_back(std::abs(streak_[i].value - streak_[i - 1].value) /
                    (streak_[i].t - streak_[i - 1].t));
  }
  auto mid = rates.begin() + static_cast<std::ptrdiff_t>(rates.size() / 2);
  std::nth_element(rates.begin(), mid, rates.end());
  window_.assign(cfg_.window, *mid);

  std::vector<TimedValue> by_value = streak_;
  auto vmid = by_value.begin() + static_cast<std::ptrdiff_t>(by_value.size() / 2);
  std::nth_element(by_value.begin(), vmid, by_value.end(),
                   [](const TimedValue& a, const TimedValue& b) { return a.value < b.value; });
  streak_.clear();
  if (vmid->t == t) {
    reference_ = {t, value};
    return false;
  }
  reference_ = {vmid->t, vmid->value};

  rate = rate_from_reference();
  threshold = cfg_.rel_threshold * *reference_rate();
  if (rate <= threshold) {
    push(rate);
    reference_ = {t, value};
    return false;
  }
  streak_.push_back({t, value});
  push(threshold);
  return true;
}

bool latest_is_derivative_outlier(std::span<const TimedValue> history,
                                  const DerivativeGateConfig& cfg) {
  if (history.size() < 2) {
    throw InsufficientHistoryError("derivative check needs at least two samples");
  }
  DerivativeGate gate(cfg);
  bool flagged = false;
  for (std::size_t i = 0; i < history.size(); ++i) {
    try {
      flagged = gate.update(history[i].t, history[i].value);
    } catch (const NonMonotoneTimestampError& e) {
      throw NonMonotoneTimestampError(i, e.what());
    }
  }
  return flagged;
}

}  // namespace depthfuse
