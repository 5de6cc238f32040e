#include "homebot/detection/breath.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace homebot::detection {

std::string_view to_string(Presence p) { return p == Presence::Close ? "close" : "far"; }

BreathDetectorState BreathDetectorState::initial(double reading, double margin, Presence presence) {
  return {presence, reading + margin, reading - margin, margin, reading};
}

std::pair<BreathDetectorState, std::optional<BreathTransition>> breath_step(const BreathDetectorState& s,
                                                                            const sensors::GasSample& sample) {
  BreathDetectorState next = s;
  const double r = sample.reading;
  next.last_reading = r;
  auto sandwich = [&] {
    next.upper = r + next.margin;
    next.lower = r - next.margin;
  };

  const bool expected_direction =
      (s.presence == Presence::Close && r > s.last_reading) || (s.presence == Presence::Far && r < s.last_reading);
  if (expected_direction) {
    sandwich();
    return {next, std::nullopt};
  }
  if (r >= s.upper) {
    sandwich();
    if (s.presence == Presence::Far) {
      next.presence = Presence::Close;
      return {next, BreathTransition{sample.timestamp, Presence::Close}};
    }
    return {next, std::nullopt};
  }
  if (r <= s.lower) {
    sandwich();
    if (s.presence == Presence::Close) {
      next.presence = Presence::Far;
      return {next, BreathTransition{sample.timestamp, Presence::Far}};
    }
    return {next, std::nullopt};
  }
  return {next, std::nullopt};
}

double BreathDetector::noise_estimate() const {
  if (window_.size() < 3) return 0.0;
  std::vector<double> d;
  d.reserve(window_.size() - 1);
  for (std::size_t i = 0; i + 1 < window_.size(); ++i) d.push_back(window_[i + 1].reading - window_[i].reading);
  auto median = [](std::vector<double> v) {
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    double m = *mid;
    if (v.size() % 2 == 0) m = 0.5 * (m + *std::max_element(v.begin(), mid));
    return m;
  };
  const double center = median(d);
  for (auto& x : d) x = std::abs(x - center);
  // Scaled median absolute deviation: a Gaussian sigma estimate that
  // ignores the sparse large steps produced by exhalation puffs.
  return 1.4826 * median(std::move(d));
}

std::optional<BreathTransition> BreathDetector::update(const sensors::GasSample& sample) {
  window_.push_back(sample);
  while (!window_.empty() && sample.timestamp - window_.front().timestamp > cfg_.noise_window) window_.pop_front();

  double margin = cfg_.initial_margin;
  if (window_.size() >= cfg_.min_samples) margin = std::max(cfg_.min_margin, cfg_.margin_sigmas * noise_estimate());

  if (!initialized_) {
    state_ = BreathDetectorState::initial(sample.reading, margin);
    initialized_ = true;
    return std::nullopt;
  }
  state_.margin = margin;
  auto [next, transition] = breath_step(state_, sample);
  state_ = next;
  return transition;
}

}  // namespace homebot::detection
