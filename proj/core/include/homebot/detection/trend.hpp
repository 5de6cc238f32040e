#pragma once

#include <span>
#include <vector>

#include "homebot/sensors/sensors.hpp"

namespace homebot::detection {

/// One piece of the trend model over samples [start_index, end_index).
/// Exponential pieces are y(t) = a * exp(b * (t - t0)) + c. Affine pieces
/// (the b -> 0 limit, used when no exponential fits better) are
/// y(t) = a * (t - t0) + c with b = 0.
struct TrendSegment {
  std::size_t start_index = 0;
  std::size_t end_index = 0;
  double t0 = 0.0;
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  bool affine = false;
  double residual = 0.0;  // RMSE, sensor units

  [[nodiscard]] double value(double t) const;
  [[nodiscard]] double slope(double t) const;
  [[nodiscard]] std::size_t size() const { return end_index - start_index; }
};

enum class ChangeDirection { Rising, Falling };

struct ChangePoint {
  std::size_t index = 0;  // first sample of the new segment
  double timestamp = 0.0;
  ChangeDirection direction = ChangeDirection::Rising;
};

struct TrendFilterConfig {
  double penalty = 0.0;           // added per extra segment when deciding to keep a split
  double tolerance = 0.05;        // RMSE above which a segment is split
  std::size_t min_segment = 4;
  std::size_t max_segments = 32;
  std::size_t refine_radius = 6;  // boundary search half-width, samples
  double slope_tolerance = 1e-6;  // |slope| below this counts as flat
};

struct TrendResult {
  std::vector<TrendSegment> segments;
  std::vector<ChangePoint> change_points;
  [[nodiscard]] double total_squared_residual() const;
};

/// Least-squares fit of one exponential-plus-offset piece. For each decay
/// rate b the amplitude and offset are linear, so b is found by a log-spaced
/// scan refined by golden-section search; `hint_b`, when given, is always
/// among the candidates.
TrendSegment fit_segment(std::span<const sensors::GasSample> window, std::size_t start, std::size_t end,
                         const double* hint_b = nullptr);

/// Greedy top-down segmentation of a gas window into exponential pieces.
/// A piece whose RMSE exceeds the tolerance is split at its worst-fit
/// sample; boundaries are then refined locally, and neighbouring pieces one
/// or two exponentials explain are consolidated. Change points are emitted
/// at boundaries where the fitted slope changes sign.
/// Throws InvalidArgument when the window holds fewer than 8 samples.
TrendResult trend_filter(std::span<const sensors::GasSample> window, const TrendFilterConfig& cfg = {});

}  // namespace homebot::detection
