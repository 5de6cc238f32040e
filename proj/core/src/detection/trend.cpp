#include "homebot/detection/trend.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "homebot/error.hpp"

namespace homebot::detection {

double TrendSegment::value(double t) const {
  const double dt = t - t0;
  return affine ? a * dt + c : a * std::exp(b * dt) + c;
}

double TrendSegment::slope(double t) const {
  const double dt = t - t0;
  return affine ? a : a * b * std::exp(b * dt);
}

double TrendResult::total_squared_residual() const {
  double sum = 0.0;
  for (const auto& s : segments) sum += s.residual * s.residual * static_cast<double>(s.size());
  return sum;
}

namespace {

struct LinearFit {
  double a = 0.0;
  double c = 0.0;
  double rss = std::numeric_limits<double>::infinity();
};

// Least squares of y ~ a * basis + c, solved in centered form.
template <typename Basis>
LinearFit fit_linear(std::span<const sensors::GasSample> w, std::size_t s, std::size_t e, Basis basis) {
  const double n = static_cast<double>(e - s);
  double mx = 0.0, my = 0.0;
  for (std::size_t i = s; i < e; ++i) {
    mx += basis(w[i].timestamp);
    my += w[i].reading;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = s; i < e; ++i) {
    const double dx = basis(w[i].timestamp) - mx;
    sxx += dx * dx;
    sxy += dx * (w[i].reading - my);
  }
  LinearFit f;
  f.a = sxx > 1e-24 ? sxy / sxx : 0.0;
  f.c = my - f.a * mx;
  double rss = 0.0;
  for (std::size_t i = s; i < e; ++i) {
    const double r = w[i].reading - (f.a * basis(w[i].timestamp) + f.c);
    rss += r * r;
  }
  f.rss = rss;
  return f;
}

}  // namespace

TrendSegment fit_segment(std::span<const sensors::GasSample> w, std::size_t s, std::size_t e, const double* hint_b) {
  if (e <= s + 1) throw InvalidArgument("fit_segment: need at least two samples");
  const double t0 = w[s].timestamp;
  const double span = std::max(1e-9, w[e - 1].timestamp - t0);

  auto exp_fit = [&](double b) {
    return fit_linear(w, s, e, [&](double t) { return std::exp(b * (t - t0)); });
  };

  TrendSegment best;
  best.start_index = s;
  best.end_index = e;
  best.t0 = t0;
  {
    const auto lin = fit_linear(w, s, e, [&](double t) { return t - t0; });
    best.affine = true;
    best.a = lin.a;
    best.b = 0.0;
    best.c = lin.c;
    best.residual = lin.rss;  // holds RSS until the end
  }
  auto consider = [&](double b) {
    if (!std::isfinite(b) || b == 0.0) return;
    const auto f = exp_fit(b);
    if (f.rss < best.residual) {
      best.affine = false;
      best.a = f.a;
      best.b = b;
      best.c = f.c;
      best.residual = f.rss;
    }
  };

  // Scan |b| * span over [1e-2, 60] for both signs, then refine around the best.
  constexpr int kScan = 48;
  const double lo = std::log(1e-2 / span);
  const double hi = std::log(60.0 / span);
  double best_log = 0.0;
  int best_sign = 0;
  double best_scan = std::numeric_limits<double>::infinity();
  for (int sign : {-1, 1}) {
    for (int k = 0; k <= kScan; ++k) {
      const double lb = lo + (hi - lo) * k / kScan;
      const double rss = exp_fit(sign * std::exp(lb)).rss;
      if (rss < best_scan) {
        best_scan = rss;
        best_log = lb;
        best_sign = sign;
      }
    }
  }
  if (best_sign != 0) {
    const double step = (hi - lo) / kScan;
    double a = best_log - step, b = best_log + step;
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = exp_fit(best_sign * std::exp(x1)).rss, f2 = exp_fit(best_sign * std::exp(x2)).rss;
    for (int it = 0; it < 80 && (b - a) > 1e-12; ++it) {
      if (f1 < f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - g * (b - a);
        f1 = exp_fit(best_sign * std::exp(x1)).rss;
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + g * (b - a);
        f2 = exp_fit(best_sign * std::exp(x2)).rss;
      }
    }
    consider(best_sign * std::exp(best_log));
    consider(best_sign * std::exp(0.5 * (a + b)));
  }
  if (hint_b) consider(*hint_b);

  best.residual = std::sqrt(best.residual / static_cast<double>(e - s));
  return best;
}

namespace {

double sq_residual(const TrendSegment& seg) { return seg.residual * seg.residual * static_cast<double>(seg.size()); }

const double* hint_of(const TrendSegment& seg) { return seg.affine ? nullptr : &seg.b; }

int slope_sign(double slope, double tol) { return slope > tol ? 1 : (slope < -tol ? -1 : 0); }

}  // namespace

TrendResult trend_filter(std::span<const sensors::GasSample> w, const TrendFilterConfig& cfg) {
  if (w.size() < 8) throw InvalidArgument("trend_filter: window must hold at least 8 samples");
  const std::size_t min_len = std::max<std::size_t>(3, cfg.min_segment);

  std::vector<TrendSegment> segs{fit_segment(w, 0, w.size())};
  bool changed = true;
  while (changed && segs.size() < cfg.max_segments) {
    changed = false;
    for (std::size_t i = 0; i < segs.size() && segs.size() < cfg.max_segments; ++i) {
      const TrendSegment seg = segs[i];
      if (seg.residual <= cfg.tolerance || seg.size() < 2 * min_len) continue;
      std::size_t worst = seg.start_index;
      double worst_r = -1.0;
      for (std::size_t k = seg.start_index; k < seg.end_index; ++k) {
        const double r = std::abs(w[k].reading - seg.value(w[k].timestamp));
        if (r > worst_r) {
          worst_r = r;
          worst = k;
        }
      }
      const std::size_t split = std::clamp(worst, seg.start_index + min_len, seg.end_index - min_len);
      TrendSegment left = fit_segment(w, seg.start_index, split, hint_of(seg));
      TrendSegment right = fit_segment(w, split, seg.end_index, hint_of(seg));
      const double before = sq_residual(seg);
      const double after = sq_residual(left) + sq_residual(right) + cfg.penalty;
      if (after >= before) continue;
      segs[i] = left;
      segs.insert(segs.begin() + static_cast<std::ptrdiff_t>(i) + 1, right);
      changed = true;
      ++i;
    }
  }

  // Local boundary refinement: shift each boundary to the position that
  // minimizes the two adjacent pieces' combined squared residual.
  for (std::size_t i = 0; i + 1 < segs.size(); ++i) {
    TrendSegment& left = segs[i];
    TrendSegment& right = segs[i + 1];
    const std::size_t lo = std::max(left.start_index + min_len, left.end_index > cfg.refine_radius ? left.end_index - cfg.refine_radius : 0);
    const std::size_t hi = std::min(right.end_index - min_len, left.end_index + cfg.refine_radius);
    double best = sq_residual(left) + sq_residual(right);
    for (std::size_t k = lo; k <= hi; ++k) {
      if (k == left.end_index) continue;
      auto l = fit_segment(w, left.start_index, k, hint_of(left));
      auto r = fit_segment(w, k, right.end_index, hint_of(right));
      const double total = sq_residual(l) + sq_residual(r);
      if (total < best) {
        best = total;
        left = l;
        right = r;
      }
    }
  }

  // Consolidation: adjacent pieces one exponential explains are merged, and
  // three pieces two can explain are re-split at their best boundary. This
  // removes fragments the greedy splits leave around a junction that falls
  // between samples.
  for (bool again = true; again;) {
    again = false;
    for (std::size_t i = 0; !again && i + 1 < segs.size(); ++i) {
      auto merged = fit_segment(w, segs[i].start_index, segs[i + 1].end_index, hint_of(segs[i + 1]));
      const double worst = std::max(segs[i].residual, segs[i + 1].residual);
      if (merged.residual > std::min(cfg.tolerance, worst + 0.1 * cfg.tolerance)) continue;
      segs[i] = merged;
      segs.erase(segs.begin() + static_cast<std::ptrdiff_t>(i) + 1);
      again = true;
    }
    for (std::size_t i = 0; !again && i + 2 < segs.size(); ++i) {
      const std::size_t start = segs[i].start_index, end = segs[i + 2].end_index;
      double best = std::numeric_limits<double>::infinity();
      TrendSegment best_l, best_r;
      for (std::size_t k = start + min_len; k + min_len <= end; ++k) {
        auto l = fit_segment(w, start, k, hint_of(segs[i]));
        auto r = fit_segment(w, k, end, hint_of(segs[i + 2]));
        if (l.residual > cfg.tolerance || r.residual > cfg.tolerance) continue;
        const double total = sq_residual(l) + sq_residual(r);
        if (total < best) {
          best = total;
          best_l = l;
          best_r = r;
        }
      }
      if (!std::isfinite(best)) continue;
      segs[i] = best_l;
      segs[i + 1] = best_r;
      segs.erase(segs.begin() + static_cast<std::ptrdiff_t>(i) + 2);
      again = true;
    }
  }

  TrendResult out;
  out.segments = segs;
  for (std::size_t i = 0; i + 1 < segs.size(); ++i) {
    const auto& left = segs[i];
    const auto& right = segs[i + 1];
    const std::size_t k = right.start_index;
    const int sl = slope_sign(left.slope(w[k - 1].timestamp), cfg.slope_tolerance);
    const int sr = slope_sign(right.slope(w[k].timestamp), cfg.slope_tolerance);
    if (sl == sr) continue;
    out.change_points.push_back({k, w[k].timestamp, sr > sl ? ChangeDirection::Rising : ChangeDirection::Falling});
  }
  return out;
}

}  // namespace homebot::detection
