#pragma once

// Deterministic SVG line charts for training curves. Canvas size, margins,
// tick placement and number formatting are fixed, so equal inputs give equal
// bytes.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace lipgan::svg {

inline constexpr int kWidth = 720;
inline constexpr int kHeight = 420;

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
};

struct Chart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
};

struct AxisRange {
  double lo = 0.0;
  double hi = 1.0;
  double step = 0.2;  // tick spacing
};

/// Rounds [min, max] of the finite values outward to a 1/2/5 x 10^k tick grid.
/// A degenerate or empty range widens to one unit around its value.
AxisRange nice_range(double min, double max);

/// Ranges over every finite point of the non-empty series.
AxisRange x_range(std::span<const Series> series);
AxisRange y_range(std::span<const Series> series);

/// Trailing moving average of `window` points (shorter at the start).
std::vector<double> moving_average(std::span<const double> values, std::size_t window);

/// Series without points are left out of both plot and legend. Non-finite
/// points break the polyline.
std::string render(const Chart& chart);

}  // namespace lipgan::svg
