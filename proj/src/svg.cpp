#include "lipgan/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace lipgan::svg {

namespace {

constexpr double kLeft = 80.0;
constexpr double kRight = 170.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string num(double v, const char* fmt = "%.2f") {
  char buf[48];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

std::string tick_label(double v, double step) {
  if (std::abs(v) < step * 1e-9) v = 0.0;
  return num(v, "%.6g");
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

template <typename Pick>
AxisRange range_of(std::span<const Series> series, Pick pick) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& s : series) {
    const std::size_t n = std::min(s.x.size(), s.y.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      const double v = pick(s, i);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  return nice_range(lo, hi);
}

}  // namespace

AxisRange nice_range(double min, double max) {
  if (!std::isfinite(min) || !std::isfinite(max) || min > max) return {0.0, 1.0, 0.2};
  if (min == max) {
    const double pad = std::max(1.0, std::abs(min) * 0.1);
    min -= pad;
    max += pad;
  }
  const double raw = (max - min) / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  double lo = std::floor(min / step) * step;
  double hi = std::ceil(max / step) * step;
  // floor/ceil of a rounded quotient can land one ulp inside the data
  if (lo > min) lo -= step;
  if (hi < max) hi += step;
  return {lo, hi, step};
}

AxisRange x_range(std::span<const Series> series) {
  return range_of(series, [](const Series& s, std::size_t i) { return s.x[i]; });
}

AxisRange y_range(std::span<const Series> series) {
  return range_of(series, [](const Series& s, std::size_t i) { return s.y[i]; });
}

std::vector<double> moving_average(std::span<const double> values, std::size_t window) {
  window = std::max<std::size_t>(window, 1);
  std::vector<double> out(values.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    sum += values[i];
    if (i >= window) sum -= values[i - window];
    out[i] = sum / static_cast<double>(std::min(i + 1, window));
  }
  return out;
}

std::string render(const Chart& chart) {
  std::vector<Series> shown;
  for (const auto& s : chart.series) {
    if (!s.x.empty() && !s.y.empty()) shown.push_back(s);
  }
  const AxisRange xr = x_range(shown);
  const AxisRange yr = y_range(shown);
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * plot_w; };
  auto py = [&](double y) { return kTop + (yr.hi - y) / (yr.hi - yr.lo) * plot_h; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << num(kWidth / 2.0) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
    << escape(chart.title) << "</text>\n";

  const auto ticks = [](const AxisRange& r) {
    std::vector<double> t;
    const auto n = static_cast<long>(std::llround((r.hi - r.lo) / r.step));
    for (long i = 0; i <= n; ++i) t.push_back(r.lo + static_cast<double>(i) * r.step);
    return t;
  };
  for (double t : ticks(yr)) {
    o << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(py(t)) << "\" x2=\"" << num(kLeft + plot_w)
      << "\" y2=\"" << num(py(t)) << "\" stroke=\"#e0e0e0\"/>\n";
    o << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(py(t) + 4) << "\" text-anchor=\"end\">"
      << tick_label(t, yr.step) << "</text>\n";
  }
  for (double t : ticks(xr)) {
    o << "<line x1=\"" << num(px(t)) << "\" y1=\"" << num(kTop + plot_h) << "\" x2=\"" << num(px(t))
      << "\" y2=\"" << num(kTop + plot_h + 4) << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << num(px(t)) << "\" y=\"" << num(kTop + plot_h + 17) << "\" text-anchor=\"middle\">"
      << tick_label(t, xr.step) << "</text>\n";
  }
  o << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(plot_w) << "\" height=\""
    << num(plot_h) << "\" fill=\"none\" stroke=\"black\"/>\n";
  o << "<text x=\"" << num(kLeft + plot_w / 2) << "\" y=\"" << num(kHeight - 10.0)
    << "\" text-anchor=\"middle\">" << escape(chart.x_label) << "</text>\n";
  o << "<text x=\"16\" y=\"" << num(kTop + plot_h / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
    << num(kTop + plot_h / 2) << ")\">" << escape(chart.y_label) << "</text>\n";

  for (std::size_t k = 0; k < shown.size(); ++k) {
    const auto& s = shown[k];
    const char* color = kPalette[k % std::size(kPalette)];
    const std::string dash = s.dashed ? " stroke-dasharray=\"6 3\"" : "";
    std::string points;
    auto flush = [&] {
      if (!points.empty()) {
        o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"" << dash << " points=\""
          << points << "\"/>\n";
      }
      points.clear();
    };
    const std::size_t n = std::min(s.x.size(), s.y.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
        flush();
        continue;
      }
      if (!points.empty()) points += ' ';
      points += num(px(s.x[i])) + ',' + num(py(s.y[i]));
    }
    flush();
    const double ly = kTop + 10 + 18.0 * static_cast<double>(k);
    const double lx = kLeft + plot_w + 12;
    o << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(lx + 22) << "\" y2=\"" << num(ly)
      << "\" stroke=\"" << color << "\" stroke-width=\"2\"" << dash << "/>\n";
    o << "<text x=\"" << num(lx + 28) << "\" y=\"" << num(ly + 4) << "\">" << escape(s.label) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace lipgan::svg
