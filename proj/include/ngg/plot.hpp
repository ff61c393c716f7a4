#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ngg/errors.hpp"

namespace ngg {

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;  // (x, y)
};

struct ChartOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;
  int width = 800;
  int height = 500;
  /// Series longer than this are thinned to evenly spaced samples (the last point is kept).
  std::size_t max_points_per_series = 4000;
};

inline std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

namespace detail {

inline std::string svg_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string tick_label(double v) {
  char buf[32];
  if (v != 0.0 && (std::fabs(v) >= 1e5 || std::fabs(v) < 1e-2)) std::snprintf(buf, sizeof buf, "%.0e", v);
  else std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

inline const char* series_colour(std::size_t i) {
  static const char* palette[] = {"#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e",
                                  "#17becf", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22"};
  return palette[i % (sizeof palette / sizeof palette[0])];
}

}  // namespace detail

/// Standalone SVG line chart: one <path> per series, legend drawn with <line>
/// and <text> only.
inline std::string render_line_chart(const std::vector<Series>& series, const ChartOptions& opt) {
  if (series.empty()) throw InvalidParam("plot needs at least one series");

  const double left = 80, right = 170, top = 40, bottom = 60;
  const double pw = opt.width - left - right;
  const double ph = opt.height - top - bottom;

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series) {
    for (auto [x, y] : s.points) {
      if (opt.log_y && !(y > 0.0)) continue;
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = opt.log_y ? 1 : 0, ymax = opt.log_y ? 10 : 1;
  if (xmax == xmin) xmax = xmin + 1;
  if (opt.log_y) {
    ymin = std::pow(10.0, std::floor(std::log10(ymin)));
    ymax = std::pow(10.0, std::ceil(std::log10(ymax)));
    if (ymax <= ymin) ymax = ymin * 10;
  } else {
    ymin = std::min(0.0, ymin);
    if (ymax <= ymin) ymax = ymin + 1;
  }

  auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  auto sy = [&](double y) {
    const double t = opt.log_y ? (std::log10(y) - std::log10(ymin)) / (std::log10(ymax) - std::log10(ymin))
                               : (y - ymin) / (ymax - ymin);
    return top + (1.0 - t) * ph;
  };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width << "\" height=\"" << opt.height
      << "\" viewBox=\"0 0 " << opt.width << ' ' << opt.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << opt.width << "\" height=\"" << opt.height << "\" fill=\"white\"/>\n";
  if (!opt.title.empty())
    svg << "<text x=\"" << detail::svg_num(left + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
        << xml_escape(opt.title) << "</text>\n";

  // Axes and ticks.
  svg << "<g stroke=\"black\" stroke-width=\"1\">\n"
      << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw << "\" y2=\"" << top + ph
      << "\"/>\n"
      << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + ph << "\"/>\n"
      << "</g>\n<g fill=\"black\">\n";
  for (int t = 0; t <= 5; ++t) {
    const double x = xmin + (xmax - xmin) * t / 5.0;
    svg << "<text x=\"" << detail::svg_num(sx(x)) << "\" y=\"" << detail::svg_num(top + ph + 18)
        << "\" text-anchor=\"middle\">" << detail::tick_label(x) << "</text>\n";
  }
  if (opt.log_y) {
    for (double y = ymin; y <= ymax * 1.0000001; y *= 10)
      svg << "<text x=\"" << detail::svg_num(left - 8) << "\" y=\"" << detail::svg_num(sy(y) + 4)
          << "\" text-anchor=\"end\">" << detail::tick_label(y) << "</text>\n";
  } else {
    for (int t = 0; t <= 5; ++t) {
      const double y = ymin + (ymax - ymin) * t / 5.0;
      svg << "<text x=\"" << detail::svg_num(left - 8) << "\" y=\"" << detail::svg_num(sy(y) + 4)
          << "\" text-anchor=\"end\">" << detail::tick_label(y) << "</text>\n";
    }
  }
  svg << "<text x=\"" << detail::svg_num(left + pw / 2) << "\" y=\"" << opt.height - 15
      << "\" text-anchor=\"middle\">" << xml_escape(opt.x_label) << "</text>\n"
      << "<text x=\"18\" y=\"" << detail::svg_num(top + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << detail::svg_num(top + ph / 2) << ")\">" << xml_escape(opt.y_label) << (opt.log_y ? " (log)" : "")
      << "</text>\n</g>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& pts = series[i].points;
    const std::size_t stride = pts.size() > opt.max_points_per_series
                                   ? (pts.size() + opt.max_points_per_series - 1) / opt.max_points_per_series
                                   : 1;
    std::string d;
    bool pen_down = false;
    for (std::size_t k = 0; k < pts.size(); ++k) {
      if (k % stride != 0 && k + 1 != pts.size()) continue;
      auto [x, y] = pts[k];
      if (opt.log_y && !(y > 0.0)) {
        pen_down = false;
        continue;
      }
      d += pen_down ? " L" : (d.empty() ? "M" : " M");
      d += detail::svg_num(sx(x)) + ' ' + detail::svg_num(sy(y));
      pen_down = true;
    }
    svg << "<path fill=\"none\" stroke=\"" << detail::series_colour(i) << "\" stroke-width=\"1.5\" d=\"" << d
        << "\"><title>" << xml_escape(series[i].label) << "</title></path>\n";
  }

  svg << "<g class=\"legend\">\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double y = top + 10 + 20.0 * static_cast<double>(i);
    const double x = left + pw + 15;
    svg << "<line x1=\"" << detail::svg_num(x) << "\" y1=\"" << detail::svg_num(y) << "\" x2=\""
        << detail::svg_num(x + 25) << "\" y2=\"" << detail::svg_num(y) << "\" stroke=\"" << detail::series_colour(i)
        << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << detail::svg_num(x + 32) << "\" y=\"" << detail::svg_num(y + 4) << "\">"
        << xml_escape(series[i].label) << "</text>\n";
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

}  // namespace ngg
