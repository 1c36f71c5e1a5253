#pragma once

#include <string>
#include <vector>

namespace otgeo::bench {

struct PlotSeries {
  std::string name;
  std::vector<double> xs;
  std::vector<double> ys;
  /// Optional whiskers (same length as ys when present).
  std::vector<double> lo;
  std::vector<double> hi;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
};

/// Standalone SVG line plot with markers and optional whiskers.
std::string render_line_plot(const PlotSpec& spec, const std::vector<PlotSeries>& series);

}  // namespace otgeo::bench
