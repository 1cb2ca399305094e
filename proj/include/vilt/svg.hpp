#pragma once

#include <string>
#include <utility>
#include <vector>

namespace vilt {

struct PlotSeries {
  std::string label;
  std::string color;
  std::vector<std::pair<double, double>> points;  // (x, y)
};

struct PlotPanel {
  std::string title;
  std::string y_label;
  bool log_y = true;  // y plotted as log10(y); non-positive values dropped
  std::vector<PlotSeries> series;
};

/// Standalone SVG with the panels stacked vertically, one polyline per
/// series, tick marks and a legend. Log panels carry data-scale="log10" on
/// the y-axis group and power-of-ten tick labels.
std::string render_line_chart(const std::vector<PlotPanel>& panels,
                              const std::string& x_label, int width = 640,
                              int panel_height = 300);

}  // namespace vilt
