#include "vilt/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace vilt {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string tick_label(double v, bool log_scale) {
  char buf[32];
  if (log_scale) {
    std::snprintf(buf, sizeof(buf), "1e%d", static_cast<int>(std::lround(v)));
  } else {
    std::snprintf(buf, sizeof(buf), "%.3g", v);
  }
  return buf;
}

}  // namespace

std::string render_line_chart(const std::vector<PlotPanel>& panels,
                              const std::string& x_label, int width,
                              int panel_height) {
  if (panels.empty()) throw std::invalid_argument("svg: no panels");
  const int margin_left = 70, margin_right = 20, margin_top = 30,
            margin_bottom = 40;
  const int total_height = panel_height * static_cast<int>(panels.size());

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         std::to_string(width) + "\" height=\"" + std::to_string(total_height) +
         "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (std::size_t pi = 0; pi < panels.size(); ++pi) {
    const PlotPanel& panel = panels[pi];
    const double top = static_cast<double>(pi) * panel_height + margin_top;
    const double bottom = static_cast<double>(pi + 1) * panel_height - margin_bottom;
    const double left = margin_left, right = width - margin_right;

    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    bool any = false;
    for (const PlotSeries& s : panel.series) {
      for (const auto& [x, y] : s.points) {
        if (panel.log_y && !(y > 0.0)) continue;
        const double yy = panel.log_y ? std::log10(y) : y;
        if (!any) {
          xmin = xmax = x;
          ymin = ymax = yy;
          any = true;
        } else {
          xmin = std::min(xmin, x);
          xmax = std::max(xmax, x);
          ymin = std::min(ymin, yy);
          ymax = std::max(ymax, yy);
        }
      }
    }
    if (!any) {
      xmin = ymin = 0;
      xmax = ymax = 1;
    }
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;

    auto sx = [&](double x) {
      return left + (x - xmin) / (xmax - xmin) * (right - left);
    };
    auto sy = [&](double y) {
      const double yy = panel.log_y ? std::log10(y) : y;
      return bottom - (yy - ymin) / (ymax - ymin) * (bottom - top);
    };

    svg += "<text x=\"" + num(left) + "\" y=\"" + num(top - 10) +
           "\" font-weight=\"bold\">" + panel.title + "</text>\n";
    // frame
    svg += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" +
           num(right - left) + "\" height=\"" + num(bottom - top) +
           "\" fill=\"none\" stroke=\"#444\"/>\n";

    // y-axis ticks; log panels get one tick per integer power within range
    svg += "<g class=\"y-axis\" data-scale=\"";
    svg += panel.log_y ? "log10" : "linear";
    svg += "\">\n";
    std::vector<std::pair<double, std::string>> ticks;
    if (panel.log_y) {
      for (int e = static_cast<int>(std::ceil(ymin));
           e <= static_cast<int>(std::floor(ymax)); ++e) {
        ticks.emplace_back(e, tick_label(e, true));
      }
      if (ticks.empty()) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.2g", std::pow(10.0, ymin));
        ticks.emplace_back(ymin, buf);
        std::snprintf(buf, sizeof(buf), "%.2g", std::pow(10.0, ymax));
        ticks.emplace_back(ymax, buf);
      }
    } else {
      for (int t = 0; t <= 5; ++t) {
        const double v = ymin + (ymax - ymin) * t / 5;
        ticks.emplace_back(v, tick_label(v, false));
      }
    }
    for (const auto& [v, label] : ticks) {
      const double py = bottom - (v - ymin) / (ymax - ymin) * (bottom - top);
      svg += "<line x1=\"" + num(left - 4) + "\" y1=\"" + num(py) + "\" x2=\"" +
             num(left) + "\" y2=\"" + num(py) + "\" stroke=\"#444\"/>\n";
      svg += "<text x=\"" + num(left - 8) + "\" y=\"" + num(py + 4) +
             "\" text-anchor=\"end\">" + label + "</text>\n";
    }
    svg += "</g>\n";
    svg += "<text x=\"14\" y=\"" + num((top + bottom) / 2) +
           "\" transform=\"rotate(-90 14 " + num((top + bottom) / 2) + ")\" " +
           "text-anchor=\"middle\">" + panel.y_label + "</text>\n";

    // x-axis ticks
    const int x_ticks = 6;
    for (int t = 0; t <= x_ticks; ++t) {
      const double v = xmin + (xmax - xmin) * t / x_ticks;
      const double px = sx(v);
      svg += "<line x1=\"" + num(px) + "\" y1=\"" + num(bottom) + "\" x2=\"" +
             num(px) + "\" y2=\"" + num(bottom + 4) + "\" stroke=\"#444\"/>\n";
      svg += "<text x=\"" + num(px) + "\" y=\"" + num(bottom + 16) +
             "\" text-anchor=\"middle\">" + tick_label(v, false) + "</text>\n";
    }
    svg += "<text x=\"" + num((left + right) / 2) + "\" y=\"" +
           num(bottom + 32) + "\" text-anchor=\"middle\">" + x_label +
           "</text>\n";

    // series
    for (const PlotSeries& s : panel.series) {
      std::string pts;
      for (const auto& [x, y] : s.points) {
        if (panel.log_y && !(y > 0.0)) continue;
        pts += num(sx(x)) + "," + num(sy(y)) + " ";
      }
      svg += "<polyline fill=\"none\" stroke=\"" + s.color +
             "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
    }
    // legend
    double lx = right - 110, ly = top + 14;
    for (const PlotSeries& s : panel.series) {
      svg += "<line x1=\"" + num(lx) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" +
             num(lx + 18) + "\" y2=\"" + num(ly - 4) + "\" stroke=\"" +
             s.color + "\" stroke-width=\"2\"/>\n";
      svg += "<text x=\"" + num(lx + 24) + "\" y=\"" + num(ly) + "\">" +
             s.label + "</text>\n";
      ly += 14;
    }
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace vilt
