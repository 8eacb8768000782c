#pragma once

#include <string>
#include <vector>

#include "seabed/field.hpp"

namespace seabed {

struct PlotSeries {
  std::string label;
  std::vector<double> x, y;
  std::string color;  // empty picks from a fixed palette
};

struct PlotOptions {
  std::string title;
  std::string x_label = "X";
  std::string y_label;
  int width = 720;
  int height = 440;
  bool log_y = false;
};

// Line chart with axes, ticks and a legend; returns the SVG document.
std::string render_line_plot(const std::vector<PlotSeries>& series, const PlotOptions& opts);

// Bar chart for small categorical summaries (term magnitudes, sweep values).
std::string render_bar_chart(const std::vector<std::string>& labels,
                             const std::vector<double>& values, const PlotOptions& opts);

PlotSeries series_from_field(const std::string& label, const ScalarField& f,
                             const std::string& color = "");

void write_svg(const std::string& path, const std::string& document);

}  // namespace seabed
