#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace npi {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
};

struct Panel {
  std::string y_label;
  std::vector<Series> series;
  std::optional<std::pair<double, double>> y_range;  // clip to this range
};

/// Stacked line-chart panels sharing the x axis. Each series is thinned to
/// at most `max_points` vertices.
std::string render_svg(const std::string& title, const std::string& x_label,
                       const std::vector<Panel>& panels, int width = 900, int panel_height = 240,
                       std::size_t max_points = 2000);

}  // namespace npi
