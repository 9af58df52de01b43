#include "npi/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <tuple>

namespace npi {

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string tick(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

}  // namespace

std::string render_svg(const std::string& title, const std::string& x_label,
                       const std::vector<Panel>& panels, int width, int panel_height,
                       std::size_t max_points) {
  constexpr int kLeft = 80, kRight = 150, kTop = 40, kGap = 30, kBottom = 50;
  const int plot_w = width - kLeft - kRight;
  const int plot_h = panel_height - kGap;
  const int height = kTop + static_cast<int>(panels.size()) * panel_height + kBottom;

  double x_min = std::numeric_limits<double>::infinity();
  double x_max = -x_min;
  for (const Panel& p : panels)
    for (const Series& s : p.series)
      for (const double x : s.x) {
        x_min = std::min(x_min, x);
        x_max = std::max(x_max, x);
      }
  if (!(x_max > x_min)) {
    x_min = 0.0;
    x_max = 1.0;
  }

  std::ostringstream os;
  os.precision(6);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
     << escape(title) << "</text>\n";

  for (std::size_t pi = 0; pi < panels.size(); ++pi) {
    const Panel& panel = panels[pi];
    const int top = kTop + static_cast<int>(pi) * panel_height;

    double y_min, y_max;
    if (panel.y_range) {
      std::tie(y_min, y_max) = *panel.y_range;
    } else {
      y_min = std::numeric_limits<double>::infinity();
      y_max = -y_min;
      for (const Series& s : panel.series)
        for (const double y : s.y) {
          y_min = std::min(y_min, y);
          y_max = std::max(y_max, y);
        }
      if (!(y_max > y_min)) {
        y_min -= 1.0;
        y_max += 1.0;
      }
    }
    auto px = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * plot_w; };
    auto py = [&](double y) {
      y = std::clamp(y, y_min, y_max);
      return top + plot_h - (y - y_min) / (y_max - y_min) * plot_h;
    };

    os << "<rect x=\"" << kLeft << "\" y=\"" << top << "\" width=\"" << plot_w << "\" height=\""
       << plot_h << "\" fill=\"none\" stroke=\"#444\"/>\n";
    for (int k = 0; k <= 4; ++k) {
      const double yv = y_min + (y_max - y_min) * k / 4.0;
      const double yp = py(yv);
      os << "<line x1=\"" << kLeft << "\" x2=\"" << kLeft + plot_w << "\" y1=\"" << yp
         << "\" y2=\"" << yp << "\" stroke=\"#ddd\"/>\n";
      os << "<text x=\"" << kLeft - 6 << "\" y=\"" << yp + 4 << "\" text-anchor=\"end\">"
         << tick(yv) << "</text>\n";
    }
    if (y_min < 0.0 && y_max > 0.0)
      os << "<line x1=\"" << kLeft << "\" x2=\"" << kLeft + plot_w << "\" y1=\"" << py(0.0)
         << "\" y2=\"" << py(0.0) << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
    os << "<text transform=\"translate(18," << top + plot_h / 2
       << ") rotate(-90)\" text-anchor=\"middle\">" << escape(panel.y_label) << "</text>\n";

    for (std::size_t si = 0; si < panel.series.size(); ++si) {
      const Series& s = panel.series[si];
      const std::size_t n = std::min(s.x.size(), s.y.size());
      const std::size_t stride = std::max<std::size_t>(1, (n + max_points - 1) / max_points);
      os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.4\" points=\"";
      for (std::size_t i = 0; i < n; i += stride) os << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
      if (n > 0 && (n - 1) % stride != 0) os << px(s.x[n - 1]) << ',' << py(s.y[n - 1]);
      os << "\"/>\n";
      const int ly = top + 16 + static_cast<int>(si) * 18;
      os << "<line x1=\"" << kLeft + plot_w + 12 << "\" x2=\"" << kLeft + plot_w + 36
         << "\" y1=\"" << ly - 4 << "\" y2=\"" << ly - 4 << "\" stroke=\"" << s.color
         << "\" stroke-width=\"2\"/>\n";
      os << "<text x=\"" << kLeft + plot_w + 42 << "\" y=\"" << ly << "\">" << escape(s.label)
         << "</text>\n";
    }
  }

  const int axis_y = kTop + static_cast<int>(panels.size()) * panel_height - kGap;
  for (int k = 0; k <= 5; ++k) {
    const double xv = x_min + (x_max - x_min) * k / 5.0;
    os << "<text x=\"" << kLeft + (xv - x_min) / (x_max - x_min) * plot_w << "\" y=\""
       << axis_y + 16 << "\" text-anchor=\"middle\">" << tick(xv) << "</text>\n";
  }
  os << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << axis_y + 36
     << "\" text-anchor=\"middle\">" << escape(x_label) << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace npi
