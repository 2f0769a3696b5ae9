#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace heatflow::app {

namespace {

constexpr double kWidth = 720.0;
constexpr double kPanelHeight = 240.0;
constexpr double kTop = 40.0;
constexpr double kGap = 30.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 20.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

std::string render_stacked_panels(const std::string& title, const std::vector<double>& x,
                                  const std::vector<Panel>& panels, bool log_x) {
  const double height = kTop + panels.size() * (kPanelHeight + kGap) + 20.0;
  const double plot_w = kWidth - kLeft - kRight;
  auto xmap = [&](double v) { return log_x ? std::log10(v) : v; };
  const double x_lo = x.empty() ? 0.0 : xmap(x.front());
  const double x_hi = x.empty() ? 1.0 : xmap(x.back());
  const double x_span = x_hi > x_lo ? x_hi - x_lo : 1.0;

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << px(kWidth) << "\" height=\""
     << px(height) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << px(kWidth / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
     << title << "</text>\n";

  for (std::size_t p = 0; p < panels.size(); ++p) {
    const Panel& panel = panels[p];
    const double top = kTop + p * (kPanelHeight + kGap);
    const double bottom = top + kPanelHeight;
    double y_lo = std::numeric_limits<double>::infinity();
    double y_hi = -y_lo;
    for (double v : panel.values) {
      if (std::isfinite(v)) {
        y_lo = std::min(y_lo, v);
        y_hi = std::max(y_hi, v);
      }
    }
    if (!(y_lo <= y_hi)) {
      y_lo = 0.0;
      y_hi = 1.0;
    }
    if (y_hi - y_lo < 1e-300) {
      y_lo -= 0.5;
      y_hi += 0.5;
    }
    const double pad = 0.05 * (y_hi - y_lo);
    y_lo -= pad;
    y_hi += pad;
    auto sx = [&](double v) { return kLeft + (xmap(v) - x_lo) / x_span * plot_w; };
    auto sy = [&](double v) { return bottom - (v - y_lo) / (y_hi - y_lo) * kPanelHeight; };

    os << "<rect x=\"" << px(kLeft) << "\" y=\"" << px(top) << "\" width=\"" << px(plot_w)
       << "\" height=\"" << px(kPanelHeight) << "\" fill=\"none\" stroke=\"#444\"/>\n";
    os << "<text x=\"" << px(kLeft + 6) << "\" y=\"" << px(top + 16) << "\">" << panel.label
       << "</text>\n";
    os << "<text x=\"" << px(kLeft - 6) << "\" y=\"" << px(top + 12)
       << "\" text-anchor=\"end\">" << num(y_hi) << "</text>\n";
    os << "<text x=\"" << px(kLeft - 6) << "\" y=\"" << px(bottom)
       << "\" text-anchor=\"end\">" << num(y_lo) << "</text>\n";
    if (y_lo < 0.0 && y_hi > 0.0) {
      os << "<line x1=\"" << px(kLeft) << "\" x2=\"" << px(kLeft + plot_w) << "\" y1=\""
         << px(sy(0.0)) << "\" y2=\"" << px(sy(0.0))
         << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
    }
    bool open = false;
    for (std::size_t i = 0; i < x.size() && i < panel.values.size(); ++i) {
      const double v = panel.values[i];
      if (!std::isfinite(v)) {
        if (open) os << "\"/>\n";
        open = false;
        continue;
      }
      if (!open) {
        os << "<polyline fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"1.5\" points=\"";
        open = true;
      } else {
        os << ' ';
      }
      os << px(sx(x[i])) << ',' << px(sy(v));
    }
    if (open) os << "\"/>\n";
    if (!x.empty()) {
      os << "<text x=\"" << px(kLeft) << "\" y=\"" << px(bottom + 14) << "\">" << num(x.front())
         << "</text>\n";
      os << "<text x=\"" << px(kLeft + plot_w) << "\" y=\"" << px(bottom + 14)
         << "\" text-anchor=\"end\">" << num(x.back()) << "</text>\n";
    }
  }
  os << "<text x=\"" << px(kLeft + plot_w / 2) << "\" y=\"" << px(height - 6)
     << "\" text-anchor=\"middle\">t" << (log_x ? " (log scale)" : "") << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace heatflow::app
