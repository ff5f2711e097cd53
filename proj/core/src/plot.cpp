#include "ecoinfer/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "csv_util.hpp"

namespace ecoinfer::plot {

namespace {

constexpr double kPanelW = 460.0;
constexpr double kPanelH = 320.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                   "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
    if (hi - lo < 1e-12) {
      const double d = std::max(std::abs(lo) * 0.1, 1.0);
      lo -= d;
      hi += d;
    }
  }
};

void draw_panel(std::ostringstream& svg, const Panel& panel, double ox, double oy) {
  Range xr, yr;
  for (const auto& s : panel.series) {
    for (double x : s.x) xr.add(panel.log_x ? (x > 0 ? std::log10(x) : NAN) : x);
    for (double y : s.y) yr.add(y);
  }
  xr.pad();
  yr.pad();
  yr.lo = std::min(yr.lo, 0.0) == 0.0 && yr.lo > 0 && yr.lo < 0.3 * yr.hi ? 0.0 : yr.lo;

  const double pw = kPanelW - kLeft - kRight;
  const double ph = kPanelH - kTop - kBottom;
  auto px = [&](double x) {
    const double v = panel.log_x ? std::log10(x) : x;
    return ox + kLeft + (v - xr.lo) / (xr.hi - xr.lo) * pw;
  };
  auto py = [&](double y) { return oy + kTop + ph - (y - yr.lo) / (yr.hi - yr.lo) * ph; };

  svg << "<text x=\"" << num(ox + kPanelW / 2) << "\" y=\"" << num(oy + 22)
      << "\" text-anchor=\"middle\" font-size=\"14\" font-weight=\"bold\">" << escape(panel.title)
      << "</text>\n";
  svg << "<rect x=\"" << num(ox + kLeft) << "\" y=\"" << num(oy + kTop) << "\" width=\"" << num(pw)
      << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"#444\"/>\n";

  for (int i = 0; i <= 4; ++i) {
    const double fy = yr.lo + (yr.hi - yr.lo) * i / 4.0;
    const double y = py(fy);
    svg << "<line x1=\"" << num(ox + kLeft) << "\" x2=\"" << num(ox + kLeft + pw) << "\" y1=\""
        << num(y) << "\" y2=\"" << num(y) << "\" stroke=\"#ddd\"/>\n";
    svg << "<text x=\"" << num(ox + kLeft - 6) << "\" y=\"" << num(y + 4)
        << "\" text-anchor=\"end\" font-size=\"10\">" << tick_label(fy) << "</text>\n";

    const double fx = xr.lo + (xr.hi - xr.lo) * i / 4.0;
    const double xv = panel.log_x ? std::pow(10.0, fx) : fx;
    const double x = ox + kLeft + pw * i / 4.0;
    svg << "<text x=\"" << num(x) << "\" y=\"" << num(oy + kTop + ph + 16)
        << "\" text-anchor=\"middle\" font-size=\"10\">" << tick_label(xv) << "</text>\n";
  }
  svg << "<text x=\"" << num(ox + kLeft + pw / 2) << "\" y=\"" << num(oy + kPanelH - 10)
      << "\" text-anchor=\"middle\" font-size=\"11\">" << escape(panel.x_label) << "</text>\n";
  svg << "<text transform=\"translate(" << num(ox + 16) << "," << num(oy + kTop + ph / 2)
      << ") rotate(-90)\" text-anchor=\"middle\" font-size=\"11\">" << escape(panel.y_label)
      << "</text>\n";

  std::size_t color = 0;
  for (const auto& s : panel.series) {
    const char* c = kColors[color++ % std::size(kColors)];
    svg << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (panel.log_x && s.x[i] <= 0) continue;
      svg << num(px(s.x[i])) << ',' << num(py(s.y[i])) << ' ';
    }
    svg << "\"/>\n";
    if (s.x.size() <= 64) {
      for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
        if (panel.log_x && s.x[i] <= 0) continue;
        svg << "<circle cx=\"" << num(px(s.x[i])) << "\" cy=\"" << num(py(s.y[i]))
            << "\" r=\"2.5\" fill=\"" << c << "\"/>\n";
      }
    }
  }

  if (panel.series.size() > 1 || (!panel.series.empty() && !panel.series[0].label.empty())) {
    double ly = oy + kTop + 12;
    color = 0;
    for (const auto& s : panel.series) {
      const char* c = kColors[color++ % std::size(kColors)];
      svg << "<rect x=\"" << num(ox + kLeft + 8) << "\" y=\"" << num(ly - 8)
          << "\" width=\"10\" height=\"3\" fill=\"" << c << "\"/>\n";
      svg << "<text x=\"" << num(ox + kLeft + 22) << "\" y=\"" << num(ly - 4)
          << "\" font-size=\"9\">" << escape(s.label) << "</text>\n";
      ly += 12;
    }
  }
}

}  // namespace

void write_svg(const std::filesystem::path& path, std::string_view title,
               std::span<const Panel> panels, int columns) {
  columns = std::max(1, std::min<int>(columns, static_cast<int>(std::max<std::size_t>(panels.size(), 1))));
  const int rows = static_cast<int>((panels.size() + columns - 1) / columns);
  const double width = columns * kPanelW;
  const double height = rows * kPanelH + 40.0;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\""
      << num(height) << "\" font-family=\"sans-serif\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << num(width / 2) << "\" y=\"26\" text-anchor=\"middle\" font-size=\"16\">"
      << escape(title) << "</text>\n";
  for (std::size_t i = 0; i < panels.size(); ++i) {
    const double ox = static_cast<double>(i % columns) * kPanelW;
    const double oy = 40.0 + static_cast<double>(i / columns) * kPanelH;
    draw_panel(svg, panels[i], ox, oy);
  }
  svg << "</svg>\n";

  auto out = detail::open_for_write(path);
  out << svg.str();
}

}  // namespace ecoinfer::plot
