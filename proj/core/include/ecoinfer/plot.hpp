#pragma once

// Static SVG line charts for sweep and co-simulation reports.

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace ecoinfer::plot {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct Panel {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  std::vector<Series> series;
};

// Lays the panels out on a grid with `columns` columns.
void write_svg(const std::filesystem::path& path, std::string_view title,
               std::span<const Panel> panels, int columns = 2);

}  // namespace ecoinfer::plot
