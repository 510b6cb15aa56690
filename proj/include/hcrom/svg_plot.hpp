#ifndef HCROM_SVG_PLOT_HPP
#define HCROM_SVG_PLOT_HPP

#include <filesystem>
#include <string>
#include <vector>

namespace hcrom {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = true;
  int width = 660;
  int height = 460;
};

// Self-contained SVG line plot (no plotting dependency). Non-positive values
// on a log axis are floored at 1e-17.
void write_svg_plot(const std::filesystem::path& path, const PlotSpec& spec,
                    const std::vector<PlotSeries>& series);

}  // namespace hcrom

#endif
