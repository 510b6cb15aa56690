#include "hcrom/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "hcrom/errors.hpp"

namespace hcrom {

namespace {

constexpr const char* kPalette[] = {"#1b6ca8", "#c0392b", "#27ae60",
                                    "#8e44ad", "#e67e22", "#16a085"};
constexpr double kLogFloor = 1e-17;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick_label(double v, bool log_axis) {
  char buf[32];
  if (log_axis)
    std::snprintf(buf, sizeof(buf), "1e%d", static_cast<int>(std::lround(std::log10(v))));
  else if (v == std::floor(v) && std::abs(v) < 1e6)
    std::snprintf(buf, sizeof(buf), "%d", static_cast<int>(v));
  else
    std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace

void write_svg_plot(const std::filesystem::path& path, const PlotSpec& spec,
                    const std::vector<PlotSeries>& series) {
  if (series.empty()) throw ConfigError("write_svg_plot: no series");
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open for writing: " + path.string());

  const double ml = 70, mr = 20, mt = 36, mb = 50;
  const double pw = spec.width - ml - mr, ph = spec.height - mt - mb;

  const auto coord = [&](double v, bool log_axis) {
    if (log_axis) return std::log10(std::max(v, kLogFloor));
    return v;
  };

  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const PlotSeries& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      xmin = std::min(xmin, coord(s.x[i], spec.log_x));
      xmax = std::max(xmax, coord(s.x[i], spec.log_x));
      ymin = std::min(ymin, coord(s.y[i], spec.log_y));
      ymax = std::max(ymax, coord(s.y[i], spec.log_y));
    }
  if (!(xmax > xmin)) xmax = xmin + 1;
  if (!(ymax > ymin)) ymax = ymin + 1;
  if (spec.log_y) {
    ymin = std::floor(ymin);
    ymax = std::ceil(ymax);
    if (!(ymax > ymin)) ymax = ymin + 1;
  }

  const auto px = [&](double v) { return ml + (coord(v, spec.log_x) - xmin) / (xmax - xmin) * pw; };
  const auto py = [&](double v) {
    return mt + ph - (coord(v, spec.log_y) - ymin) / (ymax - ymin) * ph;
  };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\""
      << spec.height << "\" viewBox=\"0 0 " << spec.width << " " << spec.height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << spec.width / 2 << "\" y=\"20\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"14\">" << spec.title << "</text>\n";

  // Axes box.
  out << "<rect x=\"" << num(ml) << "\" y=\"" << num(mt) << "\" width=\"" << num(pw)
      << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"#333\"/>\n";

  // Ticks.
  const auto emit_tick_y = [&](double plot_v, const std::string& label) {
    const double y = mt + ph - (plot_v - ymin) / (ymax - ymin) * ph;
    out << "<line x1=\"" << num(ml - 4) << "\" y1=\"" << num(y) << "\" x2=\"" << num(ml)
        << "\" y2=\"" << num(y) << "\" stroke=\"#333\"/>\n";
    out << "<line x1=\"" << num(ml) << "\" y1=\"" << num(y) << "\" x2=\"" << num(ml + pw)
        << "\" y2=\"" << num(y) << "\" stroke=\"#eee\"/>\n";
    out << "<text x=\"" << num(ml - 8) << "\" y=\"" << num(y + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << label
        << "</text>\n";
  };
  if (spec.log_y) {
    const int lo = static_cast<int>(std::lround(ymin)), hi = static_cast<int>(std::lround(ymax));
    const int step = std::max(1, (hi - lo) / 8);
    for (int e = lo; e <= hi; e += step) emit_tick_y(e, tick_label(std::pow(10.0, e), true));
  } else {
    for (int t = 0; t <= 5; ++t) {
      const double v = ymin + (ymax - ymin) * t / 5.0;
      emit_tick_y(v, tick_label(v, false));
    }
  }
  const int xticks = 6;
  for (int t = 0; t <= xticks; ++t) {
    const double pv = xmin + (xmax - xmin) * t / xticks;
    const double x = ml + (pv - xmin) / (xmax - xmin) * pw;
    const double shown = spec.log_x ? std::pow(10.0, pv) : pv;
    out << "<line x1=\"" << num(x) << "\" y1=\"" << num(mt + ph) << "\" x2=\"" << num(x)
        << "\" y2=\"" << num(mt + ph + 4) << "\" stroke=\"#333\"/>\n";
    out << "<text x=\"" << num(x) << "\" y=\"" << num(mt + ph + 18)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << tick_label(shown, spec.log_x) << "</text>\n";
  }

  // Axis labels.
  out << "<text x=\"" << spec.width / 2 << "\" y=\"" << spec.height - 10
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << spec.x_label
      << "</text>\n";
  out << "<text x=\"16\" y=\"" << mt + ph / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
      << "transform=\"rotate(-90 16 " << mt + ph / 2 << ")\">" << spec.y_label << "</text>\n";

  // Series.
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % (sizeof(kPalette) / sizeof(kPalette[0]))];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\" points=\"";
    for (std::size_t i = 0; i < series[s].x.size(); ++i) {
      if (i) out << " ";
      out << num(px(series[s].x[i])) << "," << num(py(series[s].y[i]));
    }
    out << "\"/>\n";
    for (std::size_t i = 0; i < series[s].x.size(); ++i)
      out << "<circle cx=\"" << num(px(series[s].x[i])) << "\" cy=\"" << num(py(series[s].y[i]))
          << "\" r=\"2.4\" fill=\"" << color << "\"/>\n";
    const double ly = mt + 14 + 16 * static_cast<double>(s);
    out << "<line x1=\"" << num(ml + pw - 150) << "\" y1=\"" << num(ly) << "\" x2=\""
        << num(ml + pw - 130) << "\" y2=\"" << num(ly) << "\" stroke=\"" << color
        << "\" stroke-width=\"1.8\"/>\n";
    out << "<text x=\"" << num(ml + pw - 124) << "\" y=\"" << num(ly + 4)
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << series[s].label << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace hcrom
