#pragma once

#include <string>
#include <vector>

#include "ecalab/eca.hpp"

namespace ecalab {

struct SvgSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool markers = false;  // points instead of a line
};

struct SvgCurveSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  std::vector<SvgSeries> series;
};

std::string render_svg_curves(const SvgCurveSpec& spec);
void emit_svg_curves(const SvgCurveSpec& spec, const std::string& path);

std::string render_svg_heatmap(const AmbiguitySurface& surface, const std::string& title);
void emit_svg_heatmap(const AmbiguitySurface& surface, const std::string& title, const std::string& path);

}  // namespace ecalab
