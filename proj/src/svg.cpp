#include "ecalab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "ecalab/error.hpp"

namespace ecalab {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 180.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  bool log = false;

  double map(double v) const {
    const double t = log ? std::log10(v) : v;
    return hi == lo ? 0.5 : (t - lo) / (hi - lo);
  }
};

Axis fit_axis(const std::vector<SvgSeries>& series, bool use_x, bool log) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& s : series)
    for (double v : use_x ? s.x : s.y) {
      if (!std::isfinite(v) || (log && v <= 0.0)) continue;
      const double t = log ? std::log10(v) : v;
      lo = std::min(lo, t);
      hi = std::max(hi, t);
    }
  if (!std::isfinite(lo)) return {0.0, 1.0, log};
  if (hi == lo) {
    lo -= 0.5;
    hi += 0.5;
  }
  return {lo, hi, log};
}

void write_text(const std::string& text, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << text;
}

}  // namespace

std::string render_svg_curves(const SvgCurveSpec& spec) {
  if (spec.series.empty()) throw Error("svg: at least one series is required");
  for (const auto& s : spec.series)
    if (s.x.size() != s.y.size() || s.x.empty()) throw Error("svg: series '" + s.label + "' is empty or ragged");

  const Axis ax = fit_axis(spec.series, true, spec.log_x);
  const Axis ay = fit_axis(spec.series, false, spec.log_y);
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double v) { return kLeft + ax.map(v) * pw; };
  auto py = [&](double v) { return kTop + (1.0 - ay.map(v)) * ph; };

  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
                    "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + num(kWidth / 2) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" + escape(spec.title) +
         "</text>\n";
  out += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(pw) + "\" height=\"" + num(ph) +
         "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int i = 0; i <= 4; ++i) {
    const double f = i / 4.0;
    const double xv = ax.lo + f * (ax.hi - ax.lo);
    const double yv = ay.lo + f * (ay.hi - ay.lo);
    const double gx = kLeft + f * pw;
    const double gy = kTop + (1.0 - f) * ph;
    out += "<line x1=\"" + num(gx) + "\" y1=\"" + num(kTop) + "\" x2=\"" + num(gx) + "\" y2=\"" + num(kTop + ph) +
           "\" stroke=\"#ddd\"/>\n";
    out += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(gy) + "\" x2=\"" + num(kLeft + pw) + "\" y2=\"" + num(gy) +
           "\" stroke=\"#ddd\"/>\n";
    out += "<text x=\"" + num(gx) + "\" y=\"" + num(kTop + ph + 16) + "\" text-anchor=\"middle\">" +
           tick(ax.log ? std::pow(10.0, xv) : xv) + "</text>\n";
    out += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(gy + 4) + "\" text-anchor=\"end\">" +
           tick(ay.log ? std::pow(10.0, yv) : yv) + "</text>\n";
  }
  out += "<text x=\"" + num(kLeft + pw / 2) + "\" y=\"" + num(kHeight - 15) + "\" text-anchor=\"middle\">" +
         escape(spec.x_label) + "</text>\n";
  out += "<text transform=\"translate(18," + num(kTop + ph / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
         escape(spec.y_label) + "</text>\n";

  for (std::size_t k = 0; k < spec.series.size(); ++k) {
    const auto& s = spec.series[k];
    const std::string color = kColors[k % (sizeof kColors / sizeof kColors[0])];
    if (s.markers) {
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]) || (ax.log && s.x[i] <= 0) || (ay.log && s.y[i] <= 0)) continue;
        out += "<circle cx=\"" + num(px(s.x[i])) + "\" cy=\"" + num(py(s.y[i])) + "\" r=\"3\" fill=\"" + color + "\"/>\n";
      }
    } else {
      out += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\" points=\"";
      bool first = true;
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]) || (ax.log && s.x[i] <= 0) || (ay.log && s.y[i] <= 0)) continue;
        if (!first) out += ' ';
        out += num(px(s.x[i])) + "," + num(py(s.y[i]));
        first = false;
      }
      out += "\"/>\n";
    }
    const double ly = kTop + 10.0 + 18.0 * static_cast<double>(k);
    const double lx = kLeft + pw + 12.0;
    out += "<line x1=\"" + num(lx) + "\" y1=\"" + num(ly) + "\" x2=\"" + num(lx + 20) + "\" y2=\"" + num(ly) +
           "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    out += "<text x=\"" + num(lx + 26) + "\" y=\"" + num(ly + 4) + "\">" + escape(s.label) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

void emit_svg_curves(const SvgCurveSpec& spec, const std::string& path) { write_text(render_svg_curves(spec), path); }

std::string render_svg_heatmap(const AmbiguitySurface& surface, const std::string& title) {
  const auto rows = surface.values.rows();
  const auto cols = surface.values.cols();
  if (rows == 0 || cols == 0) throw Error("svg: empty surface");
  double vmax = 0.0;
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      if (std::isfinite(surface.values(i, j))) vmax = std::max(vmax, surface.values(i, j));
  const double pw = kWidth - kLeft - 40.0;
  const double ph = kHeight - kTop - kBottom;
  const double cw = pw / static_cast<double>(rows);
  const double ch = ph / static_cast<double>(cols);

  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
                    "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + num(kWidth / 2) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" + escape(title) +
         "</text>\n";
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) {
      const double v = surface.values(i, j);
      std::string fill = "#808080";
      if (std::isfinite(v)) {
        // Power in dB below the peak, 40 dB dynamic range.
        const double db = vmax > 0.0 && v > 0.0 ? 10.0 * std::log10(v / vmax) : -40.0;
        const int level = static_cast<int>(std::round(255.0 * std::clamp(1.0 + db / 40.0, 0.0, 1.0)));
        char buf[16];
        std::snprintf(buf, sizeof buf, "#%02x%02x%02x", level, level / 2, 255 - level);
        fill = buf;
      }
      out += "<rect x=\"" + num(kLeft + static_cast<double>(i) * cw) + "\" y=\"" +
             num(kTop + (static_cast<double>(cols - 1 - j)) * ch) + "\" width=\"" + num(cw + 0.05) + "\" height=\"" +
             num(ch + 0.05) + "\" fill=\"" + fill + "\"/>\n";
    }
  out += "<text x=\"" + num(kLeft + pw / 2) + "\" y=\"" + num(kHeight - 15) + "\" text-anchor=\"middle\">delay " +
         tick(surface.tau_grid[0]) + " .. " + tick(surface.tau_grid[rows - 1]) + " s</text>\n";
  out += "<text transform=\"translate(18," + num(kTop + ph / 2) + ") rotate(-90)\" text-anchor=\"middle\">Doppler " +
         tick(surface.omega_grid[0]) + " .. " + tick(surface.omega_grid[cols - 1]) + " rad/s</text>\n";
  out += "</svg>\n";
  return out;
}

void emit_svg_heatmap(const AmbiguitySurface& surface, const std::string& title, const std::string& path) {
  write_text(render_svg_heatmap(surface, title), path);
}

}  // namespace ecalab
