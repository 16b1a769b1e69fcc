#include "fbgain/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "fbgain/format.hpp"

namespace fbgain::svg {

namespace {

constexpr std::array<const char*, 8> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                                 "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};
constexpr double kLeft = 70.0;
constexpr double kRight = 130.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 55.0;

std::string num(double v) { return format_number(v, 6); }

struct Axis {
  double lo;
  double hi;
  double step;
};

// Tick step from {1, 2, 5} x 10^k giving roughly `target` intervals.
Axis nice_axis(double lo, double hi, int target = 6) {
  if (!(hi > lo)) {
    const double pad = lo == 0.0 ? 1.0 : 0.05 * std::abs(lo);
    lo -= pad;
    hi += pad;
  }
  const double raw = (hi - lo) / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  return {std::floor(lo / step) * step, std::ceil(hi / step) * step, step};
}

void render_panel(std::ostringstream& out, const Panel& panel, double y0, int width, int height) {
  double xmin = std::numeric_limits<double>::infinity();
  double xmax = -xmin;
  double ymin = xmin;
  double ymax = -xmin;
  for (const Series& s : panel.series) {
    for (const auto& [x, y] : s.points) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  if (!std::isfinite(xmin)) throw std::domain_error("svg: panel has no data");

  const Axis ax = nice_axis(xmin, xmax);
  const Axis ay = nice_axis(ymin, ymax);
  const double plot_w = width - kLeft - kRight;
  const double plot_h = height - kTop - kBottom;
  const auto sx = [&](double x) { return kLeft + (x - ax.lo) / (ax.hi - ax.lo) * plot_w; };
  const auto sy = [&](double y) { return y0 + kTop + (ay.hi - y) / (ay.hi - ay.lo) * plot_h; };

  out << "<g>\n";
  out << "<text x=\"" << num(kLeft + plot_w / 2) << "\" y=\"" << num(y0 + 24)
      << "\" text-anchor=\"middle\" font-size=\"16\">" << escape(panel.title) << "</text>\n";
  out << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(y0 + kTop) << "\" width=\"" << num(plot_w)
      << "\" height=\"" << num(plot_h) << "\" fill=\"none\" stroke=\"#000\"/>\n";

  const long nx = std::lround((ax.hi - ax.lo) / ax.step);
  for (long i = 0; i <= nx; ++i) {
    const double v = ax.lo + ax.step * static_cast<double>(i);
    const double x = sx(v);
    out << "<line x1=\"" << num(x) << "\" y1=\"" << num(y0 + kTop) << "\" x2=\"" << num(x) << "\" y2=\""
        << num(y0 + kTop + plot_h) << "\" stroke=\"#ddd\"/>\n";
    out << "<text x=\"" << num(x) << "\" y=\"" << num(y0 + kTop + plot_h + 18)
        << "\" text-anchor=\"middle\" font-size=\"12\">" << num(v) << "</text>\n";
  }
  const long ny = std::lround((ay.hi - ay.lo) / ay.step);
  for (long i = 0; i <= ny; ++i) {
    const double v = ay.lo + ay.step * static_cast<double>(i);
    const double y = sy(v);
    out << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(y) << "\" x2=\"" << num(kLeft + plot_w)
        << "\" y2=\"" << num(y) << "\" stroke=\"#ddd\"/>\n";
    out << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(y + 4)
        << "\" text-anchor=\"end\" font-size=\"12\">" << num(v) << "</text>\n";
  }

  out << "<text x=\"" << num(kLeft + plot_w / 2) << "\" y=\"" << num(y0 + height - 12)
      << "\" text-anchor=\"middle\" font-size=\"14\">" << escape(panel.x_label) << "</text>\n";
  const double ymid = y0 + kTop + plot_h / 2;
  out << "<text x=\"18\" y=\"" << num(ymid) << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 18 "
      << num(ymid) << ")\">" << escape(panel.y_label) << "</text>\n";

  for (std::size_t i = 0; i < panel.series.size(); ++i) {
    const Series& s = panel.series[i];
    const char* color = kPalette[i % kPalette.size()];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t j = 0; j < s.points.size(); ++j) {
      if (j) out << ' ';
      out << num(sx(s.points[j].first)) << ',' << num(sy(s.points[j].second));
    }
    out << "\"/>\n";
    const double ly = y0 + kTop + 16 + 18 * static_cast<double>(i);
    out << "<line x1=\"" << num(kLeft + plot_w + 12) << "\" y1=\"" << num(ly - 4) << "\" x2=\""
        << num(kLeft + plot_w + 32) << "\" y2=\"" << num(ly - 4) << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << num(kLeft + plot_w + 38) << "\" y=\"" << num(ly) << "\" font-size=\"12\">"
        << escape(s.label) << "</text>\n";
  }
  out << "</g>\n";
}

}  // namespace

std::string escape(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string render(std::span<const Panel> panels, int width, int panel_height) {
  if (panels.empty()) throw std::domain_error("svg: nothing to render");
  std::ostringstream out;
  out.imbue(std::locale::classic());
  const int height = panel_height * static_cast<int>(panels.size());
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n";
  for (std::size_t i = 0; i < panels.size(); ++i) {
    render_panel(out, panels[i], static_cast<double>(panel_height) * static_cast<double>(i), width,
                 panel_height);
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace fbgain::svg
