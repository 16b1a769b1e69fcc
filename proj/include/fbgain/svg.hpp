#pragma once

// Minimal static SVG line charts: axes, ticks, labels and one polyline per
// series. Panels are stacked vertically in one document.

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace fbgain::svg {

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

struct Panel {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
};

std::string render(std::span<const Panel> panels, int width = 720, int panel_height = 480);

/// Escapes &, <, >, and quotes for text and attribute content.
std::string escape(const std::string& text);

}  // namespace fbgain::svg
