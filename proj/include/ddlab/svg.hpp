#pragma once

#include <string>
#include <vector>

#include "ddlab/numerics.hpp"

// Intentionally primitive SVG line plots: axes, evenly spaced ticks,
// polylines, legend text. Deterministic output (std::to_chars formatting,
// fixed palette), suitable for golden-file tests.

namespace ddlab {

struct Series {
  std::string name;
  Vector x, y;
};

struct PlotSpec {
  std::string title, xlabel, ylabel;
  bool log_y = false;  // log10 scale; nonpositive values are skipped
};

std::string render_line_plot(const std::vector<Series>& series, const PlotSpec& spec);

}  // namespace ddlab
