#include "ddlab/svg.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "ddlab/errors.hpp"

namespace ddlab {

namespace {

constexpr double kW = 640.0, kH = 420.0;
constexpr double kL = 70.0, kR = 20.0, kT = 34.0, kB = 48.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
constexpr int kPaletteSize = 6;

// 6-significant-digit general format via to_chars: locale-free, deterministic.
std::string fmt6(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 6);
  return std::string(buf, res.ptr);
}

std::string escape_text(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void include(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void widen_if_degenerate() {
    if (!(lo < hi)) {
      const double pad = 0.5 + 0.05 * std::abs(lo);
      lo -= pad;
      hi += pad;
    }
  }
};

}  // namespace

std::string render_line_plot(const std::vector<Series>& series, const PlotSpec& spec) {
  if (series.empty()) throw DomainViolation("render_line_plot: no series");

  auto ty = [&spec](double v) { return spec.log_y ? std::log10(v) : v; };
  auto keep = [&spec](double v) { return !spec.log_y || v > 0.0; };

  Range rx, ry;
  for (const Series& s : series) {
    if (s.x.size() != s.y.size())
      throw DimensionError("render_line_plot: series '" + s.name + "' has x/y length mismatch");
    for (Eigen::Index i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]) || !keep(s.y[i])) continue;
      rx.include(s.x[i]);
      ry.include(ty(s.y[i]));
    }
  }
  if (!std::isfinite(rx.lo) || !std::isfinite(ry.lo))
    throw DomainViolation("render_line_plot: no plottable points");
  rx.widen_if_degenerate();
  ry.widen_if_degenerate();

  auto px = [&rx](double x) { return kL + (x - rx.lo) / (rx.hi - rx.lo) * (kW - kL - kR); };
  auto py = [&ry](double t) { return kH - kB - (t - ry.lo) / (ry.hi - ry.lo) * (kH - kT - kB); };

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt6(kW) << "\" height=\""
      << fmt6(kH) << "\" viewBox=\"0 0 " << fmt6(kW) << " " << fmt6(kH) << "\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << fmt6(kW) << "\" height=\"" << fmt6(kH)
      << "\" fill=\"#ffffff\"/>\n";
  out << "<rect x=\"" << fmt6(kL) << "\" y=\"" << fmt6(kT) << "\" width=\"" << fmt6(kW - kL - kR)
      << "\" height=\"" << fmt6(kH - kT - kB)
      << "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
  if (!spec.title.empty())
    out << "<text x=\"" << fmt6(kW / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\" "
           "font-family=\"sans-serif\">"
        << escape_text(spec.title) << "</text>\n";

  // ticks: 5 evenly spaced positions per axis, including the range endpoints
  for (int i = 0; i <= 4; ++i) {
    const double fx = rx.lo + (rx.hi - rx.lo) * i / 4.0;
    const double gx = px(fx);
    out << "<line x1=\"" << fmt6(gx) << "\" y1=\"" << fmt6(kH - kB) << "\" x2=\"" << fmt6(gx)
        << "\" y2=\"" << fmt6(kH - kB + 5) << "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << fmt6(gx) << "\" y=\"" << fmt6(kH - kB + 18)
        << "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">" << fmt6(fx)
        << "</text>\n";

    const double t = ry.lo + (ry.hi - ry.lo) * i / 4.0;
    const double gy = py(t);
    const double label = spec.log_y ? std::pow(10.0, t) : t;
    out << "<line x1=\"" << fmt6(kL - 5) << "\" y1=\"" << fmt6(gy) << "\" x2=\"" << fmt6(kL)
        << "\" y2=\"" << fmt6(gy) << "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << fmt6(kL - 8) << "\" y=\"" << fmt6(gy + 4)
        << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">" << fmt6(label)
        << "</text>\n";
  }
  if (!spec.xlabel.empty())
    out << "<text x=\"" << fmt6((kL + kW - kR) / 2) << "\" y=\"" << fmt6(kH - 10)
        << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\">"
        << escape_text(spec.xlabel) << "</text>\n";
  if (!spec.ylabel.empty())
    out << "<text x=\"14\" y=\"" << fmt6((kT + kH - kB) / 2)
        << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\" "
           "transform=\"rotate(-90 14 "
        << fmt6((kT + kH - kB) / 2) << ")\">" << escape_text(spec.ylabel) << "</text>\n";

  for (size_t si = 0; si < series.size(); ++si) {
    const Series& s = series[si];
    const char* color = kPalette[si % kPaletteSize];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (Eigen::Index i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]) || !keep(s.y[i])) continue;
      if (!first) out << ' ';
      out << fmt6(px(s.x[i])) << ',' << fmt6(py(ty(s.y[i])));
      first = false;
    }
    out << "\"/>\n";

    const double ly = kT + 14.0 + 16.0 * static_cast<double>(si);
    out << "<line x1=\"" << fmt6(kW - kR - 130) << "\" y1=\"" << fmt6(ly - 4) << "\" x2=\""
        << fmt6(kW - kR - 110) << "\" y2=\"" << fmt6(ly - 4) << "\" stroke=\"" << color
        << "\" stroke-width=\"1.5\"/>\n";
    out << "<text x=\"" << fmt6(kW - kR - 105) << "\" y=\"" << fmt6(ly)
        << "\" font-size=\"11\" font-family=\"sans-serif\">" << escape_text(s.name)
        << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace ddlab
