#include "otgeo/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace otgeo::bench {

namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 70, kRight = 150, kTop = 40, kBottom = 50;
const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

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
  bool log = false;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  bool usable(double v) const { return std::isfinite(v) && (!log || v > 0.0); }
  double t(double v) const { return log ? std::log10(v) : v; }
  void include(double v) {
    if (!usable(v)) return;
    lo = std::min(lo, t(v));
    hi = std::max(hi, t(v));
  }
  void finish() {
    if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
    if (hi - lo < 1e-12) {
      lo -= 0.5;
      hi += 0.5;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
  double frac(double v) const { return (t(v) - lo) / (hi - lo); }
  double tick_value(double u) const { return log ? std::pow(10.0, u) : u; }
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

}  // namespace

std::string render_line_plot(const PlotSpec& spec, const std::vector<PlotSeries>& series) {
  Axis ax{spec.log_x}, ay{spec.log_y};
  for (const auto& s : series) {
    for (double x : s.xs) ax.include(x);
    for (std::size_t i = 0; i < s.ys.size(); ++i) {
      ay.include(s.ys[i]);
      if (i < s.lo.size()) ay.include(s.lo[i]);
      if (i < s.hi.size()) ay.include(s.hi[i]);
    }
  }
  ax.finish();
  ay.finish();
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + ax.frac(x) * pw; };
  auto py = [&](double y) { return kTop + (1.0 - ay.frac(y)) * ph; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
     << escape(spec.title) << "</text>\n";
  os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double ux = ax.lo + (ax.hi - ax.lo) * k / 4.0;
    const double x = kLeft + pw * k / 4.0;
    os << "<line x1=\"" << x << "\" y1=\"" << kTop + ph << "\" x2=\"" << x << "\" y2=\""
       << kTop + ph + 5 << "\" stroke=\"black\"/>";
    os << "<text x=\"" << x << "\" y=\"" << kTop + ph + 18 << "\" text-anchor=\"middle\">"
       << fmt(ax.tick_value(ux)) << "</text>\n";
    const double uy = ay.lo + (ay.hi - ay.lo) * k / 4.0;
    const double y = kTop + ph - ph * k / 4.0;
    os << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << y << "\" x2=\"" << kLeft << "\" y2=\"" << y
       << "\" stroke=\"black\"/>";
    os << "<text x=\"" << kLeft - 8 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">"
       << fmt(ay.tick_value(uy)) << "</text>\n";
  }
  os << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 10 << "\" text-anchor=\"middle\">"
     << escape(spec.x_label) << "</text>\n";
  os << "<text transform=\"translate(16," << kTop + ph / 2
     << ") rotate(-90)\" text-anchor=\"middle\">" << escape(spec.y_label) << "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& ser = series[s];
    const char* color = kPalette[s % std::size(kPalette)];
    std::ostringstream pts;
    for (std::size_t i = 0; i < ser.xs.size() && i < ser.ys.size(); ++i) {
      if (!ax.usable(ser.xs[i]) || !ay.usable(ser.ys[i])) continue;
      pts << px(ser.xs[i]) << ',' << py(ser.ys[i]) << ' ';
      os << "<circle cx=\"" << px(ser.xs[i]) << "\" cy=\"" << py(ser.ys[i]) << "\" r=\"3\" fill=\""
         << color << "\"/>\n";
      if (i < ser.lo.size() && i < ser.hi.size() && ay.usable(ser.lo[i]) && ay.usable(ser.hi[i]))
        os << "<line x1=\"" << px(ser.xs[i]) << "\" y1=\"" << py(ser.lo[i]) << "\" x2=\""
           << px(ser.xs[i]) << "\" y2=\"" << py(ser.hi[i]) << "\" stroke=\"" << color << "\"/>\n";
    }
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"" << pts.str() << "\"/>\n";
    const double ly = kTop + 12 + 18.0 * static_cast<double>(s);
    os << "<rect x=\"" << kWidth - kRight + 12 << "\" y=\"" << ly - 9 << "\" width=\"10\" height=\"10\" fill=\""
       << color << "\"/><text x=\"" << kWidth - kRight + 28 << "\" y=\"" << ly << "\">"
       << escape(ser.name) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace otgeo::bench
