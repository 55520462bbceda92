#include "qcslab/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "qcslab/error.hpp"

namespace qcslab {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 70.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

const char* const kPalette[] = {"#1f77b4", "#2ca02c", "#d62728", "#9467bd", "#ff7f0e",
                                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", std::abs(v) < 1e-12 ? 0.0 : v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

struct Range {
  double lo = INFINITY;
  double hi = -INFINITY;

  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish() {
    if (!(lo <= hi)) lo = 0.0, hi = 1.0;
    if (lo == hi) {
      const double pad = lo == 0.0 ? 1.0 : 0.05 * std::abs(lo);
      lo -= pad;
      hi += pad;
    }
  }
};

}  // namespace

void validate(const PlotSpec& spec) {
  if (spec.series.empty()) throw Error(ErrorKind::InvalidParameter, "plot needs at least one series");
  for (const auto& s : spec.series) {
    if (s.x.size() != s.y.size()) {
      throw Error(ErrorKind::InvalidParameter, "series '" + s.label + "' has mismatched x/y lengths");
    }
  }
}

std::string svg_string(const PlotSpec& spec) {
  validate(spec);
  Range xr, yr, y2r;
  bool has_secondary = false;
  for (const auto& s : spec.series) {
    has_secondary |= s.secondary_axis;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      xr.add(s.x[i]);
      (s.secondary_axis ? y2r : yr).add(s.y[i]);
    }
  }
  for (const auto& m : spec.markers) {
    xr.add(m.x);
    (m.secondary_axis ? y2r : yr).add(m.y);
  }
  xr.finish();
  yr.finish();
  y2r.finish();

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto py = [&](double y, bool secondary) {
    const Range& r = secondary ? y2r : yr;
    return kTop + ph - (y - r.lo) / (r.hi - r.lo) * ph;
  };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\""
     << num(kHeight) << "\" viewBox=\"0 0 " << num(kWidth) << ' ' << num(kHeight) << "\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << num(kWidth) << "\" height=\"" << num(kHeight)
     << "\" fill=\"white\"/>\n";
  if (!spec.title.empty()) {
    os << "<text x=\"" << num(kWidth / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
       << escape(spec.title) << "</text>\n";
  }

  // Frame and ticks.
  os << "<path d=\"M" << num(kLeft) << ' ' << num(kTop) << " V" << num(kTop + ph) << " H"
     << num(kLeft + pw) << (has_secondary ? " V" + num(kTop) : std::string())
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  constexpr int kTicks = 5;
  for (int i = 0; i <= kTicks; ++i) {
    const double f = static_cast<double>(i) / kTicks;
    const double xv = xr.lo + f * (xr.hi - xr.lo);
    const double yv = yr.lo + f * (yr.hi - yr.lo);
    os << "<line x1=\"" << num(px(xv)) << "\" y1=\"" << num(kTop + ph) << "\" x2=\"" << num(px(xv))
       << "\" y2=\"" << num(kTop + ph + 5) << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << num(px(xv)) << "\" y=\"" << num(kTop + ph + 18)
       << "\" text-anchor=\"middle\" font-size=\"11\">" << tick_label(xv) << "</text>\n";
    os << "<line x1=\"" << num(kLeft - 5) << "\" y1=\"" << num(py(yv, false)) << "\" x2=\""
       << num(kLeft) << "\" y2=\"" << num(py(yv, false)) << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << num(kLeft - 8) << "\" y=\"" << num(py(yv, false) + 4)
       << "\" text-anchor=\"end\" font-size=\"11\">" << tick_label(yv) << "</text>\n";
    if (has_secondary) {
      const double y2v = y2r.lo + f * (y2r.hi - y2r.lo);
      os << "<line x1=\"" << num(kLeft + pw) << "\" y1=\"" << num(py(y2v, true)) << "\" x2=\""
         << num(kLeft + pw + 5) << "\" y2=\"" << num(py(y2v, true)) << "\" stroke=\"black\"/>\n";
      os << "<text x=\"" << num(kLeft + pw + 8) << "\" y=\"" << num(py(y2v, true) + 4)
         << "\" text-anchor=\"start\" font-size=\"11\">" << tick_label(y2v) << "</text>\n";
    }
  }
  os << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 15)
     << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(spec.x_label) << "</text>\n";
  os << "<text x=\"16\" y=\"" << num(kTop + ph / 2) << "\" text-anchor=\"middle\" font-size=\"13\" "
     << "transform=\"rotate(-90 16 " << num(kTop + ph / 2) << ")\">" << escape(spec.y_label)
     << "</text>\n";
  if (has_secondary) {
    const double x2 = kWidth - 14;
    os << "<text x=\"" << num(x2) << "\" y=\"" << num(kTop + ph / 2)
       << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(90 " << num(x2) << ' '
       << num(kTop + ph / 2) << ")\">" << escape(spec.y2_label) << "</text>\n";
  }

  for (std::size_t s = 0; s < spec.series.size(); ++s) {
    const auto& ser = spec.series[s];
    const char* color = kPalette[s % std::size(kPalette)];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\"";
    if (ser.dashed) os << " stroke-dasharray=\"6 4\"";
    os << " points=\"";
    bool first = true;
    for (std::size_t i = 0; i < ser.x.size(); ++i) {
      if (!std::isfinite(ser.x[i]) || !std::isfinite(ser.y[i])) continue;
      if (!first) os << ' ';
      os << num(px(ser.x[i])) << ',' << num(py(ser.y[i], ser.secondary_axis));
      first = false;
    }
    os << "\"/>\n";
    // Legend entry.
    const double ly = kTop + 8 + 16.0 * static_cast<double>(s);
    const double lx = kLeft + pw - 130;
    os << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(lx + 20)
       << "\" y2=\"" << num(ly) << "\" stroke=\"" << color << "\" stroke-width=\"1.8\""
       << (ser.dashed ? " stroke-dasharray=\"6 4\"" : "") << "/>\n";
    os << "<text x=\"" << num(lx + 26) << "\" y=\"" << num(ly + 4) << "\" font-size=\"11\">"
       << escape(ser.label) << "</text>\n";
  }
  for (const auto& m : spec.markers) {
    os << "<circle cx=\"" << num(px(m.x)) << "\" cy=\"" << num(py(m.y, m.secondary_axis))
       << "\" r=\"4.5\" fill=\"black\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void render_svg(const PlotSpec& spec, const std::filesystem::path& path) {
  const std::string body = svg_string(spec);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::Io, "cannot write " + path.string());
  os << body;
  if (!os) throw Error(ErrorKind::Io, "write failed: " + path.string());
}

}  // namespace qcslab
