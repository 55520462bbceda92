#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace qcslab {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool secondary_axis = false;  // plotted against the right-hand axis
  bool dashed = false;
};

struct PlotMarker {
  double x = 0.0;
  double y = 0.0;
  bool secondary_axis = false;
};

struct PlotSpec {
  std::string title;
  std::vector<PlotSeries> series;
  std::string x_label;
  std::string y_label;
  std::string y2_label;  // used when any series is on the secondary axis
  std::vector<PlotMarker> markers;
};

/// Checks the spec invariants; throws Error(InvalidParameter).
void validate(const PlotSpec& spec);

/// Standalone SVG line chart: one polyline per series, one circle per marker.
/// Output bytes depend only on the spec.
std::string svg_string(const PlotSpec& spec);

void render_svg(const PlotSpec& spec, const std::filesystem::path& path);

}  // namespace qcslab
