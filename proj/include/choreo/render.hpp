#pragma once

#include <string>
#include <vector>

#include "choreo/orbit_io.hpp"

namespace choreo {

struct RenderOptions {
  /// Vertices per polyline.
  int density = 512;
  /// Width and height of one panel in SVG user units.
  double panel_size = 400.0;
  bool markers = true;
  /// Subset of "xy", "yz", "xz", "iso"; empty selects every panel for the dimension.
  std::vector<std::string> panels;
};

/// Panels keep fixed slots: xy top-left, yz top-right, xz bottom-left and the
/// isometric (1,1,1) view bottom-right. Planar orbits get a single xy panel.
/// Throws ValidationError for unknown or inapplicable panel names.
std::string render_svg(const OrbitDocument& orbit, const RenderOptions& options = {});

}  // namespace choreo
