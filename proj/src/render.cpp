#include "choreo/render.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>

#include "choreo/error.hpp"

namespace choreo {

namespace {

constexpr std::array<const char*, 8> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                              "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

struct PanelDef {
  std::string name;
  int slot_x, slot_y;
  std::string label;
};

const std::vector<PanelDef>& panel_defs() {
  static const std::vector<PanelDef> defs{{"xy", 0, 0, "x-y"}, {"yz", 1, 0, "y-z"}, {"xz", 0, 1, "x-z"},
                                          {"iso", 1, 1, "isometric (1,1,1)"}};
  return defs;
}

Eigen::Vector2d project(const std::string& panel, const Eigen::VectorXd& q) {
  if (panel == "xy") return {q(0), q(1)};
  if (panel == "yz") return {q(1), q(2)};
  if (panel == "xz") return {q(0), q(2)};
  // Screen basis orthogonal to the (1,1,1) viewing direction.
  const double u = (q(1) - q(0)) / std::sqrt(2.0);
  const double v = (2.0 * q(2) - q(0) - q(1)) / std::sqrt(6.0);
  return {u, v};
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace

std::string render_svg(const OrbitDocument& orbit, const RenderOptions& options) {
  if (options.density < 2) throw ValidationError("density", "density must be at least 2");
  const auto loops = orbit.body_loops();
  const int dim = orbit.config.spec.dim();
  const auto layout = body_layout(orbit.config.spec);

  std::vector<PanelDef> panels;
  for (const auto& def : panel_defs()) {
    const bool wanted = options.panels.empty()
                            ? (dim == 3 || def.name == "xy")
                            : std::find(options.panels.begin(), options.panels.end(), def.name) != options.panels.end();
    if (wanted) panels.push_back(def);
  }
  for (const auto& name : options.panels) {
    const bool known = std::any_of(panel_defs().begin(), panel_defs().end(), [&](const PanelDef& d) { return d.name == name; });
    if (!known) throw ValidationError("panels", "unknown panel '" + name + "'");
    if (dim == 2 && name != "xy") throw ValidationError("panels", "panel '" + name + "' needs a spatial orbit");
  }

  const bool grid = dim == 3 && options.panels.empty();
  const double s = options.panel_size;
  const double width = grid ? 2 * s : s * static_cast<double>(panels.size());
  const double height = grid ? 2 * s : s;
  const double period = orbit.config.period;

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(width) + "\" height=\"" + fmt(height) +
         "\" viewBox=\"0 0 " + fmt(width) + " " + fmt(height) + "\">\n";
  out += "  <metadata>{\"projection\": {\"iso\": \"orthographic along (1,1,1)/sqrt(3), screen axes "
         "(-1,1,0)/sqrt(2) and (-1,-1,2)/sqrt(6)\"}, \"bodies\": " +
         std::to_string(loops.size()) + ", \"density\": " + std::to_string(options.density) + "}</metadata>\n";
  out += "  <rect x=\"0\" y=\"0\" width=\"" + fmt(width) + "\" height=\"" + fmt(height) + "\" fill=\"white\"/>\n";

  for (std::size_t p = 0; p < panels.size(); ++p) {
    const auto& def = panels[p];
    const double ox = grid ? def.slot_x * s : static_cast<double>(p) * s;
    const double oy = grid ? def.slot_y * s : 0.0;

    std::vector<std::vector<Eigen::Vector2d>> pts(loops.size());
    Eigen::Vector2d lo = Eigen::Vector2d::Constant(std::numeric_limits<double>::infinity());
    Eigen::Vector2d hi = -lo;
    for (std::size_t b = 0; b < loops.size(); ++b) {
      for (int j = 0; j < options.density; ++j) {
        // Closed curve: the last vertex repeats the first.
        const double t = period * j / (options.density - 1);
        pts[b].push_back(project(def.name, evaluate(loops[b], t)));
        lo = lo.cwiseMin(pts[b].back());
        hi = hi.cwiseMax(pts[b].back());
      }
    }
    const double margin = 0.08 * s;
    const double span = std::max({hi.x() - lo.x(), hi.y() - lo.y(), 1e-12});
    const double scale = (s - 2 * margin) / span;
    const Eigen::Vector2d mid = 0.5 * (lo + hi);
    auto to_screen = [&](const Eigen::Vector2d& v) {
      return Eigen::Vector2d(ox + 0.5 * s + scale * (v.x() - mid.x()), oy + 0.5 * s - scale * (v.y() - mid.y()));
    };

    out += "  <g class=\"panel\" id=\"panel-" + def.name + "\" data-projection=\"" + def.name + "\">\n";
    out += "    <rect x=\"" + fmt(ox + 1) + "\" y=\"" + fmt(oy + 1) + "\" width=\"" + fmt(s - 2) + "\" height=\"" +
           fmt(s - 2) + "\" fill=\"none\" stroke=\"#cccccc\"/>\n";
    out += "    <text x=\"" + fmt(ox + 10) + "\" y=\"" + fmt(oy + 20) +
           "\" font-family=\"sans-serif\" font-size=\"14\">" + def.label + "</text>\n";
    for (std::size_t b = 0; b < loops.size(); ++b) {
      const char* color = kPalette[static_cast<std::size_t>(layout[b].group) % kPalette.size()];
      out += "    <polyline class=\"body\" data-body=\"" + std::to_string(b + 1) + "\" data-group=\"" +
             std::to_string(layout[b].group + 1) + "\" fill=\"none\" stroke=\"" + color +
             "\" stroke-width=\"1.2\" points=\"";
      for (std::size_t j = 0; j < pts[b].size(); ++j) {
        const auto v = to_screen(pts[b][j]);
        if (j) out += ' ';
        out += fmt(v.x()) + "," + fmt(v.y());
      }
      out += "\"/>\n";
    }
    if (options.markers) {
      for (std::size_t b = 0; b < loops.size(); ++b) {
        const char* color = kPalette[static_cast<std::size_t>(layout[b].group) % kPalette.size()];
        const auto v = to_screen(pts[b].front());
        out += "    <circle class=\"start\" cx=\"" + fmt(v.x()) + "\" cy=\"" + fmt(v.y()) + "\" r=\"4\" fill=\"" +
               color + "\"/>\n";
      }
    }
    out += "  </g>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace choreo
