#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "mesoperc/embedding.hpp"
#include "mesoperc/packing.hpp"
#include "mesoperc/triangulation.hpp"

namespace mesoperc {

struct Circle {
  Point center;
  double radius = 0;
};

/// What to draw, in model coordinates (y up).
struct SvgScene {
  std::vector<std::array<Point, 2>> segments;
  std::vector<Circle> circles;
  std::optional<std::vector<Point>> shaded;  // e.g. one fundamental domain
};

struct SvgStyle {
  double width_px = 800;
  double margin = 0.02;  // fraction of the larger extent
  double stroke_px = 0.6;
  std::string edge_color = "#1f1f1f";
  std::string circle_color = "#3465a4";
  std::string shade_color = "#d0d0d0";
};

/// Every edge once, drawn between the corners of one face containing it. On a
/// torus the face is translated so its centroid lies in the fundamental domain.
std::vector<std::array<Point, 2>> mesh_segments(const Triangulation& t, const Embedding& e);
/// Edges drawn between laid-out face corners of a packing.
std::vector<std::array<Point, 2>> packing_segments(const Triangulation& t, const CirclePacking& cp);
std::vector<Circle> packing_circles(const CirclePacking& cp);
/// Parallelogram spanned by the periods at the origin.
std::vector<Point> fundamental_domain(const Periods& p);

/// Deterministic SVG document. Throws InvalidArgument on an empty scene.
std::string render_svg(const SvgScene& scene, const SvgStyle& style = {});

}  // namespace mesoperc
