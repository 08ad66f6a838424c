#include "mesoperc/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "mesoperc/error.hpp"

namespace mesoperc {

namespace {

// Edges taken from per-face corners; on a torus each face is first moved so
// its centroid lies in the fundamental domain.
template <class Corner>
std::vector<std::array<Point, 2>> face_segments(const Triangulation& t, const std::optional<Periods>& periods,
                                                 Corner corner) {
  std::vector<std::array<Point, 2>> out;
  out.reserve(t.edge_count());
  for (int id = 0; id < t.edge_count(); ++id) {
    const int h = t.edge_halfedge(id);
    const int f = Triangulation::face_of(h);
    Point shift{0, 0};
    if (periods) {
      const Point c = (corner(f, 0) + corner(f, 1) + corner(f, 2)) / 3.0;
      const auto [u, v] = period_coordinates(*periods, c);
      shift = -std::floor(u) * (*periods)[0] - std::floor(v) * (*periods)[1];
    }
    out.push_back({corner(f, h % 3) + shift, corner(f, Triangulation::next(h) % 3) + shift});
  }
  return out;
}

}  // namespace

std::vector<std::array<Point, 2>> mesh_segments(const Triangulation& t, const Embedding& e) {
  return face_segments(t, e.periods, [&](int f, int k) { return e.corner(t, f, k); });
}

std::vector<std::array<Point, 2>> packing_segments(const Triangulation& t, const CirclePacking& cp) {
  return face_segments(t, cp.periods, [&](int f, int k) { return cp.face_corners[f][k]; });
}

std::vector<Circle> packing_circles(const CirclePacking& cp) {
  std::vector<Circle> out;
  out.reserve(cp.radii.size());
  for (std::size_t v = 0; v < cp.radii.size(); ++v) out.push_back({cp.centers[v], cp.radii[v]});
  return out;
}

std::vector<Point> fundamental_domain(const Periods& p) { return {Point{0, 0}, p[0], p[0] + p[1], p[1]}; }

namespace {

void put(std::string& s, const char* fmt, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, a);
  s += buf;
}

}  // namespace

std::string render_svg(const SvgScene& scene, const SvgStyle& style) {
  if (scene.segments.empty() && scene.circles.empty()) throw InvalidArgument("render_svg: empty geometry");
  double x0 = std::numeric_limits<double>::infinity(), y0 = x0, x1 = -x0, y1 = -x0;
  auto grow = [&](Point p, double r) {
    x0 = std::min(x0, p.real() - r);
    x1 = std::max(x1, p.real() + r);
    y0 = std::min(y0, p.imag() - r);
    y1 = std::max(y1, p.imag() + r);
  };
  for (const auto& s : scene.segments) {
    grow(s[0], 0);
    grow(s[1], 0);
  }
  for (const Circle& c : scene.circles) grow(c.center, c.radius);
  if (scene.shaded) {
    for (Point p : *scene.shaded) grow(p, 0);
  }
  const double extent = std::max({x1 - x0, y1 - y0, 1e-300});
  const double pad = style.margin * extent;
  x0 -= pad;
  y0 -= pad;
  x1 += pad;
  y1 += pad;
  const double scale = style.width_px / (x1 - x0);
  const double height_px = (y1 - y0) * scale;
  auto X = [&](Point p) { return (p.real() - x0) * scale; };
  auto Y = [&](Point p) { return (y1 - p.imag()) * scale; };

  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\"";
  put(s, " width=\"%.3f\"", style.width_px);
  put(s, " height=\"%.3f\"", height_px);
  put(s, " viewBox=\"0 0 %.3f", style.width_px);
  put(s, " %.3f\">\n", height_px);
  if (scene.shaded) {
    s += "<polygon fill=\"" + style.shade_color + "\" stroke=\"none\" points=\"";
    for (std::size_t i = 0; i < scene.shaded->size(); ++i) {
      if (i) s += ' ';
      put(s, "%.4f", X((*scene.shaded)[i]));
      put(s, ",%.4f", Y((*scene.shaded)[i]));
    }
    s += "\"/>\n";
  }
  if (!scene.circles.empty()) {
    s += "<g fill=\"none\" stroke=\"" + style.circle_color + "\"";
    put(s, " stroke-width=\"%.3f\">\n", style.stroke_px);
    for (const Circle& c : scene.circles) {
      put(s, "<circle cx=\"%.4f\"", X(c.center));
      put(s, " cy=\"%.4f\"", Y(c.center));
      put(s, " r=\"%.4f\"/>\n", c.radius * scale);
    }
    s += "</g>\n";
  }
  if (!scene.segments.empty()) {
    s += "<g stroke=\"" + style.edge_color + "\" stroke-linecap=\"round\"";
    put(s, " stroke-width=\"%.3f\">\n", style.stroke_px);
    for (const auto& seg : scene.segments) {
      put(s, "<line x1=\"%.4f\"", X(seg[0]));
      put(s, " y1=\"%.4f\"", Y(seg[0]));
      put(s, " x2=\"%.4f\"", X(seg[1]));
      put(s, " y2=\"%.4f\"/>\n", Y(seg[1]));
    }
    s += "</g>\n";
  }
  s += "</svg>\n";
  return s;
}

}  // namespace mesoperc
