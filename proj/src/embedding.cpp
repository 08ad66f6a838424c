#include "mesoperc/embedding.hpp"

#include <cmath>
#include <string>

#include "mesoperc/error.hpp"

namespace mesoperc {

std::array<double, 2> period_coordinates(const Periods& p, Point z) {
  const double det = cross(p[0], p[1]);
  return {cross(z, p[1]) / det, cross(p[0], z) / det};
}

Point reduce_to_fundamental(const Periods& p, Point z) {
  auto [s, t] = period_coordinates(p, z);
  s -= std::floor(s);
  t -= std::floor(t);
  if (s >= 1.0) s = 0.0;
  if (t >= 1.0) t = 0.0;
  return s * p[0] + t * p[1];
}

Embedding make_embedding(const Triangulation& t, std::vector<Point> positions, std::optional<Periods> periods) {
  if (static_cast<int>(positions.size()) != t.vertex_count()) {
    throw InvalidArgument("embedding has " + std::to_string(positions.size()) + " positions for " +
                          std::to_string(t.vertex_count()) + " vertices");
  }
  if (t.is_torus() != periods.has_value()) {
    throw InvalidArgument(t.is_torus() ? "torus embedding needs periods" : "planar embedding cannot have periods");
  }
  Embedding e;
  e.positions = std::move(positions);
  e.periods = periods;
  if (periods) {
    if (cross((*periods)[0], (*periods)[1]) <= 0.0) throw InvalidArgument("periods must be positively oriented");
    e.lifts.resize(t.face_count());
    for (int f = 0; f < t.face_count(); ++f) {
      const Face& fc = t.face(f);
      for (int k = 1; k < 3; ++k) {
        const auto st = period_coordinates(*periods, e.positions[fc[k]] - e.positions[fc[0]]);
        e.lifts[f][k] = Lift{-static_cast<int>(std::lround(st[0])), -static_cast<int>(std::lround(st[1]))};
      }
    }
  }
  return e;
}

ValidationReport validate(const Triangulation& t, const Embedding& e) {
  ValidationReport r;
  auto& bad = r.violations;
  if (static_cast<int>(e.positions.size()) != t.vertex_count()) {
    bad.push_back("embedding position count does not match vertex count");
    return r;
  }
  for (int v = 0; v < t.vertex_count(); ++v) {
    if (!std::isfinite(e.positions[v].real()) || !std::isfinite(e.positions[v].imag())) {
      bad.push_back("vertex " + std::to_string(v) + " has a non-finite position");
    }
  }
  if (t.is_torus()) {
    if (!e.periods) {
      bad.push_back("torus embedding has no periods");
      return r;
    }
    if (cross((*e.periods)[0], (*e.periods)[1]) <= 0.0) bad.push_back("periods are degenerate or negatively oriented");
    if (static_cast<int>(e.lifts.size()) != t.face_count()) {
      bad.push_back("torus embedding lifts missing");
      return r;
    }
  } else if (e.periods) {
    bad.push_back("planar embedding declares periods");
  }
  if (!bad.empty()) return r;

  double total_area = 0.0;
  for (int f = 0; f < t.face_count(); ++f) {
    const auto c = e.face_corners(t, f);
    const double area = signed_area(c[0], c[1], c[2]);
    total_area += area;
    if (is_degenerate(c[0], c[1], c[2])) {
      bad.push_back("degenerate face " + std::to_string(f));
    } else if (area < 0.0) {
      bad.push_back("negative face orientation (face " + std::to_string(f) + ")");
    }
  }
  double scale = 0.0;
  for (int f = 0; f < t.face_count(); ++f) {
    const auto c = e.face_corners(t, f);
    scale = std::max(scale, longest_edge(c[0], c[1], c[2]));
  }
  for (int h = 0; h < t.halfedge_count(); ++h) {
    const int tw = t.twin(h);
    if (tw < 0 || tw < h) continue;
    const int f = Triangulation::face_of(h), g = Triangulation::face_of(tw);
    const Point d1 = e.corner(t, f, Triangulation::next(h) % 3) - e.corner(t, f, h % 3);
    const Point d2 = e.corner(t, g, Triangulation::next(tw) % 3) - e.corner(t, g, tw % 3);
    if (std::abs(d1 + d2) > 1e-9 * scale) {
      bad.push_back("inconsistent lift across edge " + std::to_string(t.edge_of(h)));
    }
  }
  if (t.is_torus() && bad.empty()) {
    const double cell = cross((*e.periods)[0], (*e.periods)[1]);
    if (std::abs(total_area - cell) > 1e-9 * cell) bad.push_back("faces do not tile exactly one fundamental domain");
  }
  return r;
}

}  // namespace mesoperc
