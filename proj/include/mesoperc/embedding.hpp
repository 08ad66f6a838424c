#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "mesoperc/geometry.hpp"
#include "mesoperc/triangulation.hpp"

namespace mesoperc {

/// Integer multiples of the two torus periods.
struct Lift {
  int i = 0;
  int j = 0;
  friend bool operator==(const Lift&, const Lift&) = default;
};

using Periods = std::array<Point, 2>;

/// Period coordinates (s, t) of z = s*P1 + t*P2.
std::array<double, 2> period_coordinates(const Periods& p, Point z);
/// Translate z into the half-open fundamental parallelogram.
Point reduce_to_fundamental(const Periods& p, Point z);

/// Straight-line embedding. On a torus, positions live in the fundamental
/// domain and each face corner carries the lift that makes the face a genuine
/// planar triangle.
struct Embedding {
  std::vector<Point> positions;
  std::optional<Periods> periods;
  std::vector<std::array<Lift, 3>> lifts;

  Point translation(Lift l) const {
    return periods ? static_cast<double>(l.i) * (*periods)[0] + static_cast<double>(l.j) * (*periods)[1] : Point{};
  }
  Point corner(const Triangulation& t, int f, int k) const {
    const Point p = positions[t.face(f)[k]];
    return lifts.empty() ? p : p + translation(lifts[f][k]);
  }
  std::array<Point, 3> face_corners(const Triangulation& t, int f) const {
    return {corner(t, f, 0), corner(t, f, 1), corner(t, f, 2)};
  }
};

/// Embedding from positions; on a torus the lifts are recovered by the
/// nearest-image rule relative to each face's first corner.
Embedding make_embedding(const Triangulation& t, std::vector<Point> positions,
                         std::optional<Periods> periods = std::nullopt);

/// Geometric checks: orientation, non-degeneracy, consistent lifts.
ValidationReport validate(const Triangulation& t, const Embedding& e);

struct EmbeddedMesh {
  Triangulation triangulation;
  Embedding embedding;
};

}  // namespace mesoperc
