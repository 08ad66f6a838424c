#pragma once

#include <vector>

#include "mesoperc/embedding.hpp"
#include "mesoperc/geometry.hpp"

namespace mesoperc {

/// mu = -(a + tau b + tau^2 c) / (conj(a) + tau conj(b) + tau^2 conj(c)).
/// Throws DegenerateFace for (numerically) collinear corners and
/// InvalidArgument for clockwise ones.
Point beltrami(Point a, Point b, Point c);

/// Beltrami coefficient of every face of an embedded triangulation.
std::vector<Point> face_beltrami(const Triangulation& t, const Embedding& e);

}  // namespace mesoperc
