#pragma once

#include <array>
#include <vector>

#include "mesoperc/embedding.hpp"
#include "mesoperc/triangulation.hpp"

namespace mesoperc {

/// Axis-aligned rectangle [x0, x1] x [y0, y1].
struct Rect {
  double x0 = 0, y0 = 0, x1 = 1, y1 = 1;
};

/// Counterclockwise convex polygon.
using ConvexPolygon = std::vector<Point>;

ConvexPolygon to_polygon(const Rect& r);
/// Rectangle of the given size centered at `center`, rotated by `angle` radians.
ConvexPolygon rotated_rectangle(Point center, double width, double height, double angle);

/// Area of the intersection of a triangle with a convex polygon.
double overlap_area(const std::array<Point, 3>& tri, const ConvexPolygon& poly);

/// Largest disk made of the selected faces: keeps the biggest edge-connected
/// component and removes the smaller fans at pinch vertices until the face set
/// is a topological disk. Surviving vertices keep their relative id order.
/// Throws InvalidArgument if the result has holes or fewer than 4 boundary vertices.
struct ExtractedDisk {
  EmbeddedMesh mesh;
  std::vector<int> face_origin;    // new face -> selected input face
  std::vector<int> vertex_origin;  // new vertex -> input vertex
};
ExtractedDisk extract_disk(const std::vector<Face>& faces, const std::vector<Point>& positions);

/// Boundary vertex nearest to `target`, restricted to ids below `id_limit`.
int nearest_boundary_vertex(const Triangulation& t, const Embedding& e, Point target, int id_limit = -1);

struct QuadDomain {
  MarkedRectangleDomain marked;
  Embedding embedding;
};

struct TriangleDomain {
  MarkedTriangleDomain marked;
  Embedding embedding;
};

/// Marks at the boundary vertices nearest to four target points (ccw order a, b, c, d).
QuadDomain mark_quad(EmbeddedMesh mesh, const std::array<Point, 4>& targets, int id_limit = -1);
TriangleDomain mark_triangle(EmbeddedMesh mesh, const std::array<Point, 3>& targets, int id_limit = -1);

/// Rhombus of side L in the triangular lattice (mesh 1/L, unit side), marks at
/// the corners 0, 1, 1 + w, w with w = e^{i pi/3}. Its modulus is 1.
QuadDomain triangular_rhombus(int L);

/// Rows of equilateral triangles with height 1 and `cols` triangles of side
/// 2/(sqrt 3 rows) per row; the vertical sides zigzag. Marks at the corners
/// with arc ab on the right, so the nominal modulus is 2 cols / (sqrt 3 rows).
QuadDomain triangular_rectangle(int rows, int cols);

/// Equilateral triangle with corners 0, 1, w in the triangular lattice of mesh 1/L.
TriangleDomain triangular_triangle(int L);

}  // namespace mesoperc
