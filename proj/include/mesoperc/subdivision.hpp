#pragma once

#include <array>
#include <vector>

#include "mesoperc/embedding.hpp"
#include "mesoperc/triangulation.hpp"

namespace mesoperc {

/// Combinatorial subdivision T'. Old vertices keep their ids; the vertex for
/// edge e is V + e. Children of face f are 4f..4f+3, central child last.
struct Subdivided {
  Triangulation triangulation;
  /// For each vertex of T': (v, v) for an old vertex, else the parent edge endpoints.
  std::vector<std::array<int, 2>> parents;
};

Subdivided subdivide(const Triangulation& t);

/// Subdivision with every new vertex at the midpoint of its (lifted) edge.
EmbeddedMesh subdivide(const Triangulation& t, const Embedding& e);

/// n iterated subdivisions, combinatorial only.
Triangulation subdivide_times(const Triangulation& t, int n);

/// Replace each face by the side-n patch of the triangular lattice, affinely
/// mapped. Old vertices keep their ids, then n-1 points per edge (edge order,
/// from the smaller endpoint id), then face-interior points. Children of face
/// f are f*n*n .. (f+1)*n*n - 1.
EmbeddedMesh refine(const Triangulation& t, const Embedding& e, int n_side);
Triangulation refine(const Triangulation& t, int n_side);

}  // namespace mesoperc
