#pragma once

#include <vector>

#include "mesoperc/domains.hpp"
#include "mesoperc/embedding.hpp"

namespace mesoperc {

/// T_{delta,N} restricted to a planar window. Coarse vertex ids are kept by the
/// refinement, so coarse vertex v is fine vertex v.
struct MesoscopicLattice {
  EmbeddedMesh coarse;  // the delta-scaled cells as a planar disk
  EmbeddedMesh fine;    // each cell refined with side N
  std::vector<int> cell_of_face;       // fine face -> coarse face
  std::vector<int> cell_source_face;   // coarse face -> torus face
  std::vector<Point> cell_mu;          // coarse face -> Beltrami coefficient
  double delta = 1.0;
  int N = 1;

  int cell_count() const { return coarse.triangulation.face_count(); }
};

/// Cells meeting the window (positive-area overlap) are included whole.
/// Throws InvalidArgument if fewer than two cells qualify.
MesoscopicLattice build_mesoscopic(const Triangulation& t, const Embedding& e, double delta, int N,
                                   const Rect& window);
MesoscopicLattice build_mesoscopic(const Triangulation& t, const Embedding& e, double delta, int N,
                                   const ConvexPolygon& window);

}  // namespace mesoperc
