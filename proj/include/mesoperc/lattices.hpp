#pragma once

#include <string>
#include <vector>

#include "mesoperc/embedding.hpp"

namespace mesoperc {

/// k x k square grid with NE diagonals on the unit torus (k >= 3).
EmbeddedMesh square_diagonal_torus(int k = 3);

/// k x k square grid plus square centers ("Union Jack"), invariant under
/// rotation by 90 degrees; unit periods.
EmbeddedMesh union_jack_torus(int k = 3);

/// Equilateral triangular lattice with periods (1, (rows/cols) e^{i pi/3}).
EmbeddedMesh equilateral_torus(int cols, int rows);

/// The complete graph K7 on the unit torus.
EmbeddedMesh k7_torus();

/// Asymmetric periodic Delaunay triangulation with 11 vertices per unit cell.
EmbeddedMesh fig1_torus();

/// Built-in families: regular, symmetric90, fig1, equilateral, k7.
EmbeddedMesh builtin_lattice(const std::string& name);
std::vector<std::string> builtin_lattice_names();

}  // namespace mesoperc
