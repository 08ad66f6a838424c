#include "mesoperc/lattices.hpp"

#include <sstream>

#include "mesoperc/error.hpp"
#include "mesoperc/mesh_io.hpp"

namespace mesoperc {

namespace {

const char* const kFig1Mesh =
#include "fig1_data.inc"
    ;

EmbeddedMesh periodic_grid(int cols, int rows, Periods periods, bool centers, bool nw_diagonal) {
  if (cols < 3 || rows < 3) throw InvalidArgument("periodic grid needs at least 3 x 3 vertices");
  MeshData m;
  m.periods = periods;
  m.connectivity.topology = Topology::torus;
  auto id = [&](int i, int j) { return ((i % cols + cols) % cols) + cols * ((j % rows + rows) % rows); };
  for (int j = 0; j < rows; ++j) {
    for (int i = 0; i < cols; ++i) {
      m.positions.push_back(periods[0] * (static_cast<double>(i) / cols) + periods[1] * (static_cast<double>(j) / rows));
    }
  }
  for (int j = 0; j < rows; ++j) {
    for (int i = 0; i < cols; ++i) {
      const int v00 = id(i, j), v10 = id(i + 1, j), v11 = id(i + 1, j + 1), v01 = id(i, j + 1);
      if (centers) {
        const int c = static_cast<int>(m.positions.size());
        m.positions.push_back(periods[0] * ((i + 0.5) / cols) + periods[1] * ((j + 0.5) / rows));
        m.connectivity.faces.push_back({v00, v10, c});
        m.connectivity.faces.push_back({v10, v11, c});
        m.connectivity.faces.push_back({v11, v01, c});
        m.connectivity.faces.push_back({v01, v00, c});
      } else if (nw_diagonal) {
        m.connectivity.faces.push_back({v00, v10, v01});
        m.connectivity.faces.push_back({v10, v11, v01});
      } else {
        m.connectivity.faces.push_back({v00, v10, v11});
        m.connectivity.faces.push_back({v00, v11, v01});
      }
    }
  }
  m.connectivity.vertex_count = static_cast<int>(m.positions.size());
  return build_embedded(m);
}

}  // namespace

EmbeddedMesh square_diagonal_torus(int k) { return periodic_grid(k, k, {Point{1, 0}, Point{0, 1}}, false, false); }

EmbeddedMesh union_jack_torus(int k) { return periodic_grid(k, k, {Point{1, 0}, Point{0, 1}}, true, false); }

EmbeddedMesh equilateral_torus(int cols, int rows) {
  const Point w = std::polar(1.0, kPi / 3.0);
  return periodic_grid(cols, rows, {Point{1, 0}, w * (static_cast<double>(rows) / cols)}, false, true);
}

EmbeddedMesh k7_torus() {
  MeshData m;
  m.periods = Periods{Point{1, 0}, Point{0, 1}};
  m.connectivity.topology = Topology::torus;
  m.connectivity.vertex_count = 7;
  for (int k = 0; k < 7; ++k) m.positions.push_back(reduce_to_fundamental(*m.periods, Point{k / 7.0, 3.0 * k / 7.0}));
  auto oriented = [&](Face f) {
    auto near = [&](int v) {
      Point d = m.positions[v] - m.positions[f[0]];
      return Point{d.real() - std::round(d.real()), d.imag() - std::round(d.imag())};
    };
    if (cross(near(f[1]), near(f[2])) < 0) std::swap(f[1], f[2]);
    return f;
  };
  for (int i = 0; i < 7; ++i) {
    m.connectivity.faces.push_back(oriented({i, (i + 1) % 7, (i + 3) % 7}));
    m.connectivity.faces.push_back(oriented({i, (i + 2) % 7, (i + 3) % 7}));
  }
  return build_embedded(m);
}

EmbeddedMesh fig1_torus() {
  std::istringstream in(kFig1Mesh);
  return build_embedded(read_mesh_text(in));
}

EmbeddedMesh builtin_lattice(const std::string& name) {
  if (name == "regular") return square_diagonal_torus(3);
  if (name == "symmetric90") return union_jack_torus(3);
  if (name == "fig1") return fig1_torus();
  if (name == "equilateral") return equilateral_torus(3, 3);
  if (name == "k7") return k7_torus();
  throw InvalidArgument("unknown built-in lattice `" + name + "`");
}

std::vector<std::string> builtin_lattice_names() { return {"regular", "symmetric90", "fig1", "equilateral", "k7"}; }

}  // namespace mesoperc
