#include "mesoperc/domains.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>

#include "mesoperc/error.hpp"
#include "mesoperc/mesh_io.hpp"

namespace mesoperc {

ConvexPolygon to_polygon(const Rect& r) {
  return {Point{r.x0, r.y0}, Point{r.x1, r.y0}, Point{r.x1, r.y1}, Point{r.x0, r.y1}};
}

ConvexPolygon rotated_rectangle(Point center, double width, double height, double angle) {
  const Point rot = std::polar(1.0, angle);
  const double hw = width / 2, hh = height / 2;
  return {center + rot * Point{-hw, -hh}, center + rot * Point{hw, -hh}, center + rot * Point{hw, hh},
          center + rot * Point{-hw, hh}};
}

double overlap_area(const std::array<Point, 3>& tri, const ConvexPolygon& poly) {
  std::vector<Point> cur(tri.begin(), tri.end());
  const std::size_t n = poly.size();
  for (std::size_t k = 0; k < n && !cur.empty(); ++k) {
    const Point p = poly[k], q = poly[(k + 1) % n];
    auto side = [&](Point z) { return cross(q - p, z - p); };
    std::vector<Point> next;
    for (std::size_t i = 0; i < cur.size(); ++i) {
      const Point s = cur[i], e = cur[(i + 1) % cur.size()];
      const double ds = side(s), de = side(e);
      if (ds >= 0) next.push_back(s);
      if ((ds >= 0) != (de >= 0)) next.push_back(s + (e - s) * (ds / (ds - de)));
    }
    cur = std::move(next);
  }
  double area = 0;
  for (std::size_t i = 0; i < cur.size(); ++i) area += cross(cur[i], cur[(i + 1) % cur.size()]);
  return 0.5 * area;
}

namespace {

struct Dsu {
  std::vector<int> p;
  explicit Dsu(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
  int find(int x) {
    while (p[x] != x) x = p[x] = p[p[x]];
    return x;
  }
  void unite(int a, int b) { p[find(a)] = find(b); }
};

// One pruning pass; returns true if anything was removed.
bool prune(const std::vector<Face>& faces, std::vector<char>& alive, int nv) {
  const int nf = static_cast<int>(faces.size());
  // Keep the largest edge-connected component.
  std::map<std::pair<int, int>, std::vector<int>> by_edge;
  for (int f = 0; f < nf; ++f) {
    if (!alive[f]) continue;
    for (int k = 0; k < 3; ++k) {
      const int u = faces[f][k], v = faces[f][(k + 1) % 3];
      by_edge[{std::min(u, v), std::max(u, v)}].push_back(f);
    }
  }
  Dsu comp(nf);
  for (const auto& [edge, fs] : by_edge) {
    for (std::size_t i = 1; i < fs.size(); ++i) comp.unite(fs[0], fs[i]);
  }
  std::vector<int> size(nf, 0);
  for (int f = 0; f < nf; ++f) {
    if (alive[f]) ++size[comp.find(f)];
  }
  const int best = static_cast<int>(std::max_element(size.begin(), size.end()) - size.begin());
  bool changed = false;
  for (int f = 0; f < nf; ++f) {
    if (alive[f] && comp.find(f) != best) {
      alive[f] = 0;
      changed = true;
    }
  }
  if (changed) return true;

  // Pinch vertices: keep the largest fan.
  std::vector<std::vector<int>> incident(nv);
  for (int f = 0; f < nf; ++f) {
    if (alive[f]) {
      for (int v : faces[f]) incident[v].push_back(f);
    }
  }
  for (int v = 0; v < nv; ++v) {
    const auto& fs = incident[v];
    if (fs.size() < 2) continue;
    std::map<int, std::vector<int>> by_other;
    for (std::size_t i = 0; i < fs.size(); ++i) {
      for (int w : faces[fs[i]]) {
        if (w != v) by_other[w].push_back(static_cast<int>(i));
      }
    }
    Dsu fan(static_cast<int>(fs.size()));
    for (const auto& [w, idx] : by_other) {
      for (std::size_t i = 1; i < idx.size(); ++i) fan.unite(idx[0], idx[i]);
    }
    std::vector<int> fan_size(fs.size(), 0);
    for (std::size_t i = 0; i < fs.size(); ++i) ++fan_size[fan.find(static_cast<int>(i))];
    const int keep = static_cast<int>(std::max_element(fan_size.begin(), fan_size.end()) - fan_size.begin());
    for (std::size_t i = 0; i < fs.size(); ++i) {
      if (fan.find(static_cast<int>(i)) != keep) {
        alive[fs[i]] = 0;
        changed = true;
      }
    }
    if (changed) return true;
  }
  return false;
}

}  // namespace

ExtractedDisk extract_disk(const std::vector<Face>& faces, const std::vector<Point>& positions) {
  const int nv = static_cast<int>(positions.size());
  if (faces.empty()) throw InvalidArgument("domain contains no faces");
  std::vector<char> alive(faces.size(), 1);
  while (prune(faces, alive, nv)) {
  }
  ExtractedDisk out;
  std::vector<int> new_id(nv, -1);
  for (std::size_t f = 0; f < faces.size(); ++f) {
    if (alive[f]) {
      for (int v : faces[f]) new_id[v] = 0;
    }
  }
  MeshData m;
  for (int v = 0; v < nv; ++v) {
    if (new_id[v] == 0) {
      new_id[v] = static_cast<int>(out.vertex_origin.size());
      out.vertex_origin.push_back(v);
      m.positions.push_back(positions[v]);
    }
  }
  for (std::size_t f = 0; f < faces.size(); ++f) {
    if (!alive[f]) continue;
    out.face_origin.push_back(static_cast<int>(f));
    m.connectivity.faces.push_back({new_id[faces[f][0]], new_id[faces[f][1]], new_id[faces[f][2]]});
  }
  m.connectivity.topology = Topology::disk;
  m.connectivity.vertex_count = static_cast<int>(m.positions.size());
  const ValidationReport r = validate(m);
  if (!r.ok()) {
    std::string msg = "selected faces do not form a disk:";
    for (const auto& v : r.violations) msg += "\n  " + v;
    throw InvalidArgument(msg);
  }
  out.mesh = build_embedded(m);
  return out;
}

int nearest_boundary_vertex(const Triangulation& t, const Embedding& e, Point target, int id_limit) {
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (int v : t.boundary()) {
    if (id_limit >= 0 && v >= id_limit) continue;
    const double d = std::abs(e.positions[v] - target);
    if (d < best_d) {
      best_d = d;
      best = v;
    }
  }
  if (best < 0) throw InvalidArgument("no boundary vertex available for a mark");
  return best;
}

QuadDomain mark_quad(EmbeddedMesh mesh, const std::array<Point, 4>& targets, int id_limit) {
  QuadDomain q;
  std::array<int, 4> m{};
  for (int k = 0; k < 4; ++k) m[k] = nearest_boundary_vertex(mesh.triangulation, mesh.embedding, targets[k], id_limit);
  check_marks(mesh.triangulation, m);
  q.marked.triangulation = std::move(mesh.triangulation);
  q.marked.a = m[0];
  q.marked.b = m[1];
  q.marked.c = m[2];
  q.marked.d = m[3];
  q.embedding = std::move(mesh.embedding);
  return q;
}

TriangleDomain mark_triangle(EmbeddedMesh mesh, const std::array<Point, 3>& targets, int id_limit) {
  TriangleDomain d;
  std::array<int, 3> m{};
  for (int k = 0; k < 3; ++k) m[k] = nearest_boundary_vertex(mesh.triangulation, mesh.embedding, targets[k], id_limit);
  check_marks(mesh.triangulation, m);
  d.marked.triangulation = std::move(mesh.triangulation);
  d.marked.a = m[0];
  d.marked.b = m[1];
  d.marked.c = m[2];
  d.embedding = std::move(mesh.embedding);
  return d;
}

namespace {

EmbeddedMesh lattice_patch(int L, bool triangle) {
  if (L < 2) throw InvalidArgument("lattice patch needs side at least 2");
  const Point w = std::polar(1.0, kPi / 3.0);
  MeshData m;
  m.connectivity.topology = Topology::disk;
  std::vector<int> id((L + 1) * (L + 1), -1);
  for (int j = 0; j <= L; ++j) {
    for (int i = 0; i <= L; ++i) {
      if (triangle && i + j > L) continue;
      id[i + (L + 1) * j] = static_cast<int>(m.positions.size());
      m.positions.push_back((static_cast<double>(i) + static_cast<double>(j) * w) / static_cast<double>(L));
    }
  }
  auto at = [&](int i, int j) { return id[i + (L + 1) * j]; };
  for (int j = 0; j < L; ++j) {
    for (int i = 0; i < L; ++i) {
      if (!triangle || i + j + 1 <= L) m.connectivity.faces.push_back({at(i, j), at(i + 1, j), at(i, j + 1)});
      if (!triangle || i + j + 2 <= L) m.connectivity.faces.push_back({at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)});
    }
  }
  m.connectivity.vertex_count = static_cast<int>(m.positions.size());
  return build_embedded(m);
}

}  // namespace

QuadDomain triangular_rectangle(int rows, int cols) {
  if (rows < 1 || cols < 1) throw InvalidArgument("triangular_rectangle: rows and cols must be positive");
  const double s = 2.0 / (std::sqrt(3.0) * rows);
  MeshData m;
  m.connectivity.topology = Topology::disk;
  auto at = [cols](int i, int j) { return i + (cols + 1) * j; };
  for (int j = 0; j <= rows; ++j) {
    for (int i = 0; i <= cols; ++i) {
      m.positions.push_back({(i + 0.5 * (j % 2)) * s, j * s * std::sqrt(3.0) / 2.0});
    }
  }
  for (int j = 0; j < rows; ++j) {
    for (int i = 0; i < cols; ++i) {
      if (j % 2 == 0) {
        m.connectivity.faces.push_back({at(i, j), at(i + 1, j), at(i, j + 1)});
        m.connectivity.faces.push_back({at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)});
      } else {
        m.connectivity.faces.push_back({at(i, j), at(i + 1, j + 1), at(i, j + 1)});
        m.connectivity.faces.push_back({at(i, j), at(i + 1, j), at(i + 1, j + 1)});
      }
    }
  }
  m.connectivity.vertex_count = static_cast<int>(m.positions.size());
  const std::array<Point, 4> corners{m.positions[at(cols, 0)], m.positions[at(cols, rows)], m.positions[at(0, rows)],
                                     m.positions[at(0, 0)]};
  return mark_quad(build_embedded(m), corners);
}

QuadDomain triangular_rhombus(int L) {
  const Point w = std::polar(1.0, kPi / 3.0);
  return mark_quad(lattice_patch(L, false), {Point{0, 0}, Point{1, 0}, 1.0 + w, w});
}

TriangleDomain triangular_triangle(int L) {
  const Point w = std::polar(1.0, kPi / 3.0);
  return mark_triangle(lattice_patch(L, true), {Point{0, 0}, Point{1, 0}, w});
}

}  // namespace mesoperc
