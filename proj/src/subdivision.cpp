#include "mesoperc/subdivision.hpp"

#include <cmath>

#include "mesoperc/error.hpp"

namespace mesoperc {

namespace {

// Barycentric recipe (face, i, j) over n: point A + i/n (B - A) + j/n (C - A).
struct Recipe {
  int face;
  int i;
  int j;
};

struct RefinedConnectivity {
  MeshConnectivity mesh;
  std::vector<Recipe> recipe;  // for vertices >= V
  std::vector<std::array<Recipe, 3>> corner_recipe;  // per child face, per corner
};

RefinedConnectivity refine_connectivity(const Triangulation& t, int n) {
  if (n <= 0) throw InvalidArgument("refine: n_side must be positive");
  const int nv = t.vertex_count();
  const int ne = t.edge_count();
  const int nf = t.face_count();
  const int per_edge = n - 1;
  const int per_face = (n - 1) * (n - 2) / 2;
  const int edge_base = nv;
  const int face_base = nv + ne * per_edge;

  RefinedConnectivity out;
  out.mesh.topology = t.topology();
  out.mesh.vertex_count = face_base + nf * per_face;
  out.mesh.faces.reserve(static_cast<std::size_t>(nf) * n * n);
  out.corner_recipe.reserve(static_cast<std::size_t>(nf) * n * n);
  out.recipe.assign(out.mesh.vertex_count - nv, Recipe{-1, 0, 0});

  std::vector<int> local((n + 1) * (n + 1));
  auto at = [&](int i, int j) -> int& { return local[i * (n + 1) + j]; };

  for (int f = 0; f < nf; ++f) {
    const Face& fc = t.face(f);
    at(0, 0) = fc[0];
    at(n, 0) = fc[1];
    at(0, n) = fc[2];
    // Edge k of the face runs from corner k to corner k+1; parameter s in (0, n).
    auto edge_point = [&](int k, int s) {
      const int h = 3 * f + k;
      const int e = t.edge_of(h);
      const bool forward = t.origin(h) < t.target(h);
      const int step = forward ? s : n - s;
      return edge_base + e * per_edge + (step - 1);
    };
    for (int s = 1; s < n; ++s) {
      at(s, 0) = edge_point(0, s);
      at(n - s, s) = edge_point(1, s);
      at(0, n - s) = edge_point(2, s);
    }
    int next_interior = face_base + f * per_face;
    for (int i = 1; i < n; ++i) {
      for (int j = 1; i + j < n; ++j) at(i, j) = next_interior++;
    }
    // Recipes for vertices first generated here.
    for (int i = 0; i <= n; ++i) {
      for (int j = 0; i + j <= n; ++j) {
        const int v = at(i, j);
        if (v >= nv && out.recipe[v - nv].face < 0) out.recipe[v - nv] = Recipe{f, i, j};
      }
    }
    for (int i = 0; i < n; ++i) {
      for (int j = 0; i + j < n; ++j) {
        out.mesh.faces.push_back({at(i, j), at(i + 1, j), at(i, j + 1)});
        out.corner_recipe.push_back({Recipe{f, i, j}, Recipe{f, i + 1, j}, Recipe{f, i, j + 1}});
      }
    }
    for (int i = 0; i + 1 < n; ++i) {
      for (int j = 0; i + j + 1 < n; ++j) {
        out.mesh.faces.push_back({at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)});
        out.corner_recipe.push_back({Recipe{f, i + 1, j}, Recipe{f, i + 1, j + 1}, Recipe{f, i, j + 1}});
      }
    }
  }
  return out;
}

Point evaluate(const Triangulation& t, const Embedding& e, const Recipe& r, int n) {
  const auto c = e.face_corners(t, r.face);
  return c[0] + (static_cast<double>(r.i) / n) * (c[1] - c[0]) + (static_cast<double>(r.j) / n) * (c[2] - c[0]);
}

Lift lift_between(const Periods& p, Point lifted, Point base) {
  const auto st = period_coordinates(p, lifted - base);
  return Lift{static_cast<int>(std::lround(st[0])), static_cast<int>(std::lround(st[1]))};
}

EmbeddedMesh embed_refined(const Triangulation& t, const Embedding& e, const RefinedConnectivity& rc, int n) {
  EmbeddedMesh out;
  out.triangulation = Triangulation::build(rc.mesh);
  const int nv = t.vertex_count();
  Embedding& emb = out.embedding;
  emb.periods = e.periods;
  emb.positions.resize(rc.mesh.vertex_count);
  for (int v = 0; v < nv; ++v) emb.positions[v] = e.positions[v];
  for (int v = nv; v < rc.mesh.vertex_count; ++v) {
    const Point p = evaluate(t, e, rc.recipe[v - nv], n);
    emb.positions[v] = e.periods ? reduce_to_fundamental(*e.periods, p) : p;
  }
  if (e.periods) {
    const int nf = out.triangulation.face_count();
    emb.lifts.resize(nf);
    for (int f = 0; f < nf; ++f) {
      for (int k = 0; k < 3; ++k) {
        const Point lifted = evaluate(t, e, rc.corner_recipe[f][k], n);
        emb.lifts[f][k] = lift_between(*e.periods, lifted, emb.positions[rc.mesh.faces[f][k]]);
      }
    }
  }
  return out;
}

}  // namespace

Subdivided subdivide(const Triangulation& t) {
  const int nv = t.vertex_count();
  MeshConnectivity m;
  m.topology = t.topology();
  m.vertex_count = nv + t.edge_count();
  m.faces.reserve(4 * static_cast<std::size_t>(t.face_count()));
  for (int f = 0; f < t.face_count(); ++f) {
    const Face& fc = t.face(f);
    const int mab = nv + t.edge_of(3 * f);
    const int mbc = nv + t.edge_of(3 * f + 1);
    const int mca = nv + t.edge_of(3 * f + 2);
    m.faces.push_back({fc[0], mab, mca});
    m.faces.push_back({mab, fc[1], mbc});
    m.faces.push_back({mca, mbc, fc[2]});
    m.faces.push_back({mab, mbc, mca});
  }
  Subdivided out;
  out.triangulation = Triangulation::build(m);
  out.parents.resize(m.vertex_count);
  for (int v = 0; v < nv; ++v) out.parents[v] = {v, v};
  for (int e = 0; e < t.edge_count(); ++e) out.parents[nv + e] = t.edge_vertices(e);
  return out;
}

EmbeddedMesh subdivide(const Triangulation& t, const Embedding& e) {
  Subdivided s = subdivide(t);
  EmbeddedMesh out;
  out.triangulation = std::move(s.triangulation);
  const int nv = t.vertex_count();
  Embedding& emb = out.embedding;
  emb.periods = e.periods;
  emb.positions.resize(out.triangulation.vertex_count());
  for (int v = 0; v < nv; ++v) emb.positions[v] = e.positions[v];
  // Lifted corners of each child, from the parent's lifted corners.
  std::vector<std::array<Point, 3>> child(4 * static_cast<std::size_t>(t.face_count()));
  for (int f = 0; f < t.face_count(); ++f) {
    const auto c = e.face_corners(t, f);
    const Point mab = 0.5 * (c[0] + c[1]), mbc = 0.5 * (c[1] + c[2]), mca = 0.5 * (c[2] + c[0]);
    child[4 * f] = {c[0], mab, mca};
    child[4 * f + 1] = {mab, c[1], mbc};
    child[4 * f + 2] = {mca, mbc, c[2]};
    child[4 * f + 3] = {mab, mbc, mca};
  }
  for (int e2 = 0; e2 < t.edge_count(); ++e2) {
    const int h = t.edge_halfedge(e2);
    const int f = Triangulation::face_of(h);
    const Point p = 0.5 * (e.corner(t, f, h % 3) + e.corner(t, f, Triangulation::next(h) % 3));
    emb.positions[nv + e2] = e.periods ? reduce_to_fundamental(*e.periods, p) : p;
  }
  if (e.periods) {
    emb.lifts.resize(child.size());
    for (std::size_t f = 0; f < child.size(); ++f) {
      for (int k = 0; k < 3; ++k) {
        emb.lifts[f][k] = lift_between(*e.periods, child[f][k], emb.positions[out.triangulation.face(static_cast<int>(f))[k]]);
      }
    }
  }
  return out;
}

Triangulation subdivide_times(const Triangulation& t, int n) {
  if (n < 0) throw InvalidArgument("subdivision level must be non-negative");
  Triangulation cur = t;
  for (int k = 0; k < n; ++k) cur = subdivide(cur).triangulation;
  return cur;
}

EmbeddedMesh refine(const Triangulation& t, const Embedding& e, int n_side) {
  const RefinedConnectivity rc = refine_connectivity(t, n_side);
  return embed_refined(t, e, rc, n_side);
}

Triangulation refine(const Triangulation& t, int n_side) {
  return Triangulation::build(refine_connectivity(t, n_side).mesh);
}

}  // namespace mesoperc
