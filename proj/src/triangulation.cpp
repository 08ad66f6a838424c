#include "mesoperc/triangulation.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "mesoperc/error.hpp"

namespace mesoperc {

namespace {

std::string edge_name(int u, int v) {
  std::ostringstream s;
  s << "(" << std::min(u, v) << "," << std::max(u, v) << ")";
  return s.str();
}

int next_he(int h) { return Triangulation::next(h); }
int prev_he(int h) { return Triangulation::prev(h); }

// Connectivity analysis shared by validation and construction.
struct Analysis {
  std::vector<int> twin;
  std::vector<int> vertex_halfedge;
  std::vector<int> boundary;
  std::vector<int> boundary_halfedges;
  int edge_count = 0;
};

ValidationReport analyze(const MeshConnectivity& m, Analysis& out) {
  ValidationReport report;
  auto& bad = report.violations;
  const int nv = m.vertex_count;
  const int nf = static_cast<int>(m.faces.size());
  if (nv <= 0) bad.push_back("triangulation has no vertices");
  if (nf == 0) bad.push_back("triangulation has no faces");
  if (!bad.empty()) return report;

  for (int f = 0; f < nf; ++f) {
    const Face& fc = m.faces[f];
    bool in_range = true;
    for (int v : fc) {
      if (v < 0 || v >= nv) in_range = false;
    }
    if (!in_range) {
      bad.push_back("face " + std::to_string(f) + " references a vertex outside 0.." +
                    std::to_string(nv - 1));
    } else if (fc[0] == fc[1] || fc[1] == fc[2] || fc[0] == fc[2]) {
      bad.push_back("face " + std::to_string(f) + " repeats a vertex (self-loop)");
    }
  }
  if (!bad.empty()) return report;

  const int nh = 3 * nf;
  auto origin = [&](int h) { return m.faces[h / 3][h % 3]; };
  auto target = [&](int h) { return origin(next_he(h)); };

  // Bucket half-edges by origin.
  std::vector<int> offset(nv + 1, 0);
  for (int h = 0; h < nh; ++h) ++offset[origin(h) + 1];
  std::partial_sum(offset.begin(), offset.end(), offset.begin());
  std::vector<int> by_origin(nh);
  {
    std::vector<int> fill(offset.begin(), offset.end() - 1);
    for (int h = 0; h < nh; ++h) by_origin[fill[origin(h)]++] = h;
  }

  for (int v = 0; v < nv; ++v) {
    if (offset[v] == offset[v + 1]) bad.push_back("isolated vertex " + std::to_string(v));
  }

  std::vector<int>& twin = out.twin;
  twin.assign(nh, -1);
  bool edges_ok = true;
  for (int h = 0; h < nh; ++h) {
    const int u = origin(h), v = target(h);
    int same = 0, opposite = 0, opp_he = -1;
    for (int k = offset[u]; k < offset[u + 1]; ++k) {
      if (target(by_origin[k]) == v) ++same;
    }
    for (int k = offset[v]; k < offset[v + 1]; ++k) {
      if (target(by_origin[k]) == u) {
        ++opposite;
        opp_he = by_origin[k];
      }
    }
    if (same > 1 && same + opposite <= 2) {
      bad.push_back("edge " + edge_name(u, v) + " appears twice with the same direction (inconsistent orientation)");
      edges_ok = false;
    }
    if (same + opposite > 2) {
      if (u < v) bad.push_back("edge " + edge_name(u, v) + " is shared by more than two faces (multi-edge or non-manifold)");
      edges_ok = false;
    } else if (same == 1 && opposite == 1) {
      twin[h] = opp_he;
    } else if (same == 1 && opposite == 0 && m.topology == Topology::torus) {
      bad.push_back("edge " + edge_name(u, v) + " has a single incident face on a closed surface");
      edges_ok = false;
    }
  }
  if (!edges_ok) {
    std::sort(bad.begin(), bad.end());
    bad.erase(std::unique(bad.begin(), bad.end()), bad.end());
    return report;
  }

  // Vertex links must be a single fan (disk boundary) or a single cycle.
  out.vertex_halfedge.assign(nv, -1);
  for (int v = 0; v < nv; ++v) {
    int start = -1, boundary_out = 0, boundary_in = 0;
    for (int k = offset[v]; k < offset[v + 1]; ++k) {
      const int h = by_origin[k];
      if (twin[h] < 0) {
        ++boundary_out;
        start = h;
      }
      if (twin[prev_he(h)] < 0) ++boundary_in;
    }
    const int deg_out = offset[v + 1] - offset[v];
    if (deg_out == 0) continue;
    if (boundary_out > 1 || boundary_in > 1 || boundary_out != boundary_in) {
      bad.push_back("vertex " + std::to_string(v) + " is a pinch point (non-manifold vertex)");
      continue;
    }
    if (start < 0) start = by_origin[offset[v]];
    int visited = 0;
    int h = start;
    while (true) {
      ++visited;
      const int p = twin[prev_he(h)];
      if (p < 0 || p == start || visited > deg_out) break;
      h = p;
    }
    if (visited != deg_out) {
      bad.push_back("vertex " + std::to_string(v) + " has a disconnected link (non-manifold vertex)");
      continue;
    }
    out.vertex_halfedge[v] = start;
  }
  if (!bad.empty()) return report;

  int edges = 0;
  for (int h = 0; h < nh; ++h) {
    if (twin[h] < 0 || h < twin[h]) ++edges;
  }
  out.edge_count = edges;

  // Connected components over faces.
  std::vector<int> parent(nv);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const Face& fc : m.faces) {
    parent[find(fc[0])] = find(fc[1]);
    parent[find(fc[1])] = find(fc[2]);
  }
  int components = 0;
  for (int v = 0; v < nv; ++v) components += find(v) == v;
  if (components != 1) bad.push_back("triangulation has " + std::to_string(components) + " connected components");

  if (m.topology == Topology::disk) {
    std::vector<int> outgoing_boundary(nv, -1);
    int nb = 0;
    for (int h = 0; h < nh; ++h) {
      if (twin[h] < 0) {
        outgoing_boundary[origin(h)] = h;
        ++nb;
      }
    }
    if (nb == 0) {
      bad.push_back("disk triangulation has no boundary");
    } else {
      int first = -1;
      for (int v = 0; v < nv && first < 0; ++v) {
        if (outgoing_boundary[v] >= 0) first = v;
      }
      int v = first, steps = 0;
      do {
        const int h = outgoing_boundary[v];
        out.boundary.push_back(v);
        out.boundary_halfedges.push_back(h);
        v = target(h);
        ++steps;
      } while (v != first && steps <= nb);
      if (steps != nb) {
        bad.push_back("boundary splits into several cycles (domain has holes)");
      }
      if (steps < 4) bad.push_back("outer face < 4 vertices");
    }
    if (m.boundary) {
      const auto& declared = *m.boundary;
      bool same = declared.size() == out.boundary.size();
      if (same && !declared.empty()) {
        auto it = std::find(declared.begin(), declared.end(), out.boundary[0]);
        if (it == declared.end()) {
          same = false;
        } else {
          const std::size_t shift = static_cast<std::size_t>(it - declared.begin());
          for (std::size_t i = 0; i < declared.size() && same; ++i) {
            same = declared[(i + shift) % declared.size()] == out.boundary[i];
          }
        }
      }
      if (!same) bad.push_back("declared boundary does not match the counterclockwise outer cycle");
    }
  } else if (m.boundary && !m.boundary->empty()) {
    bad.push_back("torus triangulation declares a boundary");
  }

  const long chi = static_cast<long>(nv) - edges + nf + (m.topology == Topology::disk ? 1 : 0);
  const long expected = m.topology == Topology::torus ? 0 : 2;
  if (chi != expected) {
    bad.push_back("Euler characteristic " + std::to_string(chi) + " does not match topology (expected " +
                  std::to_string(expected) + ")");
  }
  return report;
}

}  // namespace

ValidationReport validate_connectivity(const MeshConnectivity& m) {
  Analysis a;
  return analyze(m, a);
}

Triangulation Triangulation::build(Topology topology, int vertex_count, std::vector<Face> faces) {
  MeshConnectivity m;
  m.topology = topology;
  m.vertex_count = vertex_count;
  m.faces = std::move(faces);
  return build(m);
}

Triangulation Triangulation::build(const MeshConnectivity& m) {
  Analysis a;
  ValidationReport report = analyze(m, a);
  if (!report.ok()) {
    std::string msg = "invalid triangulation:";
    for (const auto& v : report.violations) msg += "\n  " + v;
    throw InvalidTriangulation(msg);
  }
  Triangulation t;
  t.topology_ = m.topology;
  t.vertex_count_ = m.vertex_count;
  t.faces_ = m.faces;
  t.twin_ = std::move(a.twin);
  t.vertex_halfedge_ = std::move(a.vertex_halfedge);
  t.boundary_ = std::move(a.boundary);
  t.boundary_halfedges_ = std::move(a.boundary_halfedges);

  const int nh = t.halfedge_count();
  t.edge_of_.assign(nh, -1);
  t.edge_vertices_.reserve(a.edge_count);
  t.edge_halfedge_.reserve(a.edge_count);
  for (int h = 0; h < nh; ++h) {
    const int tw = t.twin_[h];
    if (tw >= 0 && tw < h) {
      t.edge_of_[h] = t.edge_of_[tw];
      continue;
    }
    const int u = t.origin(h), v = t.target(h);
    t.edge_of_[h] = static_cast<int>(t.edge_vertices_.size());
    t.edge_vertices_.push_back({std::min(u, v), std::max(u, v)});
    t.edge_halfedge_.push_back(h);
  }

  t.boundary_position_.assign(t.vertex_count_, -1);
  for (std::size_t i = 0; i < t.boundary_.size(); ++i) t.boundary_position_[t.boundary_[i]] = static_cast<int>(i);

  t.adjacency_offset_.assign(t.vertex_count_ + 1, 0);
  t.adjacency_.reserve(2 * t.edge_vertices_.size());
  for (int v = 0; v < t.vertex_count_; ++v) {
    t.adjacency_offset_[v] = static_cast<int>(t.adjacency_.size());
    const int start = t.vertex_halfedge_[v];
    int h = start;
    while (true) {
      t.adjacency_.push_back(t.target(h));
      const int p = t.twin_[prev(h)];
      if (p < 0) {
        t.adjacency_.push_back(t.origin(prev(h)));
        break;
      }
      if (p == start) break;
      h = p;
    }
  }
  t.adjacency_offset_[t.vertex_count_] = static_cast<int>(t.adjacency_.size());
  return t;
}

std::vector<int> Triangulation::outgoing(int v) const {
  std::vector<int> out;
  const int start = vertex_halfedge_[v];
  int h = start;
  do {
    out.push_back(h);
    h = twin_[prev(h)];
  } while (h >= 0 && h != start);
  return out;
}

MeshConnectivity Triangulation::connectivity() const {
  MeshConnectivity m;
  m.topology = topology_;
  m.vertex_count = vertex_count_;
  m.faces = faces_;
  if (topology_ == Topology::disk) m.boundary = boundary_;
  return m;
}

std::vector<int> boundary_arc(const Triangulation& t, int from, int to) {
  const int n = static_cast<int>(t.boundary().size());
  const int i = t.boundary_position(from), j = t.boundary_position(to);
  if (i < 0 || j < 0) throw InvalidArgument("boundary_arc: endpoint is not a boundary vertex");
  std::vector<int> arc;
  for (int k = i;; k = (k + 1) % n) {
    arc.push_back(t.boundary()[k]);
    if (k == j) break;
  }
  return arc;
}

void check_marks(const Triangulation& t, std::span<const int> marks) {
  if (t.topology() != Topology::disk) throw InvalidArgument("marked domain must have disk topology");
  const int n = static_cast<int>(t.boundary().size());
  std::vector<int> pos;
  for (int m : marks) {
    if (m < 0 || m >= t.vertex_count() || !t.is_boundary_vertex(m)) {
      throw InvalidArgument("mark " + std::to_string(m) + " is not a boundary vertex");
    }
    pos.push_back(t.boundary_position(m));
  }
  // Counterclockwise order: positions increase cyclically with one total wrap.
  int wraps = 0;
  for (std::size_t k = 0; k < pos.size(); ++k) {
    const int a = pos[k], b = pos[(k + 1) % pos.size()];
    if (a == b) throw InvalidArgument("marks must be distinct");
    wraps += ((b - a) % n + n) % n;
  }
  if (wraps != n) throw InvalidArgument("marks are not in counterclockwise boundary order");
}

}  // namespace mesoperc
