#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mesoperc {

enum class Topology { torus, disk };

using Face = std::array<int, 3>;

/// Raw face list plus topology tag, before any structural checks.
struct MeshConnectivity {
  Topology topology = Topology::disk;
  int vertex_count = 0;
  std::vector<Face> faces;
  std::optional<std::vector<int>> boundary;  // declared outer cycle, disk only
};

/// Every violated invariant, one human-readable entry each; empty means valid.
struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

ValidationReport validate_connectivity(const MeshConnectivity& m);

/// Immutable half-edge triangulation of a torus or a disk.
///
/// Half-edge h = 3*f + k runs from corner k to corner k+1 of face f, so next,
/// prev and face lookups are arithmetic. twin(h) is -1 on the outer boundary.
class Triangulation {
 public:
  Triangulation() = default;

  /// Throws InvalidTriangulation listing every violation.
  static Triangulation build(const MeshConnectivity& m);
  static Triangulation build(Topology topology, int vertex_count, std::vector<Face> faces);

  Topology topology() const { return topology_; }
  bool is_torus() const { return topology_ == Topology::torus; }
  int vertex_count() const { return vertex_count_; }
  int face_count() const { return static_cast<int>(faces_.size()); }
  int edge_count() const { return static_cast<int>(edge_vertices_.size()); }
  int halfedge_count() const { return 3 * face_count(); }

  const std::vector<Face>& faces() const { return faces_; }
  const Face& face(int f) const { return faces_[f]; }

  static int face_of(int h) { return h / 3; }
  static int next(int h) { return h % 3 == 2 ? h - 2 : h + 1; }
  static int prev(int h) { return h % 3 == 0 ? h + 2 : h - 1; }
  int origin(int h) const { return faces_[h / 3][h % 3]; }
  int target(int h) const { return origin(next(h)); }
  int twin(int h) const { return twin_[h]; }
  bool is_boundary_halfedge(int h) const { return twin_[h] < 0; }

  /// Undirected edge id of half-edge h; edges are numbered by first appearance.
  int edge_of(int h) const { return edge_of_[h]; }
  /// Endpoints (u, v) with u < v.
  std::array<int, 2> edge_vertices(int e) const { return edge_vertices_[e]; }
  /// A half-edge of edge e, the one with the smaller id.
  int edge_halfedge(int e) const { return edge_halfedge_[e]; }

  /// Outgoing half-edge of v; for boundary vertices the one whose face is first in
  /// counterclockwise order, i.e. whose twin is absent.
  int vertex_halfedge(int v) const { return vertex_halfedge_[v]; }
  /// Outgoing half-edges of v in counterclockwise order.
  std::vector<int> outgoing(int v) const;
  /// Neighbors of v in counterclockwise order (boundary vertices: starting on the boundary).
  std::span<const int> neighbors(int v) const {
    return {adjacency_.data() + adjacency_offset_[v],
            static_cast<std::size_t>(adjacency_offset_[v + 1] - adjacency_offset_[v])};
  }
  int degree(int v) const { return adjacency_offset_[v + 1] - adjacency_offset_[v]; }

  bool is_boundary_vertex(int v) const { return boundary_position_[v] >= 0; }
  /// Outer cycle in counterclockwise order, starting from the smallest vertex id.
  const std::vector<int>& boundary() const { return boundary_; }
  /// Index of v on the boundary cycle, or -1.
  int boundary_position(int v) const { return boundary_position_[v]; }
  /// Half-edge on the boundary running from boundary()[i] to boundary()[i+1].
  int boundary_halfedge(int i) const { return boundary_halfedges_[i]; }

  MeshConnectivity connectivity() const;

 private:
  Topology topology_ = Topology::disk;
  int vertex_count_ = 0;
  std::vector<Face> faces_;
  std::vector<int> twin_;
  std::vector<int> edge_of_;
  std::vector<std::array<int, 2>> edge_vertices_;
  std::vector<int> edge_halfedge_;
  std::vector<int> vertex_halfedge_;
  std::vector<int> adjacency_offset_;
  std::vector<int> adjacency_;
  std::vector<int> boundary_;
  std::vector<int> boundary_halfedges_;
  std::vector<int> boundary_position_;
};

/// Vertices of the closed boundary arc from `from` to `to`, counterclockwise.
std::vector<int> boundary_arc(const Triangulation& t, int from, int to);

/// A disk with four marks a, b, c, d in counterclockwise boundary order.
struct MarkedRectangleDomain {
  Triangulation triangulation;
  int a = -1, b = -1, c = -1, d = -1;
};

/// A disk with three marks a, b, c in counterclockwise boundary order.
struct MarkedTriangleDomain {
  Triangulation triangulation;
  int a = -1, b = -1, c = -1;
};

/// Throws InvalidArgument unless the marks are distinct boundary vertices in ccw order.
void check_marks(const Triangulation& t, std::span<const int> marks);

}  // namespace mesoperc
