#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mesoperc/embedding.hpp"
#include "mesoperc/geometry.hpp"
#include "mesoperc/triangulation.hpp"

namespace mesoperc {

// ---- samples ---------------------------------------------------------------

struct PercolationSample {
  const Triangulation* lattice = nullptr;
  std::vector<std::uint8_t> black;  // 1 = black (open)
  std::uint64_t seed = 0;
  std::uint64_t trial = 0;
  double p = 0.5;
};

/// Vertex v is black iff its Philox word (seed, trial, v) is below floor(p 2^32).
PercolationSample sample(const Triangulation& t, double p, std::uint64_t seed, std::uint64_t trial);

/// Run-length encoding of a coloring, e.g. "3b2w1b".
std::string to_rle(const std::vector<std::uint8_t>& black);
std::vector<std::uint8_t> from_rle(const std::string& rle);

// ---- crossings -------------------------------------------------------------

struct RectangleOrientation {
  Point center;
  double width = 0, height = 0, angle = 0;
};

struct CrossingSpec {
  std::vector<int> arc1;
  std::vector<int> arc2;
  std::optional<RectangleOrientation> orientation;
};

/// Arcs ab and cd of a marked quadrilateral.
CrossingSpec crossing_spec(const MarkedRectangleDomain& d);

/// Union-find test for a path of `open` vertices from arc1 to arc2.
bool connects(const Triangulation& t, const std::vector<std::uint8_t>& open, const CrossingSpec& spec);
bool crosses(const PercolationSample& s, const CrossingSpec& spec);

/// Crossing test by the exploration path between the black arcs ab, cd and
/// the white arcs bc, da. Only vertices next to the interface are coloured,
/// each on demand from its Philox word.
class ExplorationCrossing {
 public:
  ExplorationCrossing(const Triangulation& t, const CrossingSpec& spec);
  bool crosses(std::uint64_t seed, std::uint64_t trial, std::uint64_t threshold) const;
  /// Same walk on an explicit colouring.
  bool crosses(const std::vector<std::uint8_t>& black) const;
  int vertex_count() const { return nv_; }

 private:
  template <class Color>
  bool walk(const Color& color) const;

  int nv_ = 0;
  std::vector<std::array<int, 3>> faces_;  // real faces, outer triangles, corner triangles
  std::vector<int> twin_;
  int start_ = -1;
};

enum class Engine { parallel, serial };

struct CrossingEstimate {
  std::int64_t trials = 0;
  std::int64_t successes = 0;
  double estimate = 0;
  double half_width = 0;  // 1.96 sqrt(p(1-p)/trials)
  std::uint64_t seed = 0;
  double p = 0.5;
};

double half_width(double p_hat, std::int64_t trials);

/// `parallel`: OpenMP over trials with the exploration walk. `serial`: one
/// thread, full sample plus union-find. Both see the same colourings.
CrossingEstimate crossing_probability(const Triangulation& t, const CrossingSpec& spec, std::int64_t trials,
                                      std::uint64_t seed, double p = 0.5, Engine engine = Engine::parallel);

nlohmann::json crossing_to_json(const CrossingEstimate& e);

// ---- separating events and observables --------------------------------------

enum class Mark { a = 0, b = 1, c = 2 };

/// Evaluates E_x for every face under one colouring: f is separated from the
/// arc opposite x by a black chain ending on the two arcs at x. Computed as
/// the faces reachable from the corner at x, through faces and the outer
/// triangles along the near arcs, that avoid the white cluster of the
/// closed opposite arc.
class SeparationKernel {
 public:
  explicit SeparationKernel(const MarkedTriangleDomain& d);
  void evaluate(const std::vector<std::uint8_t>& black, Mark x, std::vector<std::uint8_t>& event) const;
  const Triangulation& triangulation() const { return *t_; }

 private:
  const Triangulation* t_;
  std::array<int, 3> marks_;
  std::array<std::vector<int>, 3> opposite_arc_;  // closed arc bc for a, etc.
  std::array<std::vector<std::uint8_t>, 3> opposite_edge_;  // per boundary edge
};

bool separating_event(const MarkedTriangleDomain& d, const PercolationSample& s, int face, Mark x = Mark::a);

struct ObservableField {
  const Triangulation* lattice = nullptr;
  std::int64_t trials = 0;
  std::vector<std::array<std::int64_t, 3>> counts;  // per face, E_a, E_b, E_c

  double value(int f, Mark x) const { return static_cast<double>(counts[f][static_cast<int>(x)]) / trials; }
  double half_width(int f, Mark x) const { return mesoperc::half_width(value(f, x), trials); }
  Point H(int f) const;
};

struct EdgeProbabilities {
  const Triangulation* lattice = nullptr;
  std::int64_t trials = 0;
  /// Per half-edge h (dual edge from face(h) to face(twin h)): E_x at the
  /// head face and not at the tail face. Zero on boundary half-edges.
  std::vector<std::array<std::int64_t, 3>> counts;

  double value(int h, Mark x) const { return static_cast<double>(counts[h][static_cast<int>(x)]) / trials; }
  /// P_x(e) - P_x(-e).
  double derivative(int h, Mark x) const;
};

struct Observables {
  ObservableField H;
  EdgeProbabilities P;
};

/// Shared samples for all faces and edges. trials = 0 selects exhaustive
/// enumeration of every colouring at p = 1/2 (at most 25 vertices).
Observables estimate_observables(const MarkedTriangleDomain& d, std::int64_t trials, std::uint64_t seed,
                                 double p = 0.5, Engine engine = Engine::parallel);
ObservableField estimate_H(const MarkedTriangleDomain& d, std::int64_t trials, std::uint64_t seed, double p = 0.5);
EdgeProbabilities estimate_P(const MarkedTriangleDomain& d, std::int64_t trials, std::uint64_t seed, double p = 0.5);

struct ColorSwitchReport {
  bool exhaustive = false;
  std::int64_t trials = 0;
  int faces_checked = 0;
  double max_ab = 0;  // max |P_a(e) - P_b(e')|
  double max_ac = 0;  // max |P_a(e) - P_c(e'')|
  double max_z = 0;   // largest discrepancy in units of its joint standard error
};

/// Over every interior face with outgoing dual edges e, e', e'' in
/// counterclockwise order. Faces touching the boundary are skipped.
ColorSwitchReport color_switch_check(const MarkedTriangleDomain& d, std::int64_t trials = 0, std::uint64_t seed = 0);
ColorSwitchReport color_switch_check(const EdgeProbabilities& P);

/// sum (H(z_{k+1}) + H(z_k))/2 (Phi(z_{k+1}) - Phi(z_k)) over a closed chain of
/// faces (last equal to first), consecutive faces sharing an edge.
Point contour_integral(const Triangulation& t, const std::vector<Point>& H, const std::vector<Point>& Phi,
                       const std::vector<int>& chain);

/// Faces met by a counterclockwise walk around the dual cycle surrounding vertex v.
std::vector<int> dual_cycle(const Triangulation& t, int v);

/// Counterclockwise ring of faces around the vertices within `radius` of
/// `center` (the component holding the vertex nearest to it). The vertex set
/// must be simply connected and keep off the boundary.
std::vector<int> contour_ring(const Triangulation& t, const Embedding& e, Point center, double radius);

std::string observable_csv(const ObservableField& f);
std::string edge_csv(const EdgeProbabilities& p);

// ---- RSW harness -----------------------------------------------------------

struct RswConfig {
  std::vector<double> deltas;
  std::vector<int> Ns;          // paired with deltas
  double lambda = 2;            // aspect ratio, long side horizontal at angle 0
  double height = 1;
  Point center{0.5, 0.5};
  std::vector<double> angles{0.0};
  std::int64_t trials = 1000;
  std::uint64_t seed = 1;
};

struct RswRow {
  double delta = 0;
  int N = 0;
  double lambda = 0;
  double angle = 0;
  int vertices = 0;
  CrossingEstimate estimate;
};

/// Lengthwise crossing of rotated lambda x height rectangles cut from T_{delta,N}.
std::vector<RswRow> rsw_harness(const EmbeddedMesh& torus, const RswConfig& cfg);
std::string rsw_csv(const std::vector<RswRow>& rows);

}  // namespace mesoperc
