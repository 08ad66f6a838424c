#pragma once

#include <optional>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mesoperc/embedding.hpp"
#include "mesoperc/triangulation.hpp"

namespace mesoperc {

/// Radii are solved at every torus vertex, or at the interior vertices of a
/// disk whose boundary radii are prescribed.
struct PackingProblem {
  const Triangulation* triangulation = nullptr;
  std::vector<double> boundary_radii;  // indexed by vertex; read at boundary vertices only
};

PackingProblem torus_problem(const Triangulation& t);
PackingProblem disk_problem(const Triangulation& t, std::vector<double> boundary_radii);

struct RadiusOptions {
  double tol = 1e-10;
  int max_iter = 200000;
  /// Newton polishing on the log-radii once sweeps have produced a rough packing.
  bool newton = true;
  int sweeps_before_newton = 4;
  std::vector<double> initial;  // optional starting radii
};

struct RadiusSolution {
  std::vector<double> radii;
  int sweeps = 0;
  int newton_steps = 0;
  double residual = 0;  // max |angle sum - 2 pi| over solved vertices
  std::vector<double> sweep_max_residual;
  std::vector<double> sweep_l1_residual;
};

/// Angle at the corner of radius r in the triangle of three mutually tangent
/// circles with radii (r, ru, rw).
double tangent_angle(double r, double ru, double rw);
double angle_sum(const Triangulation& t, const std::vector<double>& radii, int v);
/// Signed residuals angle_sum(v) - 2 pi; zero at disk boundary vertices.
std::vector<double> angle_residuals(const PackingProblem& p, const std::vector<double>& radii);

/// Throws NonConvergence with the worst residual if tol is not reached.
RadiusSolution solve_radii(const PackingProblem& p, const RadiusOptions& opt = {});

struct CirclePacking {
  std::vector<double> radii;
  std::vector<Point> centers;                    // canonical instance of each vertex
  std::vector<std::array<Point, 3>> face_corners;  // laid-out corners per face
  std::optional<Point> tau;                      // torus: normalized second period
  std::optional<Periods> periods;                // torus: (1, tau)
  int pin0 = -1, pin1 = -1;                      // disk normalization vertices
  double closure_gap = 0;                        // worst disagreement between repeated placements
};

struct LayoutOptions {
  int root_face = 0;
  /// Disk: vertices sent to the two target points. Default: the source
  /// vertices nearest 0 and 1 go to their source positions.
  std::optional<std::pair<int, int>> pins;
  std::optional<std::pair<Point, Point>> pin_targets;
  /// Closure tolerance relative to the sum of radii.
  double closure_tol = 1e-8;
};

/// Breadth-first layout over faces. A torus needs the source embedding (for
/// its lifts); a disk uses it, when given, for the default normalization.
CirclePacking layout(const Triangulation& t, const std::vector<double>& radii, const Embedding* source = nullptr,
                     const LayoutOptions& opt = {});

/// Affine-per-face map from the source embedding onto a laid-out packing.
class PiecewiseLinearMap {
 public:
  PiecewiseLinearMap(const Triangulation& t, const Embedding& source, const CirclePacking& cp);
  /// Throws InvalidArgument for points outside a disk domain.
  Point operator()(Point z) const;

 private:
  std::optional<std::pair<int, Point>> locate(Point z) const;  // face and offset
  std::vector<std::array<Point, 3>> src_;
  std::vector<std::array<Point, 3>> dst_;
  std::optional<Periods> src_periods_, dst_periods_;
  double x0_ = 0, y0_ = 0, cell_ = 1;
  int nx_ = 1, ny_ = 1;
  std::vector<std::vector<int>> grid_;
};

PiecewiseLinearMap psi_map(const CirclePacking& cp, const Triangulation& t, const Embedding& e);

/// Solves the doubly periodic packing of the side-N refinement and returns tau.
Point torus_period(const Triangulation& t, const Embedding& e, int N, double tol = 1e-10);

nlohmann::json packing_to_json(const CirclePacking& cp);

}  // namespace mesoperc
