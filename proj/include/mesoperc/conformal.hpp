#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mesoperc/geometry.hpp"
#include "mesoperc/triangulation.hpp"

namespace mesoperc {

// ---- modulus ---------------------------------------------------------------

/// First-order finite-element weight of an edge when every face is a unit
/// equilateral triangle: 1/(2 sqrt 3) per incident face.
inline const double kHalfCot60 = 0.5 / std::sqrt(3.0);

struct ModulusOptions {
  double tol = 1e-10;   // relative residual of the linear solve
  int max_iter = 2000;
};

struct ModulusResult {
  double rho = 0;
  int level = 0;
  std::vector<double> potential;  // vertex values on G^(level)
  double energy = 0;              // Dirichlet energy = effective conductance
  double error_estimate = 0;      // |rho_n - rho_{n-1}|, NaN at level 0
  std::vector<double> level_rho;  // rho at levels 0..n
  int iterations = 0;             // solver iterations at the finest level
};

/// rho = 1 / C_eff between arcs ab (u = 1) and cd (u = 0) on the n-times
/// subdivided domain. Solved by conjugate gradients preconditioned with a
/// multigrid V-cycle over the subdivision hierarchy.
ModulusResult modulus(const MarkedRectangleDomain& d, int n, const ModulusOptions& opt = {});

nlohmann::json modulus_to_json(const ModulusResult& r);
/// CSV with header `vertex,u`.
std::string potential_csv(const ModulusResult& r);

// ---- Cardy -----------------------------------------------------------------

/// Elliptic modulus k and complement k' with K'(k)/K(k) = 2/rho, computed from
/// theta functions of the two nomes exp(-2 pi/rho) and exp(-pi rho/2).
struct EllipticModuli {
  double k = 0, kp = 0;  // k and k'
  double K = 0, Kp = 0;  // complete integrals K(k), K(k')
};
EllipticModuli elliptic_moduli(double rho);

/// Crossing probability of a conformal rectangle of modulus rho.
double cardy(double rho);

// ---- conformal maps --------------------------------------------------------

/// Schwarz-Christoffel map of the closed upper half-plane onto the triangle
/// (0, 1, e^{i pi/3}) sending 0, 1, infinity to the corners in that order.
Point sc_triangle(Point z);

/// Conformal map of the rectangle [0, rho] x [0, 1] onto the triangle
/// (1, tau, tau^2) sending rho -> 1, rho + i -> tau, i -> tau^2.
class RectangleToTriangle {
 public:
  explicit RectangleToTriangle(double rho);
  Point operator()(Point psi) const;
  /// Image in the upper half-plane before the triangle map (a, b, c -> 0, 1, inf).
  Point to_half_plane(Point psi) const;
  double rho() const { return rho_; }

 private:
  double rho_;
  EllipticModuli m_;
};

/// Complex Jacobi sn(w | k) via the addition formula.
Point jacobi_sn(Point w, double k, double kp);

// ---- predicted observable --------------------------------------------------

struct PredictedField {
  Triangulation triangulation;   // G^(n)
  int level = 0;
  int d = -1;                    // auxiliary fourth mark on arc ca
  double rho = 0;                // modulus of (a, b, c, d)
  std::vector<Point> face_psi;   // rectangle coordinates per face
  std::vector<Point> face_h;     // predicted h per face
  std::vector<Point> vertex_h;   // predicted h per vertex
  double conjugate_path_error = 0;  // worst non-tree mismatch of the discrete conjugate
  double boundary_spread = 0;       // worst deviation of the conjugate from 0 on da, 1 on bc
  int clamped_faces = 0;            // faces whose rectangle coordinates needed clamping
};

/// Throws InvalidArgument when two marks share a boundary edge of the coarse graph.
PredictedField predict_H(const MarkedTriangleDomain& d, int n, const ModulusOptions& opt = {});

// ---- qc Morera check -------------------------------------------------------

struct HolomorphyReport {
  std::string contour;
  Point value;
  double magnitude = 0;
  double tolerance = 0;
  bool holomorphic = false;
};

using SampledMap = std::function<Point(Point)>;

/// Midpoint-rule integral of phi d phi0 along a closed polyline (first point
/// repeated at the end). Throws InvalidArgument for an open polyline.
HolomorphyReport morera_qc_check(const SampledMap& phi, const SampledMap& phi0, const std::vector<Point>& polyline,
                                 double tol, std::string contour = "polyline");

nlohmann::json holomorphy_to_json(const HolomorphyReport& r);

}  // namespace mesoperc
