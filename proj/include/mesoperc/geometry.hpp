#pragma once

#include <array>
#include <vector>
#include <cmath>
#include <complex>
#include <numbers>

namespace mesoperc {

/// Points of the plane are complex numbers throughout.
using Point = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;

/// The primitive cube root of unity e^{2 pi i / 3}.
inline const Point kTau{-0.5, std::numbers::sqrt3 / 2.0};

inline double cross(Point u, Point v) { return u.real() * v.imag() - u.imag() * v.real(); }

inline double dot(Point u, Point v) { return u.real() * v.real() + u.imag() * v.imag(); }

/// Signed area of the triangle (a, b, c); positive when counterclockwise.
inline double signed_area(Point a, Point b, Point c) { return 0.5 * cross(b - a, c - a); }

inline double longest_edge(Point a, Point b, Point c) {
  return std::max({std::abs(b - a), std::abs(c - b), std::abs(a - c)});
}

/// Relative area threshold below which a face counts as degenerate.
inline constexpr double kDegenerateAreaRatio = 1e-12;

inline bool is_degenerate(Point a, Point b, Point c) {
  const double l = longest_edge(a, b, c);
  return std::abs(signed_area(a, b, c)) < kDegenerateAreaRatio * l * l;
}

/// Barycentric coordinates of p with respect to (a, b, c).
inline std::array<double, 3> barycentric(Point p, Point a, Point b, Point c) {
  const double area = cross(b - a, c - a);
  const double lb = cross(p - a, c - a) / area;
  const double lc = cross(b - a, p - a) / area;
  return {1.0 - lb - lc, lb, lc};
}

/// Midpoint-rule contour sum over an open polyline of samples:
/// sum_k (f_{k+1} + f_k) / 2 * (g_{k+1} - g_k), k = 0..n-2.
/// Evaluated in exact rational arithmetic and rounded once, so telescoping sums vanish exactly.
Point midpoint_contour_sum(const std::vector<Point>& f, const std::vector<Point>& g);

}  // namespace mesoperc
