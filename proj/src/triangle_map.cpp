#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/jacobi_elliptic.hpp>
#include <cmath>

#include "mesoperc/conformal.hpp"
#include "mesoperc/error.hpp"

namespace mesoperc {

namespace {

const Point kSixth = std::polar(1.0, kPi / 3);  // e^{i pi/3}

// 3 z^{1/3} * int_0^1 (1 - z u^3)^{-2/3} du / B(1/3, 1/3), for |z| <= 1 away from [1, inf).
Point sc_core(Point z) {
  z = {z.real(), z.imag() > 0 ? z.imag() : 0.0};
  static const double inv_beta = 1.0 / boost::math::beta(1.0 / 3.0, 1.0 / 3.0);
  if (z == Point{0.0, 0.0}) return {0.0, 0.0};
  auto integrand = [z](double u) { return std::pow(Point{1.0, 0.0} - z * (u * u * u), -2.0 / 3.0); };
  const Point integral = boost::math::quadrature::gauss<double, 60>::integrate(integrand, 0.0, 1.0);
  return 3.0 * inv_beta * std::pow(z, 1.0 / 3.0) * integral;
}

// Rotation of the triangle (0, 1, e^{i pi/3}) taking 0 -> 1 -> e^{i pi/3} -> 0.
Point rotate(Point w) { return 1.0 + (kSixth - 1.0) * w; }
Point unrotate(Point w) { return (w - 1.0) / (kSixth - 1.0); }

// SC map at z = num / den, choosing among z, 1/(1-z), (z-1)/z the argument of
// smallest modulus so the quadrature stays away from the branch point.
Point sc_homogeneous(Point num, Point den) {
  const Point diff = den - num;
  const double m0 = std::abs(num) / std::abs(den);
  const double m1 = std::abs(den) / std::abs(diff);
  const double m2 = std::abs(diff) / std::abs(num);
  if (m0 <= m1 && m0 <= m2) return sc_core(num / den);
  if (m1 <= m2) return unrotate(sc_core(den / diff));
  return rotate(sc_core(-diff / num));
}

}  // namespace

Point sc_triangle(Point z) {
  if (z.imag() < 0) throw InvalidArgument("sc_triangle: argument below the real axis");
  return sc_homogeneous(z, {1.0, 0.0});
}

Point jacobi_sn(Point w, double k, double kp) {
  // Boost's dn loses about three digits near the quarter period; rebuild it
  // from cn, where the sum of squares has no cancellation.
  double c, d, c1, d1;
  const double s = boost::math::jacobi_elliptic(k, w.real(), &c, &d);
  const double s1 = boost::math::jacobi_elliptic(kp, w.imag(), &c1, &d1);
  d = std::sqrt(kp * kp + k * k * c * c);
  d1 = std::sqrt(k * k + kp * kp * c1 * c1);
  const double den = c1 * c1 + k * k * s * s * s1 * s1;
  return {s * d1 / den, c * d * s1 * c1 / den};
}

RectangleToTriangle::RectangleToTriangle(double rho) : rho_(rho), m_(elliptic_moduli(rho)) {}

Point RectangleToTriangle::to_half_plane(Point psi) const {
  const Point zeta = jacobi_sn(2 * m_.K / rho_ * psi - m_.K, m_.k, m_.kp);
  return 2 * m_.k * (zeta - 1.0) / ((m_.k * zeta + 1.0) * (1 - m_.k));
}

Point RectangleToTriangle::operator()(Point psi) const {
  // Same Mobius map as to_half_plane, kept as numerator and denominator so the
  // corner sent to infinity stays finite.
  const Point zeta = jacobi_sn(2 * m_.K / rho_ * psi - m_.K, m_.k, m_.kp);
  const Point num = 2 * m_.k * (zeta - 1.0);
  const Point den = (m_.k * zeta + 1.0) * (1 - m_.k);
  return 1.0 + sc_homogeneous(num, den) * (kTau - 1.0);
}

}  // namespace mesoperc
