#include "mesoperc/beltrami.hpp"

#include "mesoperc/error.hpp"

namespace mesoperc {

Point beltrami(Point a, Point b, Point c) {
  if (is_degenerate(a, b, c)) throw DegenerateFace("beltrami: collinear face");
  if (signed_area(a, b, c) < 0.0) throw InvalidArgument("beltrami: face is not positively oriented");
  const Point t2 = kTau * kTau;
  const Point num = a + kTau * b + t2 * c;
  const Point den = std::conj(a) + kTau * std::conj(b) + t2 * std::conj(c);
  return -num / den;
}

std::vector<Point> face_beltrami(const Triangulation& t, const Embedding& e) {
  std::vector<Point> mu(t.face_count());
  for (int f = 0; f < t.face_count(); ++f) {
    const auto c = e.face_corners(t, f);
    mu[f] = beltrami(c[0], c[1], c[2]);
  }
  return mu;
}

}  // namespace mesoperc
