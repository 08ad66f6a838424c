#include "mesoperc/geometry.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include "mesoperc/error.hpp"

namespace mesoperc {

namespace {

using Rational = boost::multiprecision::cpp_rational;

double round_to_double(const Rational& r) {
  if (r == 0) return 0.0;
  return r.convert_to<double>();
}

}  // namespace

Point midpoint_contour_sum(const std::vector<Point>& f, const std::vector<Point>& g) {
  if (f.size() != g.size()) throw InvalidArgument("midpoint_contour_sum: size mismatch");
  Rational re = 0, im = 0;
  for (std::size_t k = 0; k + 1 < f.size(); ++k) {
    const Rational fr = Rational(f[k + 1].real()) + Rational(f[k].real());
    const Rational fi = Rational(f[k + 1].imag()) + Rational(f[k].imag());
    const Rational gr = Rational(g[k + 1].real()) - Rational(g[k].real());
    const Rational gi = Rational(g[k + 1].imag()) - Rational(g[k].imag());
    re += fr * gr - fi * gi;
    im += fr * gi + fi * gr;
  }
  return {round_to_double(re / 2), round_to_double(im / 2)};
}

}  // namespace mesoperc
