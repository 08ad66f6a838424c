#include "mesoperc/conformal.hpp"
#include "mesoperc/error.hpp"

namespace mesoperc {

HolomorphyReport morera_qc_check(const SampledMap& phi, const SampledMap& phi0, const std::vector<Point>& polyline,
                                 double tol, std::string contour) {
  if (polyline.size() < 2 || polyline.front() != polyline.back()) throw InvalidArgument("open polyline");
  std::vector<Point> f, g;
  f.reserve(polyline.size());
  g.reserve(polyline.size());
  for (const Point& z : polyline) {
    f.push_back(phi(z));
    g.push_back(phi0(z));
  }
  HolomorphyReport r;
  r.contour = std::move(contour);
  r.value = midpoint_contour_sum(f, g);
  r.magnitude = std::abs(r.value);
  r.tolerance = tol;
  r.holomorphic = r.magnitude <= tol;
  return r;
}

nlohmann::json holomorphy_to_json(const HolomorphyReport& r) {
  return {{"contour", r.contour},
          {"value", {r.value.real(), r.value.imag()}},
          {"magnitude", r.magnitude},
          {"tolerance", r.tolerance},
          {"holomorphic", r.holomorphic}};
}

}  // namespace mesoperc
