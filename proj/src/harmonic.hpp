#pragma once

#include <vector>

#include "mesoperc/conformal.hpp"

namespace mesoperc::detail {

/// Dirichlet problem u = 1 on arc (one_from, one_to), u = 0 on arc
/// (zero_from, zero_to), solved on the n-fold subdivisions of `base`.
struct HarmonicHierarchy {
  Triangulation finest;
  std::vector<double> u;
  std::vector<double> level_energy;
  int iterations = 0;
};

HarmonicHierarchy solve_harmonic(const Triangulation& base, int one_from, int one_to, int zero_from, int zero_to,
                                 int n, const ModulusOptions& opt);

/// Weight of edge e in the equilateral finite-element Laplacian.
inline double edge_weight(const Triangulation& t, int e) {
  return t.twin(t.edge_halfedge(e)) < 0 ? kHalfCot60 : 2 * kHalfCot60;
}

double dirichlet_energy(const Triangulation& t, const std::vector<double>& u);

}  // namespace mesoperc::detail
