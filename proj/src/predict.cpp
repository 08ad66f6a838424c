#include <algorithm>
#include <cmath>
#include <queue>

#include "harmonic.hpp"
#include "mesoperc/error.hpp"

namespace mesoperc {

namespace {

bool clamp_psi(Point& psi, double rho) {
  const double x = std::clamp(psi.real(), 0.0, rho);
  const double y = std::clamp(psi.imag(), 0.0, 1.0);
  const bool changed = x != psi.real() || y != psi.imag();
  psi = {x, y};
  return changed;
}

}  // namespace

PredictedField predict_H(const MarkedTriangleDomain& d, int n, const ModulusOptions& opt) {
  const Triangulation& base = d.triangulation;
  const int marks[3] = {d.a, d.b, d.c};
  check_marks(base, marks);
  const int pairs[3][2] = {{d.a, d.b}, {d.b, d.c}, {d.c, d.a}};
  for (const auto& p : pairs) {
    if (boundary_arc(base, p[0], p[1]).size() < 3) {
      throw InvalidArgument("predict_H: marks " + std::to_string(p[0]) + " and " + std::to_string(p[1]) +
                            " share a boundary edge");
    }
  }
  const std::vector<int> arc_ca = boundary_arc(base, d.c, d.a);
  const int aux = arc_ca[(arc_ca.size() - 1) / 2];

  detail::HarmonicHierarchy hh = detail::solve_harmonic(base, d.a, d.b, d.c, aux, n, opt);
  PredictedField out;
  out.level = n;
  out.d = aux;
  out.rho = 1.0 / hh.level_energy.back();
  const double rho = out.rho;
  const Triangulation& t = hh.finest;
  const std::vector<double>& u = hh.u;
  const int nf = t.face_count();

  // Discrete conjugate: rotated gradient integrated across dual edges.
  const double w = 2 * kHalfCot60;
  auto jump = [&](int h, double weight) { return rho * weight * (u[t.origin(h)] - u[t.target(h)]); };
  std::vector<double> y(nf, 0.0);
  std::vector<char> seen(nf, 0);
  std::queue<int> queue;
  queue.push(0);
  seen[0] = 1;
  while (!queue.empty()) {
    const int f = queue.front();
    queue.pop();
    for (int k = 0; k < 3; ++k) {
      const int h = 3 * f + k;
      const int tw = t.twin(h);
      if (tw < 0) continue;
      const int g = Triangulation::face_of(tw);
      if (seen[g]) continue;
      seen[g] = 1;
      y[g] = y[f] + jump(h, w);
      queue.push(g);
    }
  }
  for (int h = 0; h < t.halfedge_count(); ++h) {
    const int tw = t.twin(h);
    if (tw < 0) continue;
    const double mismatch = std::abs(y[Triangulation::face_of(tw)] - y[Triangulation::face_of(h)] - jump(h, w));
    out.conjugate_path_error = std::max(out.conjugate_path_error, mismatch);
  }

  // Values at boundary edge midpoints, indexed by boundary position.
  const int nb = static_cast<int>(t.boundary().size());
  std::vector<double> yb(nb);
  for (int i = 0; i < nb; ++i) {
    const int h = t.boundary_halfedge(i);
    yb[i] = y[Triangulation::face_of(h)] + jump(h, kHalfCot60);
  }
  auto edges_between = [&](int from, int to) {
    std::vector<int> idx;
    for (int i = t.boundary_position(from); i != t.boundary_position(to); i = (i + 1) % nb) idx.push_back(i);
    return idx;
  };
  const std::vector<int> da = edges_between(aux, d.a);
  const std::vector<int> bc = edges_between(d.b, d.c);
  double shift = 0;
  for (int i : da) shift += yb[i];
  shift /= static_cast<double>(da.size());
  for (double& v : y) v -= shift;
  for (double& v : yb) v -= shift;
  for (int i : da) out.boundary_spread = std::max(out.boundary_spread, std::abs(yb[i]));
  for (int i : bc) out.boundary_spread = std::max(out.boundary_spread, std::abs(yb[i] - 1.0));

  const RectangleToTriangle map(rho);
  out.face_psi.resize(nf);
  out.face_h.resize(nf);
  for (int f = 0; f < nf; ++f) {
    const Face& fc = t.face(f);
    Point psi{rho * (u[fc[0]] + u[fc[1]] + u[fc[2]]) / 3.0, y[f]};
    if (clamp_psi(psi, rho)) ++out.clamped_faces;
    out.face_psi[f] = psi;
    out.face_h[f] = map(psi);
  }

  // Vertex conjugate: mean over incident faces inside, and on the boundary the
  // value of an adjacent free arc (where it is constant) or else the mean of
  // the two adjacent edge midpoints.
  const int nv = t.vertex_count();
  std::vector<double> vy(nv, 0.0), count(nv, 0.0);
  for (int f = 0; f < nf; ++f) {
    for (int v : t.face(f)) {
      if (t.is_boundary_vertex(v)) continue;
      vy[v] += y[f];
      count[v] += 1;
    }
  }
  std::vector<char> free_edge(nb, 0);
  for (int i : da) free_edge[i] = 1;
  for (int i : bc) free_edge[i] = 1;
  for (int i = 0; i < nb; ++i) {
    const int prev = (i + nb - 1) % nb;
    const int v = t.boundary()[i];
    if (free_edge[prev] || free_edge[i]) {
      vy[v] = free_edge[i] ? yb[i] : yb[prev];
    } else {
      vy[v] = 0.5 * (yb[prev] + yb[i]);
    }
    count[v] = 1;
  }
  out.vertex_h.resize(nv);
  for (int v = 0; v < nv; ++v) {
    Point psi{rho * u[v], vy[v] / count[v]};
    clamp_psi(psi, rho);
    out.vertex_h[v] = map(psi);
  }
  out.triangulation = std::move(hh.finest);
  return out;
}

}  // namespace mesoperc
