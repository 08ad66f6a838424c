#include "mesoperc/mesoscopic.hpp"

#include <cmath>
#include <map>
#include <tuple>

#include "mesoperc/beltrami.hpp"
#include "mesoperc/error.hpp"
#include "mesoperc/subdivision.hpp"

namespace mesoperc {

MesoscopicLattice build_mesoscopic(const Triangulation& t, const Embedding& e, double delta, int N,
                                   const Rect& window) {
  if (!(window.x1 > window.x0) || !(window.y1 > window.y0)) throw InvalidArgument("window must have positive area");
  return build_mesoscopic(t, e, delta, N, to_polygon(window));
}

MesoscopicLattice build_mesoscopic(const Triangulation& t, const Embedding& e, double delta, int N,
                                   const ConvexPolygon& window) {
  if (!t.is_torus() || !e.periods) throw InvalidArgument("build_mesoscopic needs a torus triangulation");
  if (!(delta > 0) || !std::isfinite(delta)) throw InvalidArgument("delta must be positive");
  if (N < 1) throw InvalidArgument("N must be positive");
  if (window.size() < 3) throw InvalidArgument("window must be a polygon");

  const Periods scaled{delta * (*e.periods)[0], delta * (*e.periods)[1]};
  double smin = INFINITY, smax = -INFINITY, tmin = INFINITY, tmax = -INFINITY;
  for (Point p : window) {
    if (!std::isfinite(p.real()) || !std::isfinite(p.imag())) throw InvalidArgument("window must be bounded");
    const auto st = period_coordinates(scaled, p);
    smin = std::min(smin, st[0]);
    smax = std::max(smax, st[0]);
    tmin = std::min(tmin, st[1]);
    tmax = std::max(tmax, st[1]);
  }
  const int i0 = static_cast<int>(std::floor(smin)) - 3, i1 = static_cast<int>(std::ceil(smax)) + 3;
  const int j0 = static_cast<int>(std::floor(tmin)) - 3, j1 = static_cast<int>(std::ceil(tmax)) + 3;

  double cell_scale = 0;
  for (int f = 0; f < t.face_count(); ++f) {
    const auto c = e.face_corners(t, f);
    cell_scale = std::max(cell_scale, delta * longest_edge(c[0], c[1], c[2]));
  }
  const double min_overlap = 1e-9 * cell_scale * cell_scale;

  std::map<std::tuple<int, int, int>, int> vertex_id;
  std::vector<Point> positions;
  std::vector<Face> faces;
  std::vector<int> source;
  for (int j = j0; j <= j1; ++j) {
    for (int i = i0; i <= i1; ++i) {
      const Point shift = static_cast<double>(i) * scaled[0] + static_cast<double>(j) * scaled[1];
      for (int f = 0; f < t.face_count(); ++f) {
        std::array<Point, 3> c = e.face_corners(t, f);
        for (Point& p : c) p = delta * p + shift;
        if (overlap_area(c, window) <= min_overlap) continue;
        Face nf{};
        for (int k = 0; k < 3; ++k) {
          const Lift l = e.lifts[f][k];
          const auto key = std::make_tuple(t.face(f)[k], l.i + i, l.j + j);
          auto it = vertex_id.find(key);
          if (it == vertex_id.end()) {
            it = vertex_id.emplace(key, static_cast<int>(positions.size())).first;
            positions.push_back(c[k]);
          }
          nf[k] = it->second;
        }
        faces.push_back(nf);
        source.push_back(f);
      }
    }
  }
  if (faces.size() < 2) throw InvalidArgument("window too small to contain one cell");

  ExtractedDisk disk = extract_disk(faces, positions);
  MesoscopicLattice out;
  out.delta = delta;
  out.N = N;
  out.coarse = std::move(disk.mesh);
  for (int f : disk.face_origin) out.cell_source_face.push_back(source[f]);
  out.cell_mu = face_beltrami(out.coarse.triangulation, out.coarse.embedding);
  out.fine = refine(out.coarse.triangulation, out.coarse.embedding, N);
  out.cell_of_face.resize(out.fine.triangulation.face_count());
  for (int f = 0; f < out.fine.triangulation.face_count(); ++f) out.cell_of_face[f] = f / (N * N);
  return out;
}

}  // namespace mesoperc
