#include <sstream>

#include "mesoperc/domains.hpp"
#include "mesoperc/error.hpp"
#include "mesoperc/mesoscopic.hpp"
#include "mesoperc/percolation.hpp"

namespace mesoperc {

std::vector<RswRow> rsw_harness(const EmbeddedMesh& torus, const RswConfig& cfg) {
  if (!(cfg.lambda > 1)) throw InvalidArgument("rsw_harness: aspect ratio must exceed 1");
  if (cfg.deltas.size() != cfg.Ns.size() || cfg.deltas.empty()) {
    throw InvalidArgument("rsw_harness: need one N per delta");
  }
  std::vector<RswRow> rows;
  std::uint64_t run = 0;
  for (std::size_t s = 0; s < cfg.deltas.size(); ++s) {
    for (double angle : cfg.angles) {
      const double w = cfg.lambda * cfg.height, h = cfg.height;
      const ConvexPolygon window = rotated_rectangle(cfg.center, w, h, angle);
      const MesoscopicLattice m = build_mesoscopic(torus.triangulation, torus.embedding, cfg.deltas[s], cfg.Ns[s], window);
      const Point rot = std::polar(1.0, angle);
      const std::array<Point, 4> corners{cfg.center + rot * Point{w / 2, -h / 2}, cfg.center + rot * Point{w / 2, h / 2},
                                         cfg.center + rot * Point{-w / 2, h / 2},
                                         cfg.center + rot * Point{-w / 2, -h / 2}};
      const QuadDomain q = mark_quad(m.fine, corners, m.coarse.triangulation.vertex_count());
      CrossingSpec spec = crossing_spec(q.marked);
      spec.orientation = RectangleOrientation{cfg.center, w, h, angle};
      RswRow row;
      row.delta = cfg.deltas[s];
      row.N = cfg.Ns[s];
      row.lambda = cfg.lambda;
      row.angle = angle;
      row.vertices = q.marked.triangulation.vertex_count();
      // Each configuration draws from its own stream.
      row.estimate = crossing_probability(q.marked.triangulation, spec, cfg.trials, cfg.seed + 1000003 * run++);
      rows.push_back(row);
    }
  }
  return rows;
}

std::string rsw_csv(const std::vector<RswRow>& rows) {
  std::ostringstream os;
  os.precision(17);
  os << "delta,N,lambda,angle,vertices,trials,successes,estimate,half_width,seed\n";
  for (const RswRow& r : rows) {
    os << r.delta << ',' << r.N << ',' << r.lambda << ',' << r.angle << ',' << r.vertices << ',' << r.estimate.trials
       << ',' << r.estimate.successes << ',' << r.estimate.estimate << ',' << r.estimate.half_width << ','
       << r.estimate.seed << '\n';
  }
  return os.str();
}

}  // namespace mesoperc
