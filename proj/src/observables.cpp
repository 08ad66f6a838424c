#include <algorithm>
#include <cmath>
#include <sstream>

#include "mesoperc/error.hpp"
#include "mesoperc/percolation.hpp"
#include "mesoperc/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mesoperc {

SeparationKernel::SeparationKernel(const MarkedTriangleDomain& d) : t_(&d.triangulation), marks_{d.a, d.b, d.c} {
  check_marks(*t_, marks_);
  const std::vector<int>& bd = t_->boundary();
  const int nb = static_cast<int>(bd.size());
  for (int k = 0; k < 3; ++k) {
    const int y = marks_[(k + 1) % 3], z = marks_[(k + 2) % 3];
    opposite_arc_[k] = boundary_arc(*t_, y, z);
    opposite_edge_[k].assign(nb, 0);
    for (int i = t_->boundary_position(y); bd[i] != z; i = (i + 1) % nb) opposite_edge_[k][i] = 1;
  }
}

void SeparationKernel::evaluate(const std::vector<std::uint8_t>& black, Mark x, std::vector<std::uint8_t>& event) const {
  const Triangulation& t = *t_;
  const int k = static_cast<int>(x);
  const int nv = t.vertex_count(), nf = t.face_count();
  const std::vector<int>& bd = t.boundary();
  const int nb = static_cast<int>(bd.size());
  event.assign(nf, 0);
  std::vector<std::uint8_t> white_cluster(nv, 0);
  std::vector<int> stack;
  for (int v : opposite_arc_[k]) {
    if (!black[v] && !white_cluster[v]) {
      white_cluster[v] = 1;
      stack.push_back(v);
    }
  }
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int w : t.neighbors(v)) {
      if (!black[w] && !white_cluster[w]) {
        white_cluster[w] = 1;
        stack.push_back(w);
      }
    }
  }
  const int mark = marks_[k];
  if (white_cluster[mark]) return;

  // Flood the faces reachable from the corner at the mark without entering a
  // face that touches the cluster. Nodes nf + i are the outer triangles glued
  // to boundary edge i, which let the flood run along the near arcs.
  auto blocked = [&](int node) {
    if (node < nf) {
      const Face& fc = t.face(node);
      return white_cluster[fc[0]] || white_cluster[fc[1]] || white_cluster[fc[2]];
    }
    const int i = node - nf;
    return opposite_edge_[k][i] || white_cluster[bd[i]] || white_cluster[bd[(i + 1) % nb]];
  };
  std::vector<std::uint8_t> seen(nf + nb, 0);
  auto push = [&](int node) {
    if (!seen[node] && !blocked(node)) {
      seen[node] = 1;
      stack.push_back(node);
    }
  };
  const int pos = t.boundary_position(mark);
  push(nf + pos);
  push(nf + (pos + nb - 1) % nb);
  while (!stack.empty()) {
    const int node = stack.back();
    stack.pop_back();
    if (node < nf) {
      event[node] = 1;
      for (int j = 0; j < 3; ++j) {
        const int h = 3 * node + j;
        const int tw = t.twin(h);
        push(tw >= 0 ? Triangulation::face_of(tw) : nf + t.boundary_position(t.origin(h)));
      }
      continue;
    }
    const int i = node - nf;
    push(Triangulation::face_of(t.boundary_halfedge(i)));
    // Neighbouring outer triangles meet at a boundary vertex; across a mark
    // they meet only through its corner triangle, which is open at this mark alone.
    const int ahead = bd[(i + 1) % nb], behind = bd[i];
    if (ahead == mark || (ahead != marks_[(k + 1) % 3] && ahead != marks_[(k + 2) % 3])) push(nf + (i + 1) % nb);
    if (behind == mark || (behind != marks_[(k + 1) % 3] && behind != marks_[(k + 2) % 3])) push(nf + (i + nb - 1) % nb);
  }
}

bool separating_event(const MarkedTriangleDomain& d, const PercolationSample& s, int face, Mark x) {
  if (face < 0 || face >= d.triangulation.face_count()) throw InvalidArgument("separating_event: face outside domain");
  if (static_cast<int>(s.black.size()) != d.triangulation.vertex_count()) {
    throw InvalidArgument("separating_event: sample does not match the domain");
  }
  std::vector<std::uint8_t> event;
  SeparationKernel(d).evaluate(s.black, x, event);
  return event[face] != 0;
}

Point ObservableField::H(int f) const {
  return value(f, Mark::a) + kTau * value(f, Mark::b) + std::conj(kTau) * value(f, Mark::c);
}

double EdgeProbabilities::derivative(int h, Mark x) const {
  const int tw = lattice->twin(h);
  if (tw < 0) return 0.0;
  return value(h, x) - value(tw, x);
}

namespace {

struct Counts {
  std::vector<std::array<std::int64_t, 3>> face;
  std::vector<std::array<std::int64_t, 3>> edge;

  Counts(int nf, int nh) : face(nf, {0, 0, 0}), edge(nh, {0, 0, 0}) {}

  void add(const Counts& o) {
    for (std::size_t i = 0; i < face.size(); ++i) {
      for (int k = 0; k < 3; ++k) face[i][k] += o.face[i][k];
    }
    for (std::size_t i = 0; i < edge.size(); ++i) {
      for (int k = 0; k < 3; ++k) edge[i][k] += o.edge[i][k];
    }
  }
};

void accumulate(const SeparationKernel& kernel, const std::vector<std::uint8_t>& black, Counts& c,
                std::vector<std::uint8_t>& event) {
  const Triangulation& t = kernel.triangulation();
  for (int k = 0; k < 3; ++k) {
    kernel.evaluate(black, static_cast<Mark>(k), event);
    for (int f = 0; f < t.face_count(); ++f) c.face[f][k] += event[f];
    for (int h = 0; h < t.halfedge_count(); ++h) {
      const int tw = t.twin(h);
      if (tw >= 0 && event[Triangulation::face_of(tw)] && !event[Triangulation::face_of(h)]) ++c.edge[h][k];
    }
  }
}

}  // namespace

Observables estimate_observables(const MarkedTriangleDomain& d, std::int64_t trials, std::uint64_t seed, double p,
                                 Engine engine) {
  if (trials < 0) throw InvalidArgument("estimate: trials must be non-negative");
  if (!(p >= 0 && p <= 1)) throw InvalidArgument("estimate: p must lie in [0, 1]");
  const SeparationKernel kernel(d);
  const Triangulation& t = d.triangulation;
  const int nv = t.vertex_count(), nf = t.face_count(), nh = t.halfedge_count();
  Counts total(nf, nh);
  std::int64_t n_samples = trials;

  if (trials == 0) {
    if (nv > 25) throw InvalidArgument("exhaustive enumeration needs at most 25 vertices");
    n_samples = std::int64_t{1} << nv;
    std::vector<std::uint8_t> black(nv), event;
    for (std::int64_t bits = 0; bits < n_samples; ++bits) {
      for (int v = 0; v < nv; ++v) black[v] = (bits >> v) & 1;
      accumulate(kernel, black, total, event);
    }
  } else if (engine == Engine::serial) {
    std::vector<std::uint8_t> event;
    for (std::int64_t k = 0; k < trials; ++k) {
      accumulate(kernel, sample(t, p, seed, static_cast<std::uint64_t>(k)).black, total, event);
    }
  } else {
    const std::uint64_t threshold = black_threshold(p);
#pragma omp parallel
    {
      Counts local(nf, nh);
      std::vector<std::uint8_t> black(nv), event;
#pragma omp for schedule(dynamic, 16)
      for (std::int64_t k = 0; k < trials; ++k) {
        for (int v = 0; v < nv; ++v) black[v] = vertex_word(seed, static_cast<std::uint64_t>(k), v) < threshold;
        accumulate(kernel, black, local, event);
      }
#pragma omp critical
      total.add(local);
    }
  }

  Observables out;
  out.H.lattice = &t;
  out.H.trials = n_samples;
  out.H.counts = std::move(total.face);
  out.P.lattice = &t;
  out.P.trials = n_samples;
  out.P.counts = std::move(total.edge);
  return out;
}

ObservableField estimate_H(const MarkedTriangleDomain& d, std::int64_t trials, std::uint64_t seed, double p) {
  return estimate_observables(d, trials, seed, p).H;
}

EdgeProbabilities estimate_P(const MarkedTriangleDomain& d, std::int64_t trials, std::uint64_t seed, double p) {
  return estimate_observables(d, trials, seed, p).P;
}

ColorSwitchReport color_switch_check(const EdgeProbabilities& P) {
  const Triangulation& t = *P.lattice;
  ColorSwitchReport r;
  r.trials = P.trials;
  const double n = static_cast<double>(P.trials);
  auto z_score = [n](double x, double y) {
    const double var = (x * (1 - x) + y * (1 - y)) / n;
    const double diff = std::abs(x - y);
    if (diff == 0) return 0.0;
    return var > 0 ? diff / std::sqrt(var) : INFINITY;
  };
  for (int f = 0; f < t.face_count(); ++f) {
    bool interior = true;
    for (int k = 0; k < 3; ++k) interior = interior && t.twin(3 * f + k) >= 0;
    if (!interior) continue;
    ++r.faces_checked;
    for (int k = 0; k < 3; ++k) {
      const int e = 3 * f + k, e1 = 3 * f + (k + 1) % 3, e2 = 3 * f + (k + 2) % 3;
      const double pa = P.value(e, Mark::a), pb = P.value(e1, Mark::b), pc = P.value(e2, Mark::c);
      r.max_ab = std::max(r.max_ab, std::abs(pa - pb));
      r.max_ac = std::max(r.max_ac, std::abs(pa - pc));
      r.max_z = std::max({r.max_z, z_score(pa, pb), z_score(pa, pc)});
    }
  }
  return r;
}

ColorSwitchReport color_switch_check(const MarkedTriangleDomain& d, std::int64_t trials, std::uint64_t seed) {
  const Observables o = estimate_observables(d, trials, seed);
  ColorSwitchReport r = color_switch_check(o.P);
  r.exhaustive = trials == 0;
  return r;
}

Point contour_integral(const Triangulation& t, const std::vector<Point>& H, const std::vector<Point>& Phi,
                       const std::vector<int>& chain) {
  if (chain.size() < 2 || chain.front() != chain.back()) throw InvalidArgument("contour_integral: open chain");
  const int nf = t.face_count();
  std::vector<std::uint8_t> seen(nf, 0);
  for (std::size_t k = 0; k + 1 < chain.size(); ++k) {
    const int f = chain[k], g = chain[k + 1];
    if (f < 0 || f >= nf || g < 0 || g >= nf) throw InvalidArgument("contour_integral: face outside the lattice");
    if (seen[f]) throw InvalidArgument("contour_integral: repeated face " + std::to_string(f));
    seen[f] = 1;
    bool adjacent = false;
    for (int j = 0; j < 3; ++j) {
      const int tw = t.twin(3 * f + j);
      adjacent = adjacent || (tw >= 0 && Triangulation::face_of(tw) == g);
    }
    if (!adjacent) {
      throw InvalidArgument("contour_integral: faces " + std::to_string(f) + " and " + std::to_string(g) +
                            " are not neighbours");
    }
  }
  std::vector<Point> h, phi;
  for (int f : chain) {
    h.push_back(H[f]);
    phi.push_back(Phi[f]);
  }
  return midpoint_contour_sum(h, phi);
}

std::vector<int> dual_cycle(const Triangulation& t, int v) {
  if (t.is_boundary_vertex(v)) throw InvalidArgument("dual_cycle: vertex lies on the boundary");
  std::vector<int> chain;
  for (int h : t.outgoing(v)) chain.push_back(Triangulation::face_of(h));
  chain.push_back(chain.front());
  return chain;
}

std::vector<int> contour_ring(const Triangulation& t, const Embedding& e, Point center, double radius) {
  const int nv = t.vertex_count();
  int seed = 0;
  for (int v = 1; v < nv; ++v) {
    if (std::abs(e.positions[v] - center) < std::abs(e.positions[seed] - center)) seed = v;
  }
  if (std::abs(e.positions[seed] - center) > radius) throw InvalidArgument("contour_ring: no vertex inside the circle");
  std::vector<std::uint8_t> inside(nv, 0);
  std::vector<int> stack{seed};
  inside[seed] = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    if (t.is_boundary_vertex(v)) throw InvalidArgument("contour_ring: circle reaches the boundary");
    for (int w : t.neighbors(v)) {
      if (!inside[w] && std::abs(e.positions[w] - center) <= radius) {
        inside[w] = 1;
        stack.push_back(w);
      }
    }
  }
  int start = -1;
  for (int h = 0; h < t.halfedge_count() && start < 0; ++h) {
    if (inside[t.origin(h)] && !inside[t.target(h)]) start = h;
  }
  if (start < 0) throw InvalidArgument("contour_ring: circle covers the domain");
  // Each ring face has exactly two edges from the inside set to the outside;
  // leave through the one not entered by.
  std::vector<int> chain;
  int h = start;
  do {
    chain.push_back(Triangulation::face_of(h));
    const int third = t.target(Triangulation::next(h));
    const int out = inside[third] ? Triangulation::next(h) : Triangulation::prev(h);
    h = t.twin(out);
    if (h < 0) throw InvalidArgument("contour_ring: circle reaches the boundary");
    if (chain.size() > static_cast<std::size_t>(t.face_count())) throw InvalidArgument("contour_ring: vertex set has holes");
  } while (h != start);
  chain.push_back(chain.front());
  double area = 0;
  std::vector<Point> c;
  for (int f : chain) c.push_back((e.positions[t.face(f)[0]] + e.positions[t.face(f)[1]] + e.positions[t.face(f)[2]]) / 3.0);
  for (std::size_t k = 0; k + 1 < c.size(); ++k) area += cross(c[k], c[k + 1]);
  if (area < 0) std::reverse(chain.begin(), chain.end());
  return chain;
}

std::string observable_csv(const ObservableField& f) {
  std::ostringstream os;
  os.precision(17);
  os << "face,H_a,H_b,H_c,re_H,im_H,trials,half_width_a,half_width_b,half_width_c\n";
  for (std::size_t i = 0; i < f.counts.size(); ++i) {
    const int fi = static_cast<int>(i);
    const Point h = f.H(fi);
    os << i << ',' << f.value(fi, Mark::a) << ',' << f.value(fi, Mark::b) << ',' << f.value(fi, Mark::c) << ','
       << h.real() << ',' << h.imag() << ',' << f.trials << ',' << f.half_width(fi, Mark::a) << ','
       << f.half_width(fi, Mark::b) << ',' << f.half_width(fi, Mark::c) << '\n';
  }
  return os.str();
}

std::string edge_csv(const EdgeProbabilities& p) {
  std::ostringstream os;
  os.precision(17);
  os << "halfedge,tail_face,head_face,P_a,P_b,P_c,trials\n";
  for (std::size_t h = 0; h < p.counts.size(); ++h) {
    const int hi = static_cast<int>(h);
    const int tw = p.lattice->twin(hi);
    if (tw < 0) continue;
    os << h << ',' << Triangulation::face_of(hi) << ',' << Triangulation::face_of(tw) << ',' << p.value(hi, Mark::a)
       << ',' << p.value(hi, Mark::b) << ',' << p.value(hi, Mark::c) << ',' << p.trials << '\n';
  }
  return os.str();
}

}  // namespace mesoperc
