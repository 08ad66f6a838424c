#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "mesoperc/error.hpp"
#include "mesoperc/percolation.hpp"
#include "mesoperc/rng.hpp"

namespace mesoperc {

PercolationSample sample(const Triangulation& t, double p, std::uint64_t seed, std::uint64_t trial) {
  if (!(p >= 0 && p <= 1)) throw InvalidArgument("sample: p must lie in [0, 1]");
  PercolationSample s;
  s.lattice = &t;
  s.seed = seed;
  s.trial = trial;
  s.p = p;
  const std::uint64_t threshold = black_threshold(p);
  s.black.resize(t.vertex_count());
  for (int v = 0; v < t.vertex_count(); ++v) s.black[v] = vertex_word(seed, trial, v) < threshold;
  return s;
}

std::string to_rle(const std::vector<std::uint8_t>& black) {
  std::ostringstream os;
  for (std::size_t i = 0; i < black.size();) {
    std::size_t j = i;
    while (j < black.size() && (black[j] != 0) == (black[i] != 0)) ++j;
    os << (j - i) << (black[i] ? 'b' : 'w');
    i = j;
  }
  return os.str();
}

std::vector<std::uint8_t> from_rle(const std::string& rle) {
  std::vector<std::uint8_t> out;
  std::size_t run = 0;
  bool have_digits = false;
  for (char ch : rle) {
    if (ch >= '0' && ch <= '9') {
      run = run * 10 + static_cast<std::size_t>(ch - '0');
      have_digits = true;
    } else if ((ch == 'b' || ch == 'w') && have_digits) {
      out.insert(out.end(), run, ch == 'b' ? 1 : 0);
      run = 0;
      have_digits = false;
    } else {
      throw ParseError(std::string("rle: unexpected character '") + ch + "'");
    }
  }
  if (have_digits) throw ParseError("rle: trailing count without colour");
  return out;
}

CrossingSpec crossing_spec(const MarkedRectangleDomain& d) {
  const int marks[4] = {d.a, d.b, d.c, d.d};
  check_marks(d.triangulation, marks);
  return {boundary_arc(d.triangulation, d.a, d.b), boundary_arc(d.triangulation, d.c, d.d), std::nullopt};
}

namespace {

class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(int x, int y) {
    x = find(x);
    y = find(y);
    if (x != y) parent_[std::max(x, y)] = std::min(x, y);
  }

 private:
  std::vector<int> parent_;
};

void check_arc(const Triangulation& t, const std::vector<int>& arc) {
  if (arc.empty()) throw InvalidArgument("crossing arc is empty");
  for (int v : arc) {
    if (v < 0 || v >= t.vertex_count()) throw InvalidArgument("arc vertex " + std::to_string(v) + " outside domain");
  }
}

}  // namespace

bool connects(const Triangulation& t, const std::vector<std::uint8_t>& open, const CrossingSpec& spec) {
  check_arc(t, spec.arc1);
  check_arc(t, spec.arc2);
  const int n = t.vertex_count();
  // Two extra nodes stand for the arcs.
  UnionFind uf(n + 2);
  for (int e = 0; e < t.edge_count(); ++e) {
    const auto [u, v] = t.edge_vertices(e);
    if (open[u] && open[v]) uf.unite(u, v);
  }
  for (int v : spec.arc1) {
    if (open[v]) uf.unite(v, n);
  }
  for (int v : spec.arc2) {
    if (open[v]) uf.unite(v, n + 1);
  }
  return uf.find(n) == uf.find(n + 1);
}

bool crosses(const PercolationSample& s, const CrossingSpec& spec) {
  if (s.lattice == nullptr) throw InvalidArgument("crosses: sample has no lattice");
  return connects(*s.lattice, s.black, spec);
}

ExplorationCrossing::ExplorationCrossing(const Triangulation& t, const CrossingSpec& spec) {
  check_arc(t, spec.arc1);
  check_arc(t, spec.arc2);
  const int a = spec.arc1.front(), b = spec.arc1.back(), c = spec.arc2.front(), d = spec.arc2.back();
  const int marks[4] = {a, b, c, d};
  check_marks(t, marks);
  if (boundary_arc(t, a, b) != spec.arc1 || boundary_arc(t, c, d) != spec.arc2) {
    throw InvalidArgument("exploration needs arcs that are counterclockwise boundary arcs");
  }
  nv_ = t.vertex_count();
  const int nf = t.face_count();
  const auto& bnd = t.boundary();
  const int nb = static_cast<int>(bnd.size());
  faces_.reserve(nf + nb + 4);
  twin_.reserve(3 * (nf + nb + 4));
  for (int f = 0; f < nf; ++f) faces_.push_back(t.face(f));
  for (int h = 0; h < 3 * nf; ++h) twin_.push_back(t.twin(h));

  // Virtual vertices nv+0..nv+3 for arcs ab (black), bc (white), cd (black), da (white).
  const int mark_pos[4] = {t.boundary_position(a), t.boundary_position(b), t.boundary_position(c),
                           t.boundary_position(d)};
  auto arc_of_edge = [&](int i) {
    // Boundary edge i runs from position i to i + 1; it lies on the arc whose
    // start mark is the last one at or before i, cyclically.
    int best = -1, best_dist = nb + 1;
    for (int k = 0; k < 4; ++k) {
      const int dist = ((i - mark_pos[k]) % nb + nb) % nb;
      if (dist < best_dist) {
        best_dist = dist;
        best = k;
      }
    }
    return best;
  };
  const int outer_base = nf;
  for (int i = 0; i < nb; ++i) {
    const int u = bnd[i], v = bnd[(i + 1) % nb];
    const int x = nv_ + arc_of_edge(i);
    const int f = outer_base + i;
    faces_.push_back({v, u, x});
    const int h_real = t.boundary_halfedge(i);
    twin_[h_real] = 3 * f;
    twin_.push_back(h_real);
    twin_.push_back(-1);  // u -> x, set below
    twin_.push_back(-1);  // x -> v, set below
  }
  for (int i = 0; i < nb; ++i) {
    const int f = outer_base + i, g = outer_base + (i + 1) % nb;
    if (faces_[f][2] != faces_[g][2]) continue;  // a mark sits between them
    twin_[3 * f + 2] = 3 * g + 1;
    twin_[3 * g + 1] = 3 * f + 2;
  }
  for (int k = 0; k < 4; ++k) {
    const int m = marks[k];
    const int i = mark_pos[k];
    const int before = outer_base + (i + nb - 1) % nb, after = outer_base + i;
    const int xa = nv_ + (k + 3) % 4, xb = nv_ + k;
    const int f = static_cast<int>(faces_.size());
    faces_.push_back({m, xa, xb});
    twin_.push_back(3 * before + 2);
    twin_.push_back(-1);
    twin_.push_back(3 * after + 1);
    twin_[3 * before + 2] = 3 * f;
    twin_[3 * after + 1] = 3 * f + 2;
    if (k == 1) start_ = 3 * f + 1;  // X_ab -> X_bc at corner b
  }
}

template <class Color>
bool ExplorationCrossing::walk(const Color& color) const {
  auto black = [&](int v) {
    if (v >= nv_) return v == nv_ || v == nv_ + 2;
    return color(v);
  };
  auto vertex = [&](int h) { return faces_[h / 3][h % 3]; };
  auto next = [](int h) { return h % 3 == 2 ? h - 2 : h + 1; };
  auto prev = [](int h) { return h % 3 == 0 ? h + 2 : h - 1; };
  int h = start_;
  for (;;) {
    const int third = vertex(prev(h));
    const int e = black(third) ? next(h) : prev(h);
    const int u = vertex(e), w = vertex(next(e));
    if (u >= nv_ && w >= nv_) {
      // The interface ends at corner c (black crossing) or corner a (white crossing).
      return u == nv_ + 1 || w == nv_ + 1;
    }
    h = twin_[e];
  }
}

bool ExplorationCrossing::crosses(std::uint64_t seed, std::uint64_t trial, std::uint64_t threshold) const {
  return walk([&](int v) { return vertex_word(seed, trial, v) < threshold; });
}

bool ExplorationCrossing::crosses(const std::vector<std::uint8_t>& black) const {
  return walk([&](int v) { return black[v] != 0; });
}

double half_width(double p_hat, std::int64_t trials) {
  return trials > 0 ? 1.96 * std::sqrt(p_hat * (1 - p_hat) / static_cast<double>(trials)) : 0.0;
}

CrossingEstimate crossing_probability(const Triangulation& t, const CrossingSpec& spec, std::int64_t trials,
                                      std::uint64_t seed, double p, Engine engine) {
  if (trials < 1) throw InvalidArgument("crossing_probability: trials must be at least 1");
  if (!(p >= 0 && p <= 1)) throw InvalidArgument("crossing_probability: p must lie in [0, 1]");
  CrossingEstimate est;
  est.trials = trials;
  est.seed = seed;
  est.p = p;
  std::int64_t hits = 0;
  if (engine == Engine::parallel) {
    const ExplorationCrossing walker(t, spec);
    const std::uint64_t threshold = black_threshold(p);
#pragma omp parallel for schedule(dynamic, 64) reduction(+ : hits)
    for (std::int64_t k = 0; k < trials; ++k) {
      if (walker.crosses(seed, static_cast<std::uint64_t>(k), threshold)) ++hits;
    }
  } else {
    for (std::int64_t k = 0; k < trials; ++k) {
      if (crosses(sample(t, p, seed, static_cast<std::uint64_t>(k)), spec)) ++hits;
    }
  }
  est.successes = hits;
  est.estimate = static_cast<double>(hits) / static_cast<double>(trials);
  est.half_width = half_width(est.estimate, trials);
  return est;
}

nlohmann::json crossing_to_json(const CrossingEstimate& e) {
  return {{"trials", e.trials},       {"successes", e.successes}, {"estimate", e.estimate},
          {"half_width", e.half_width}, {"seed", e.seed},         {"p", e.p}};
}

}  // namespace mesoperc
