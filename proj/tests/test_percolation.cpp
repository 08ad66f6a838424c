#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>

#include "mesoperc/domains.hpp"
#include "mesoperc/error.hpp"
#include "mesoperc/lattices.hpp"
#include "mesoperc/mesoscopic.hpp"
#include "mesoperc/percolation.hpp"
#include "mesoperc/rng.hpp"
#include "oracles.hpp"

using namespace mesoperc;
using namespace mesoperc::testing;

TEST_CASE("philox4x32-10 known answers") {
  using W = std::array<std::uint32_t, 4>;
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == W{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        W{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        W{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("samples") {
  const QuadDomain q = triangular_rhombus(6);
  const Triangulation& t = q.marked.triangulation;
  const auto all_black = sample(t, 1.0, 7, 0);
  const auto all_white = sample(t, 0.0, 7, 0);
  CHECK(std::all_of(all_black.black.begin(), all_black.black.end(), [](auto b) { return b == 1; }));
  CHECK(std::all_of(all_white.black.begin(), all_white.black.end(), [](auto b) { return b == 0; }));
  CHECK(sample(t, 0.5, 7, 3).black == sample(t, 0.5, 7, 3).black);
  CHECK(sample(t, 0.5, 7, 3).black != sample(t, 0.5, 7, 4).black);
  CHECK(sample(t, 0.5, 7, 3).black != sample(t, 0.5, 8, 3).black);

  SUBCASE("black frequency matches p") {
    long black = 0, total = 0;
    for (std::uint64_t trial = 0; trial < 200; ++trial) {
      const auto s = sample(t, 0.3, 11, trial);
      black += std::count(s.black.begin(), s.black.end(), 1);
      total += static_cast<long>(s.black.size());
    }
    const double f = static_cast<double>(black) / total;
    CHECK(std::abs(f - 0.3) < 4 * std::sqrt(0.3 * 0.7 / total));
  }

  SUBCASE("coupled thresholds are monotone in p") {
    for (std::uint64_t trial = 0; trial < 50; ++trial) {
      const auto lo = sample(t, 0.4, 5, trial), hi = sample(t, 0.6, 5, trial);
      for (std::size_t v = 0; v < lo.black.size(); ++v) CHECK(lo.black[v] <= hi.black[v]);
    }
  }

  SUBCASE("run-length round trip") {
    const auto s = sample(t, 0.5, 1, 1);
    CHECK(from_rle(to_rle(s.black)) == s.black);
    CHECK(to_rle({1, 1, 1, 0, 0, 1}) == "3b2w1b");
    CHECK(from_rle("").empty());
    CHECK_THROWS_AS(from_rle("3x"), ParseError);
  }
}

TEST_CASE("crossing on extreme colourings") {
  const QuadDomain q = triangular_rhombus(5);
  const Triangulation& t = q.marked.triangulation;
  const CrossingSpec spec = crossing_spec(q.marked);
  const ExplorationCrossing ex(t, spec);
  const std::vector<std::uint8_t> black(t.vertex_count(), 1), white(t.vertex_count(), 0);
  CHECK(connects(t, black, spec));
  CHECK_FALSE(connects(t, white, spec));
  CHECK(ex.crosses(black));
  CHECK_FALSE(ex.crosses(white));
  const auto p1 = crossing_probability(t, spec, 100, 1, 1.0);
  const auto p0 = crossing_probability(t, spec, 100, 1, 0.0);
  CHECK(p1.successes == 100);
  CHECK(p0.successes == 0);
}

TEST_CASE("exhaustive duality and exploration agreement") {
  // Either black connects ab to cd or white connects bc to da, never both.
  for (int L : {2, 3}) {
    const QuadDomain q = triangular_rhombus(L);
    const Triangulation& t = q.marked.triangulation;
    const CrossingSpec spec = crossing_spec(q.marked);
    const CrossingSpec dual{boundary_arc(t, q.marked.b, q.marked.c), boundary_arc(t, q.marked.d, q.marked.a), {}};
    const ExplorationCrossing ex(t, spec);
    const int nv = t.vertex_count();
    int disagreements = 0, duality_failures = 0;
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << nv); ++bits) {
      const auto black = coloring(nv, bits);
      std::vector<std::uint8_t> white(nv);
      for (int v = 0; v < nv; ++v) white[v] = !black[v];
      const bool c = connects(t, black, spec);
      disagreements += c != ex.crosses(black);
      duality_failures += c == connects(t, white, dual);
    }
    CHECK(disagreements == 0);
    CHECK(duality_failures == 0);
  }
}

TEST_CASE("exploration agrees with union-find on an irregular quad") {
  const EmbeddedMesh f1 = fig1_torus();
  MesoscopicLattice m = build_mesoscopic(f1.triangulation, f1.embedding, 1.0, 2, Rect{0, 0, 1.5, 1});
  const QuadDomain q = mark_quad(m.fine, {Point{1.5, 0}, Point{1.5, 1}, Point{0, 1}, Point{0, 0}});
  const Triangulation& t = q.marked.triangulation;
  const CrossingSpec spec = crossing_spec(q.marked);
  const ExplorationCrossing ex(t, spec);
  const std::uint64_t thr = black_threshold(0.5);
  for (std::uint64_t trial = 0; trial < 500; ++trial) {
    const auto s = sample(t, 0.5, 42, trial);
    CHECK(crosses(s, spec) == ex.crosses(42, trial, thr));
    CHECK(ex.crosses(s.black) == ex.crosses(42, trial, thr));
  }
}

TEST_CASE("parallel and serial engines see the same samples") {
  const QuadDomain q = triangular_rectangle(8, 10);
  const Triangulation& t = q.marked.triangulation;
  const CrossingSpec spec = crossing_spec(q.marked);
  for (double p : {0.3, 0.5, 0.7}) {
    const auto par = crossing_probability(t, spec, 2000, 9, p, Engine::parallel);
    const auto ser = crossing_probability(t, spec, 2000, 9, p, Engine::serial);
    CHECK(par.successes == ser.successes);
    CHECK(par.estimate == ser.estimate);
  }
}

TEST_CASE("crossing probability properties") {
  SUBCASE("increasing in p under coupling") {
    const QuadDomain q = triangular_rhombus(10);
    const CrossingSpec spec = crossing_spec(q.marked);
    std::int64_t last = -1;
    for (double p : {0.2, 0.4, 0.5, 0.6, 0.8}) {
      const auto e = crossing_probability(q.marked.triangulation, spec, 1000, 3, p);
      CHECK(e.successes >= last);
      last = e.successes;
    }
  }
  SUBCASE("self-dual rhombus crosses with probability one half") {
    const QuadDomain small = triangular_rhombus(3);
    const int nv = small.marked.triangulation.vertex_count();
    std::int64_t crossing = 0;
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << nv); ++bits) {
      crossing += connects(small.marked.triangulation, coloring(nv, bits), crossing_spec(small.marked));
    }
    CHECK(2 * crossing == (std::int64_t{1} << nv));

    const QuadDomain q = triangular_rhombus(20);
    const auto e = crossing_probability(q.marked.triangulation, crossing_spec(q.marked), 200000, 2024);
    CHECK(std::abs(e.estimate - 0.5) <= e.half_width);
    CHECK(e.half_width == doctest::Approx(1.96 * std::sqrt(e.estimate * (1 - e.estimate) / 200000)));
  }
  SUBCASE("supercritical long crossing") {
    for (int rows : {6, 12}) {
      const QuadDomain q = triangular_rectangle(rows, 6 * rows);
      const auto e = crossing_probability(q.marked.triangulation, crossing_spec(q.marked), 2000, 5, 0.9);
      CHECK(e.estimate > 0.99);
    }
  }
  SUBCASE("json carries the estimate") {
    const QuadDomain q = triangular_rhombus(4);
    const auto e = crossing_probability(q.marked.triangulation, crossing_spec(q.marked), 100, 77);
    const auto j = crossing_to_json(e);
    CHECK(j.at("trials") == 100);
    CHECK(j.at("seed") == 77);
    CHECK(j.at("estimate").get<double>() == e.estimate);
  }
}

TEST_CASE("separating event") {
  const TriangleDomain d = triangular_triangle(6);
  const Triangulation& t = d.marked.triangulation;
  PercolationSample s{&t, std::vector<std::uint8_t>(t.vertex_count(), 0), 0, 0, 0.5};
  for (int f = 0; f < t.face_count(); ++f) CHECK_FALSE(separating_event(d.marked, s, f));
  s.black.assign(t.vertex_count(), 1);
  for (int f = 0; f < t.face_count(); ++f) {
    CHECK(separating_event(d.marked, s, f, Mark::a));
    CHECK(separating_event(d.marked, s, f, Mark::c));
  }
  CHECK_THROWS_AS(separating_event(d.marked, s, t.face_count()), InvalidArgument);
}

TEST_CASE("separating event matches the path enumeration oracle") {
  std::vector<TriangleDomain> domains{triangular_triangle(2), triangular_triangle(3), small_fig1_triangle()};
  for (const TriangleDomain& d : domains) {
    const Triangulation& t = d.marked.triangulation;
    const int nv = t.vertex_count();
    REQUIRE(nv <= 16);
    const SeparationKernel kernel(d.marked);
    for (Mark x : {Mark::a, Mark::b, Mark::c}) {
      const SeparationOracle oracle(d.marked, x);
      int mismatches = 0;
      std::vector<std::uint8_t> event;
      for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << nv); ++bits) {
        const auto black = coloring(nv, bits);
        kernel.evaluate(black, x, event);
        mismatches += event != oracle.evaluate(black);
      }
      CHECK(mismatches == 0);
    }
  }
}

TEST_CASE("exhaustive observables") {
  const TriangleDomain d = triangular_triangle(3);
  const Triangulation& t = d.marked.triangulation;
  const int nv = t.vertex_count();
  const Observables obs = estimate_observables(d.marked, 0, 0);
  REQUIRE(obs.H.trials == (std::int64_t{1} << nv));

  SUBCASE("counts equal the oracle sums") {
    for (Mark x : {Mark::a, Mark::b, Mark::c}) {
      const SeparationOracle oracle(d.marked, x);
      std::vector<std::int64_t> count(t.face_count(), 0);
      std::vector<std::int64_t> edge(t.halfedge_count(), 0);
      for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << nv); ++bits) {
        const auto e = oracle.evaluate(coloring(nv, bits));
        for (int f = 0; f < t.face_count(); ++f) count[f] += e[f];
        for (int h = 0; h < t.halfedge_count(); ++h) {
          if (t.twin(h) >= 0) edge[h] += e[Triangulation::face_of(t.twin(h))] && !e[Triangulation::face_of(h)];
        }
      }
      const int k = static_cast<int>(x);
      for (int f = 0; f < t.face_count(); ++f) CHECK(obs.H.counts[f][k] == count[f]);
      for (int h = 0; h < t.halfedge_count(); ++h) CHECK(obs.P.counts[h][k] == edge[h]);
    }
  }

  SUBCASE("discrete derivative of H is P(e) - P(-e)") {
    for (int h = 0; h < t.halfedge_count(); ++h) {
      const int tw = t.twin(h);
      if (tw < 0) continue;
      for (Mark x : {Mark::a, Mark::b, Mark::c}) {
        const int k = static_cast<int>(x);
        const std::int64_t dH = obs.H.counts[Triangulation::face_of(tw)][k] - obs.H.counts[Triangulation::face_of(h)][k];
        CHECK(dH == obs.P.counts[h][k] - obs.P.counts[tw][k]);
        CHECK(obs.P.derivative(h, x) == -obs.P.derivative(tw, x));
      }
    }
  }

  SUBCASE("derivatives sum to zero around dual faces") {
    for (int v = 0; v < nv; ++v) {
      if (t.is_boundary_vertex(v)) continue;
      for (Mark x : {Mark::a, Mark::b, Mark::c}) {
        double sum = 0;
        for (int h : t.outgoing(v)) sum += obs.P.derivative(h, x);
        CHECK(sum == 0.0);
      }
    }
  }

  SUBCASE("serial and parallel sampling agree") {
    const Observables par = estimate_observables(d.marked, 3000, 8, 0.5, Engine::parallel);
    const Observables ser = estimate_observables(d.marked, 3000, 8, 0.5, Engine::serial);
    CHECK(par.H.counts == ser.H.counts);
    CHECK(par.P.counts == ser.P.counts);
  }

  SUBCASE("exhaustive mode refuses large domains") {
    CHECK_THROWS_AS(estimate_observables(triangular_triangle(8).marked, 0, 0), InvalidArgument);
  }
}

TEST_CASE("observables are symmetric on the equilateral triangle") {
  const TriangleDomain d = triangular_triangle(8);
  const Triangulation& t = d.marked.triangulation;
  const Point centroid = (Point{1, 0} + Point{0.5, std::sqrt(3.0) / 2}) / 3.0;
  int centre = -1;
  for (int f = 0; f < t.face_count(); ++f) {
    const Face& fc = t.face(f);
    const Point c = (d.embedding.positions[fc[0]] + d.embedding.positions[fc[1]] + d.embedding.positions[fc[2]]) / 3.0;
    if (std::abs(c - centroid) < 1e-9) centre = f;
  }
  REQUIRE(centre >= 0);
  const ObservableField H = estimate_H(d.marked, 20000, 31);
  const double ha = H.value(centre, Mark::a), hb = H.value(centre, Mark::b), hc = H.value(centre, Mark::c);
  const double tol = 2 * 1.96 * std::sqrt(2 * 0.25 / 20000);
  CHECK(std::abs(ha - hb) < tol);
  CHECK(std::abs(ha - hc) < tol);
  CHECK(std::abs(ha - 1.0 / 3) < 0.1);
}

TEST_CASE("colour switching") {
  SUBCASE("exact on small domains") {
    for (int L : {3, 4}) {
      const ColorSwitchReport r = color_switch_check(triangular_triangle(L).marked);
      CHECK(r.exhaustive);
      CHECK(r.faces_checked > 0);
      CHECK(r.max_ab == 0.0);
      CHECK(r.max_ac == 0.0);
    }
    const ColorSwitchReport r = color_switch_check(small_fig1_triangle().marked);
    CHECK(r.max_ab == 0.0);
    CHECK(r.max_ac == 0.0);
  }
  SUBCASE("sampled within noise") {
    const ColorSwitchReport r = color_switch_check(triangular_triangle(6).marked, 40000, 12);
    CHECK_FALSE(r.exhaustive);
    CHECK(r.max_z < 4);
  }
}

TEST_CASE("contour sums") {
  const TriangleDomain d = triangular_triangle(4);
  const Triangulation& t = d.marked.triangulation;
  std::vector<Point> centre(t.face_count());
  for (int f = 0; f < t.face_count(); ++f) {
    const Face& fc = t.face(f);
    centre[f] = (d.embedding.positions[fc[0]] + d.embedding.positions[fc[1]] + d.embedding.positions[fc[2]]) / 3.0;
  }
  int v = -1;
  for (int u = 0; u < t.vertex_count() && v < 0; ++u) {
    if (!t.is_boundary_vertex(u)) v = u;
  }
  REQUIRE(v >= 0);
  const std::vector<int> chain = dual_cycle(t, v);
  CHECK(chain.size() == 7);

  const std::vector<Point> constant(t.face_count(), Point{0.3, -1.7});
  CHECK(contour_integral(t, constant, centre, chain) == Point{0, 0});
  CHECK(contour_integral(t, centre, centre, chain) == Point{0, 0});

  std::vector<Point> conj(t.face_count());
  for (int f = 0; f < t.face_count(); ++f) conj[f] = std::conj(centre[f]);
  std::vector<Point> ring;
  for (int f : chain) ring.push_back(centre[f]);
  double area = 0;
  for (std::size_t k = 0; k + 1 < ring.size(); ++k) area += cross(ring[k], ring[k + 1]) / 2;
  const Point I = contour_integral(t, conj, centre, chain);
  CHECK(std::abs(I.real()) < 1e-15);
  CHECK(I.imag() == doctest::Approx(2 * area).epsilon(1e-13));

  SUBCASE("dyadic contour is exact") {
    const std::vector<Point> sq{{0, 0}, {0.5, 0}, {0.5, 0.25}, {0, 0.25}, {0, 0}};
    std::vector<Point> f;
    for (Point z : sq) f.push_back(std::conj(z));
    CHECK(midpoint_contour_sum(f, sq) == Point{0, 2 * 0.125});
  }

  SUBCASE("invalid chains") {
    std::vector<int> open(chain.begin(), chain.end() - 1);
    CHECK_THROWS_AS(contour_integral(t, centre, centre, open), InvalidArgument);
    std::vector<int> jump{chain[0], chain[3], chain[0]};
    CHECK_THROWS_AS(contour_integral(t, centre, centre, jump), InvalidArgument);
    CHECK_THROWS_AS(dual_cycle(t, t.boundary().front()), InvalidArgument);
  }
}

TEST_CASE("rsw harness") {
  const EmbeddedMesh lattice = square_diagonal_torus(3);
  RswConfig cfg;
  cfg.deltas = {1.0 / 12};
  cfg.Ns = {1};
  cfg.trials = 400;
  cfg.angles = {0.0, kPi / 2};
  cfg.lambda = 2;
  const auto rows2 = rsw_harness(lattice, cfg);
  REQUIRE(rows2.size() == 2);
  for (const RswRow& r : rows2) {
    CHECK(r.vertices > 50);
    CHECK(r.estimate.trials == 400);
  }
  cfg.lambda = 4;
  const auto rows4 = rsw_harness(lattice, cfg);
  for (std::size_t i = 0; i < rows4.size(); ++i) CHECK(rows4[i].estimate.estimate <= rows2[i].estimate.estimate);
  cfg.lambda = 1;
  CHECK_THROWS_AS(rsw_harness(lattice, cfg), InvalidArgument);
  const std::string csv = rsw_csv(rows2);
  CHECK(csv.find("delta,N,lambda,angle") == 0);
}
