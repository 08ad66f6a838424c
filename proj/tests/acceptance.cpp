// Acceptance runs. One PASS/FAIL line per criterion; arguments select criteria
// by number (default: all). Exit status is the number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "mesoperc/beltrami.hpp"
#include "mesoperc/conformal.hpp"
#include "mesoperc/domains.hpp"
#include "mesoperc/lattices.hpp"
#include "mesoperc/mesoscopic.hpp"
#include "mesoperc/packing.hpp"
#include "mesoperc/percolation.hpp"
#include "mesoperc/subdivision.hpp"
#include "oracles.hpp"

using namespace mesoperc;
using namespace mesoperc::testing;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

const std::array<Point, 4> kWindowCorners{Point{1.5, 0}, Point{1.5, 1}, Point{0, 1}, Point{0, 0}};
const Rect kWindow{0, 0, 1.5, 1};

QuadDomain fig1_quad() {
  const EmbeddedMesh f1 = fig1_torus();
  MesoscopicLattice m = build_mesoscopic(f1.triangulation, f1.embedding, 1.0, 1, kWindow);
  return mark_quad(std::move(m.coarse), kWindowCorners);
}

QuadDomain k7_quad() {
  const EmbeddedMesh k7 = k7_torus();
  MesoscopicLattice m = build_mesoscopic(k7.triangulation, k7.embedding, 1.0, 1, kWindow);
  return mark_quad(std::move(m.coarse), kWindowCorners);
}

// Modulus of the fig1 quad up to level 8, shared by AC2 and AC4.
const ModulusResult& fig1_modulus() {
  static const ModulusResult r = modulus(fig1_quad().marked, 8);
  return r;
}

std::vector<Point> centroids(const Triangulation& t, const Embedding& e) {
  std::vector<Point> c(t.face_count());
  for (int f = 0; f < t.face_count(); ++f) {
    const Face& fc = t.face(f);
    c[f] = (e.positions[fc[0]] + e.positions[fc[1]] + e.positions[fc[2]]) / 3.0;
  }
  return c;
}

bool strictly_decreasing(const std::vector<double>& x) {
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (!(x[i] < x[i - 1])) return false;
  }
  return true;
}

std::string list(const std::vector<double>& x, const char* f = "%.3g") {
  std::string s;
  for (double v : x) s += (s.empty() ? "" : ", ") + fmt(f, v);
  return "[" + s + "]";
}

Outcome ac1() {
  const QuadDomain q = triangular_rhombus(100);
  const CrossingEstimate e = crossing_probability(q.marked.triangulation, crossing_spec(q.marked), 100000, 101);
  const double gap = std::abs(e.estimate - 0.5);
  return {gap < 0.01, fmt("rhombus L=100: p = %.5f +/- %.5f, |p - 0.5| = %.5f (< 0.01)", e.estimate,
                          e.half_width, gap)};
}

Outcome ac2() {
  const ModulusResult& r = fig1_modulus();
  const double rho6 = r.level_rho[6], rho7 = r.level_rho[7], rho8 = r.level_rho[8];
  const double step = std::abs(rho8 - rho7);
  const QuadDomain q = fig1_quad();
  MarkedRectangleDomain fine = q.marked;
  fine.triangulation = subdivide_times(q.marked.triangulation, 8);
  const CrossingEstimate e = crossing_probability(fine.triangulation, crossing_spec(fine), 100000, 102);
  const double target = cardy(rho8);
  const double gap = std::abs(e.estimate - target);
  return {step < 0.005 && gap < 0.02,
          fmt("rho_6,7,8 = %.6f, %.6f, %.6f, |rho_8 - rho_7| = %.2e (< 0.005); G^(8) with %d vertices: "
              "p = %.5f +/- %.5f vs cardy %.5f, gap %.5f (< 0.02)",
              rho6, rho7, rho8, step, fine.triangulation.vertex_count(), e.estimate, e.half_width, target, gap)};
}

Outcome ac3() {
  const EmbeddedMesh f1 = fig1_torus();
  const double delta = 1.0 / 8;
  const MesoscopicLattice coarse = build_mesoscopic(f1.triangulation, f1.embedding, delta, 1, kWindow);
  const QuadDomain cq = mark_quad(coarse.coarse, kWindowCorners);
  // T_{delta,N} refines each cell like G^(log2 N); level 6 sits above the finest N.
  const ModulusResult r = modulus(cq.marked, 6);
  const double target = cardy(r.rho);
  std::vector<double> dist;
  std::string runs;
  std::uint64_t seed = 103;
  for (int N : {8, 16, 32}) {
    MesoscopicLattice m = build_mesoscopic(f1.triangulation, f1.embedding, delta, N, kWindow);
    const int id_limit = m.coarse.triangulation.vertex_count();
    const QuadDomain q = mark_quad(std::move(m.fine), kWindowCorners, id_limit);
    if (q.marked.a != cq.marked.a || q.marked.b != cq.marked.b || q.marked.c != cq.marked.c ||
        q.marked.d != cq.marked.d) {
      return {false, fmt("marks on T_{1/8,%d} differ from the coarse marks", N)};
    }
    const CrossingEstimate e = crossing_probability(q.marked.triangulation, crossing_spec(q.marked), 100000, seed++);
    dist.push_back(std::abs(e.estimate - target));
    runs += fmt(" N=%d (%d vertices): %.5f +/- %.5f;", N, q.marked.triangulation.vertex_count(), e.estimate,
                e.half_width);
  }
  const bool monotone = dist[1] <= dist[0] && dist[2] <= dist[1];
  return {monotone && dist[2] < 0.03,
          fmt("rho = %.6f (|rho_6 - rho_5| = %.1e), cardy %.5f;", r.rho, r.error_estimate, target) + runs +
              " distances " + list(dist, "%.5f") + " non-increasing, last < 0.03"};
}

Outcome ac4() {
  const ModulusResult& a = fig1_modulus();
  const ModulusResult b = modulus(k7_quad().marked, 8);
  std::vector<double> da, db;
  for (int n = 3; n < 8; ++n) {
    da.push_back(std::abs(a.level_rho[n + 1] - a.level_rho[n]));
    db.push_back(std::abs(b.level_rho[n + 1] - b.level_rho[n]));
  }
  return {strictly_decreasing(da) && strictly_decreasing(db),
          "|rho_{n+1} - rho_n|, n = 3..7: fig1 " + list(da) + ", k7 " + list(db)};
}

Outcome ac5() {
  double worst_eq = std::abs(beltrami(Point{1, 0}, kTau, kTau * kTau));
  std::mt19937_64 rng(105);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int k = 0; k < 1000; ++k) {
    const Point a{u(rng), u(rng)}, s{0.1 + std::abs(u(rng)), 0};
    const Point rot = std::polar(1.0, 3.0 * u(rng));
    const Point w = std::polar(1.0, kPi / 3);
    worst_eq = std::max(worst_eq, std::abs(beltrami(a, a + rot * s, a + rot * s * w)));
  }
  double worst_cyclic = 0;
  for (int k = 0; k < 1000; ++k) {
    Point a{u(rng), u(rng)}, b{u(rng), u(rng)}, c{u(rng), u(rng)};
    if (signed_area(a, b, c) < 0) std::swap(b, c);
    if (signed_area(a, b, c) < 1e-3) continue;
    const Point mu = beltrami(a, b, c);
    worst_cyclic = std::max({worst_cyclic, std::abs(mu - beltrami(b, c, a)), std::abs(mu - beltrami(c, a, b))});
  }
  const Point expected{0.0, 2.0 - std::sqrt(3.0)};
  const double oracle_gap = std::abs(linear_map_mu(0, 1, Point{0, 1}) - expected);
  const double gap = std::abs(beltrami(0, 1, Point{0, 1}) - expected);
  return {worst_eq <= 1e-14 && worst_cyclic <= 1e-14 && gap <= 1e-12 && oracle_gap <= 1e-12,
          fmt("equilateral |mu| <= %.1e, cyclic spread %.1e, mu(0,1,i) off by %.1e (oracle %.1e)", worst_eq,
              worst_cyclic, gap, oracle_gap)};
}

Outcome ac6() {
  double worst = 0;
  std::string worst_at;
  for (const std::string& name : builtin_lattice_names()) {
    const EmbeddedMesh lattice = builtin_lattice(name);
    for (int N : {1, 2, 4, 8, 16, 32}) {
      const Triangulation t = refine(lattice.triangulation, N);
      const RadiusSolution s = solve_radii(torus_problem(t));
      if (s.residual >= worst) {
        worst = s.residual;
        worst_at = fmt("%s N=%d", name.c_str(), N);
      }
    }
  }
  const EmbeddedMesh sym = builtin_lattice("symmetric90"), reg = builtin_lattice("regular");
  const double gap_sym = std::abs(torus_period(sym.triangulation, sym.embedding, 8) - Point{0, 1});
  const double gap_reg = std::abs(torus_period(reg.triangulation, reg.embedding, 8) - kTau);
  const EmbeddedMesh f1 = fig1_torus();
  std::vector<Point> tau;
  for (int N : {4, 8, 16, 32}) tau.push_back(torus_period(f1.triangulation, f1.embedding, N));
  std::vector<double> steps;
  for (std::size_t i = 1; i < tau.size(); ++i) steps.push_back(std::abs(tau[i] - tau[i - 1]));
  return {worst < 1e-10 && gap_sym < 1e-2 && gap_reg < 1e-2 && strictly_decreasing(steps),
          fmt("worst residual %.1e (%s); |tau - i| = %.1e on symmetric90, |tau - e^{2pi i/3}| = %.1e on regular; "
              "fig1 tau(32) = %.6f%+.6fi, ",
              worst, worst_at.c_str(), gap_sym, gap_reg, tau.back().real(), tau.back().imag()) +
              "|tau(N) - tau(2N)|, N = 4, 8, 16: " + list(steps)};
}

Outcome ac7() {
  const std::vector<std::pair<std::string, TriangleDomain>> domains{{"triangle L=2", triangular_triangle(2)},
                                                                    {"fig1 patch", small_fig1_triangle()}};
  bool ok = true;
  std::string detail;
  for (const auto& [name, d] : domains) {
    const ColorSwitchReport r = color_switch_check(d.marked);
    ok = ok && r.exhaustive && r.faces_checked > 0 && r.max_ab == 0 && r.max_ac == 0;
    detail += fmt("%s%s (%d vertices, %d faces): max |Pa - Pb| = %g, max |Pa - Pc| = %g", detail.empty() ? "" : "; ",
                  name.c_str(), d.marked.triangulation.vertex_count(), r.faces_checked, r.max_ab, r.max_ac);
  }
  return {ok, detail};
}

Outcome ac8() {
  const std::vector<std::pair<std::string, TriangleDomain>> domains{{"triangle L=2", triangular_triangle(2)},
                                                                    {"triangle L=3", triangular_triangle(3)},
                                                                    {"triangle L=4", triangular_triangle(4)},
                                                                    {"fig1 patch", small_fig1_triangle()}};
  std::int64_t checked = 0, mismatches = 0;
  std::string names;
  for (const auto& [name, d] : domains) {
    const Triangulation& t = d.marked.triangulation;
    const int nv = t.vertex_count();
    if (nv > 20) return {false, name + " has more than 20 vertices"};
    const SeparationKernel kernel(d.marked);
    for (Mark x : {Mark::a, Mark::b, Mark::c}) {
      const SeparationOracle oracle(d.marked, x);
      std::vector<std::uint8_t> event;
      for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << nv); ++bits) {
        const auto black = coloring(nv, bits);
        kernel.evaluate(black, x, event);
        mismatches += event != oracle.evaluate(black);
        ++checked;
      }
    }
    names += fmt("%s%s (%d)", names.empty() ? "" : ", ", name.c_str(), nv);
  }
  return {mismatches == 0, fmt("%lld of %lld colouring/mark pairs disagree on ", static_cast<long long>(mismatches),
                               static_cast<long long>(checked)) +
                               names};
}

// 2 x signed area of the closed polygon, summed exactly and rounded once.
double exact_twice_area(const std::vector<Point>& ring) {
  using boost::multiprecision::cpp_rational;
  cpp_rational sum = 0;
  for (std::size_t k = 0; k + 1 < ring.size(); ++k) {
    sum += cpp_rational(ring[k].real()) * cpp_rational(ring[k + 1].imag()) -
           cpp_rational(ring[k + 1].real()) * cpp_rational(ring[k].imag());
  }
  return sum.convert_to<double>();
}

Outcome ac9() {
  const Point center{0.5, std::sqrt(3.0) / 6};
  const double radius = 0.2;
  bool exact = true;
  {
    const TriangleDomain d = triangular_triangle(20);
    const Triangulation& t = d.marked.triangulation;
    // Centroids on a 2^-20 grid, so that affine images of them are representable.
    std::vector<Point> phi = centroids(t, d.embedding);
    for (Point& z : phi) z = Point{std::round(z.real() * 0x1p20), std::round(z.imag() * 0x1p20)} / 0x1p20;
    const std::vector<int> chain = contour_ring(t, d.embedding, center, radius);
    const std::vector<Point> constant(t.face_count(), Point{0.3, -1.7});
    std::vector<Point> linear(t.face_count()), conj(t.face_count());
    for (int f = 0; f < t.face_count(); ++f) {
      linear[f] = Point{2, -1} * phi[f] + Point{0.25, 3};
      conj[f] = std::conj(phi[f]);
    }
    std::vector<Point> ring;
    for (int f : chain) ring.push_back(phi[f]);
    exact = contour_integral(t, constant, phi, chain) == Point{0, 0} &&
            contour_integral(t, linear, phi, chain) == Point{0, 0} &&
            contour_integral(t, conj, phi, chain) == Point{0, exact_twice_area(ring)};
  }
  // 10^5 trials as ten seeded batches; I is linear in H, so the pooled value is
  // the batch mean and the batches give its standard error.
  constexpr int kBatches = 10;
  std::vector<double> mags;
  std::string detail;
  for (int L : {20, 40, 80}) {
    const TriangleDomain d = triangular_triangle(L);
    const Triangulation& t = d.marked.triangulation;
    const std::vector<Point> phi = centroids(t, d.embedding);
    const std::vector<int> chain = contour_ring(t, d.embedding, center, radius);
    std::vector<Point> batch;
    Point mean{0, 0};
    for (int b = 0; b < kBatches; ++b) {
      const ObservableField H = estimate_H(d.marked, 100000 / kBatches, 10900 + 10 * L + b);
      std::vector<Point> h(t.face_count());
      for (int f = 0; f < t.face_count(); ++f) h[f] = H.H(f);
      batch.push_back(contour_integral(t, h, phi, chain));
      mean += batch.back() / static_cast<double>(kBatches);
    }
    double var = 0;
    for (const Point& z : batch) var += std::norm(z - mean) / (kBatches - 1);
    mags.push_back(std::abs(mean));
    detail += fmt("%s1/%d: %.2e (se %.1e)", detail.empty() ? "" : ", ", L, std::abs(mean), std::sqrt(var / kBatches));
  }
  return {exact && strictly_decreasing(mags),
          std::string(exact ? "constant, linear and conj(z) sums exact" : "an exact identity failed") +
              "; |I| by mesh, 10^5 trials each: " + detail + "; strictly decreasing required"};
}

Outcome ac10() {
  bool ok = true;
  double lo = 1, hi = 0, hw = 0;
  std::uint64_t seed = 110;
  for (const std::string name : {"regular", "fig1"}) {
    RswConfig cfg;
    cfg.deltas = {1.0 / 8, 1.0 / 16, 1.0 / 32};
    cfg.Ns = {2, 2, 2};
    cfg.lambda = 2;
    cfg.angles = {0.0, kPi / 2};
    cfg.trials = 20000;
    cfg.seed = seed++;
    for (const RswRow& r : rsw_harness(builtin_lattice(name), cfg)) {
      const double p = r.estimate.estimate;
      ok = ok && p >= 0.05 && p <= 0.95 && r.estimate.half_width < 0.01;
      lo = std::min(lo, p);
      hi = std::max(hi, p);
      hw = std::max(hw, r.estimate.half_width);
    }
  }
  return {ok, fmt("regular and fig1, 3 scales x 2 orientations: estimates in [%.4f, %.4f], half-width <= %.4f", lo,
                  hi, hw)};
}

Outcome ac11() {
  const TriangleDomain dom = triangular_triangle(2);
  EmbeddedMesh mesh{dom.marked.triangulation, dom.embedding};
  for (int k = 0; k < 5; ++k) mesh = subdivide(mesh.triangulation, mesh.embedding);
  const MarkedTriangleDomain fine{mesh.triangulation, dom.marked.a, dom.marked.b, dom.marked.c};
  const PredictedField pred = predict_H(dom.marked, 5);
  const ObservableField H = estimate_H(fine, 100000, 111);
  // Sample: the faces holding the interior points of the barycentric grid of step 1/8.
  const std::vector<Point> c = centroids(mesh.triangulation, mesh.embedding);
  const Point A = mesh.embedding.positions[fine.a], B = mesh.embedding.positions[fine.b],
              C = mesh.embedding.positions[fine.c];
  double worst = 0;
  int sampled = 0;
  for (int i = 1; i < 8; ++i) {
    for (int j = 1; i + j < 8; ++j) {
      const Point z = (static_cast<double>(i) * A + static_cast<double>(j) * B + static_cast<double>(8 - i - j) * C) / 8.0;
      int best = 0;
      for (int f = 1; f < mesh.triangulation.face_count(); ++f) {
        if (std::abs(c[f] - z) < std::abs(c[best] - z)) best = f;
      }
      worst = std::max(worst, std::abs(H.H(best) - pred.face_h[best]));
      ++sampled;
    }
  }
  double worst_all = 0;
  for (int f = 0; f < mesh.triangulation.face_count(); ++f) {
    worst_all = std::max(worst_all, std::abs(H.H(f) - pred.face_h[f]));
  }
  return {worst < 0.05, fmt("mesh 1/64, %d sampled faces: max |H - h| = %.4f (< 0.05); over all %d faces %.4f",
                            sampled, worst, mesh.triangulation.face_count(), worst_all)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, std::function<Outcome()>> criteria{{1, ac1}, {2, ac2},  {3, ac3},  {4, ac4},
                                                         {5, ac5}, {6, ac6},  {7, ac7},  {8, ac8},
                                                         {9, ac9}, {10, ac10}, {11, ac11}};
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if (a.rfind("AC", 0) == 0) a = a.substr(2);
    const int k = std::atoi(a.c_str());
    if (!criteria.count(k)) {
      std::fprintf(stderr, "unknown criterion '%s'\n", argv[i]);
      return 64;
    }
    selected.push_back(k);
  }
  if (selected.empty()) {
    for (const auto& [k, f] : criteria) selected.push_back(k);
  }
  int failures = 0;
  for (int k : selected) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria.at(k)();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("AC%d %s  %s  [%.1f s]\n", k, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += !o.pass;
  }
  return failures;
}
