#include <doctest.h>

#include <cmath>

#include "mesoperc/domains.hpp"
#include "mesoperc/error.hpp"
#include "mesoperc/lattices.hpp"
#include "mesoperc/mesh_io.hpp"
#include "mesoperc/packing.hpp"
#include "mesoperc/subdivision.hpp"

using namespace mesoperc;

namespace {

void check_tangency(const Triangulation& t, const CirclePacking& cp, double tol) {
  for (int f = 0; f < t.face_count(); ++f) {
    for (int k = 0; k < 3; ++k) {
      const int u = t.face(f)[k], v = t.face(f)[(k + 1) % 3];
      const double d = std::abs(cp.face_corners[f][(k + 1) % 3] - cp.face_corners[f][k]);
      CHECK(std::abs(d - cp.radii[u] - cp.radii[v]) < tol);
    }
  }
}

EmbeddedMesh fig1_disk(int N) {
  const EmbeddedMesh f1 = fig1_torus();
  // A disk cut from two copies of the fundamental domain, refined.
  std::vector<Face> faces;
  std::vector<Point> pos;
  const EmbeddedMesh fine = refine(f1.triangulation, f1.embedding, N);
  for (int f = 0; f < fine.triangulation.face_count(); ++f) {
    const auto c = fine.embedding.face_corners(fine.triangulation, f);
    const Point bc = (c[0] + c[1] + c[2]) / 3.0;
    if (bc.real() < 0.05 || bc.real() > 0.95 || bc.imag() < 0.05 || bc.imag() > 0.95) continue;
    Face nf{};
    for (int k = 0; k < 3; ++k) {
      nf[k] = static_cast<int>(pos.size());
      pos.push_back(c[k]);
    }
    faces.push_back(nf);
  }
  // Weld coincident corners.
  std::vector<int> id(pos.size());
  std::vector<Point> uniq;
  for (std::size_t i = 0; i < pos.size(); ++i) {
    int found = -1;
    for (std::size_t j = 0; j < uniq.size(); ++j) {
      if (std::abs(uniq[j] - pos[i]) < 1e-9) found = static_cast<int>(j);
    }
    if (found < 0) {
      found = static_cast<int>(uniq.size());
      uniq.push_back(pos[i]);
    }
    id[i] = found;
  }
  for (Face& f : faces) {
    for (int& v : f) v = id[v];
  }
  return extract_disk(faces, uniq).mesh;
}

}  // namespace

TEST_CASE("angle sums from radii") {
  CHECK(6 * tangent_angle(1, 1, 1) == doctest::Approx(2 * kPi).epsilon(1e-15));
  CHECK(tangent_angle(2, 2, 2) == doctest::Approx(kPi / 3).epsilon(1e-15));
  // Law of cosines oracle on the triangle of centres.
  const double r = 0.7, ru = 1.3, rw = 0.4;
  const double a = r + ru, b = r + rw, c = ru + rw;
  CHECK(tangent_angle(r, ru, rw) == doctest::Approx(std::acos((a * a + b * b - c * c) / (2 * a * b))).epsilon(1e-14));
  // Derivative in log r_u equals inradius / (r + r_u).
  const double h = 1e-6;
  const double fd = (tangent_angle(r, ru * std::exp(h), rw) - tangent_angle(r, ru * std::exp(-h), rw)) / (2 * h);
  const double rho = std::sqrt(r * ru * rw / (r + ru + rw));
  CHECK(fd == doctest::Approx(rho / (r + ru)).epsilon(1e-8));
}

TEST_CASE("regular patch with uniform boundary radii") {
  const QuadDomain q = triangular_rhombus(8);
  const auto& t = q.marked.triangulation;
  const RadiusSolution sol = solve_radii(disk_problem(t, std::vector<double>(t.vertex_count(), 0.5)));
  for (double r : sol.radii) CHECK(r == doctest::Approx(0.5).epsilon(1e-12));
  const CirclePacking cp = layout(t, sol.radii, &q.embedding);
  // Packing of the regular lattice is the lattice itself: psi is the identity.
  for (int v = 0; v < t.vertex_count(); ++v) CHECK(std::abs(cp.centers[v] - q.embedding.positions[v]) < 1e-12);
  const PiecewiseLinearMap psi = psi_map(cp, t, q.embedding);
  CHECK(std::abs(psi(Point{0.37, 0.21}) - Point{0.37, 0.21}) < 1e-12);
  CHECK_THROWS_AS(psi(Point{5, 5}), InvalidArgument);
}

TEST_CASE("layout geometry") {
  MeshData m;
  m.connectivity.topology = Topology::disk;
  m.positions = {Point{0, 0}, Point{1, 0}, Point{1, 1}, Point{0, 1}};
  m.connectivity.vertex_count = 4;
  m.connectivity.faces = {{0, 1, 2}, {0, 2, 3}};
  const EmbeddedMesh sq = build_embedded(m);
  const std::vector<double> radii{1, 2, 1, 2};
  LayoutOptions raw;
  raw.pins = std::make_pair(0, 1);
  raw.pin_targets = std::make_pair(Point{0, 0}, Point{3, 0});
  const CirclePacking cp = layout(sq.triangulation, radii, nullptr, raw);
  CHECK(std::abs(cp.centers[1] - cp.centers[0]) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(cp.radii[0] == doctest::Approx(1.0).epsilon(1e-15));
  check_tangency(sq.triangulation, cp, 1e-12);
}

TEST_CASE("disk packing of an irregular domain") {
  const EmbeddedMesh d = fig1_disk(3);
  const auto& t = d.triangulation;
  std::vector<double> br(t.vertex_count(), 1.0);
  const RadiusSolution sol = solve_radii(disk_problem(t, br));
  CHECK(sol.residual < 1e-10);
  const auto res = angle_residuals(disk_problem(t, br), sol.radii);
  for (double e : res) CHECK(std::abs(e) < 1e-10);
  const CirclePacking cp = layout(t, sol.radii, &d.embedding);
  check_tangency(t, cp, 1e-9);
  // Disjoint interiors for non-adjacent pairs.
  for (int u = 0; u < t.vertex_count(); ++u) {
    const auto nb = t.neighbors(u);
    for (int v = u + 1; v < t.vertex_count(); ++v) {
      if (std::find(nb.begin(), nb.end(), v) != nb.end()) continue;
      CHECK(std::abs(cp.centers[u] - cp.centers[v]) >= cp.radii[u] + cp.radii[v] - 1e-9);
    }
  }
  // Another traversal root gives the same normalized packing.
  LayoutOptions other;
  other.root_face = t.face_count() / 2;
  const CirclePacking cp2 = layout(t, sol.radii, &d.embedding, other);
  for (int v = 0; v < t.vertex_count(); ++v) CHECK(std::abs(cp.centers[v] - cp2.centers[v]) < 1e-10);
  // psi interpolates at vertices and barycentres.
  const PiecewiseLinearMap psi = psi_map(cp, t, d.embedding);
  for (int v = 0; v < t.vertex_count(); v += 7) CHECK(std::abs(psi(d.embedding.positions[v]) - cp.centers[v]) < 1e-10);
  for (int f = 0; f < t.face_count(); f += 5) {
    const auto c = d.embedding.face_corners(t, f);
    const Face& fc = t.face(f);
    const Point want = (cp.centers[fc[0]] + cp.centers[fc[1]] + cp.centers[fc[2]]) / 3.0;
    CHECK(std::abs(psi((c[0] + c[1] + c[2]) / 3.0) - want) < 1e-10);
  }
  // Scaling covariance.
  std::vector<double> br3(t.vertex_count(), 3.0);
  const RadiusSolution sol3 = solve_radii(disk_problem(t, br3));
  for (int v = 0; v < t.vertex_count(); ++v) CHECK(sol3.radii[v] == doctest::Approx(3.0 * sol.radii[v]).epsilon(1e-9));
}

TEST_CASE("radius sweeps do not increase the residual") {
  for (const std::string name : {"fig1", "symmetric90"}) {
    const EmbeddedMesh m = builtin_lattice(name);
    const EmbeddedMesh fine = refine(m.triangulation, m.embedding, 4);
    RadiusOptions opt;
    opt.newton = false;
    opt.tol = 1e-9;
    const RadiusSolution sol = solve_radii(torus_problem(fine.triangulation), opt);
    REQUIRE(sol.sweep_max_residual.size() >= 2);
    for (std::size_t i = 1; i < sol.sweep_max_residual.size(); ++i) {
      CHECK(sol.sweep_max_residual[i] <= sol.sweep_max_residual[i - 1] * (1 + 1e-12) + 1e-15);
      CHECK(sol.sweep_l1_residual[i] <= sol.sweep_l1_residual[i - 1] * (1 + 1e-12) + 1e-15);
    }
  }
  const EmbeddedMesh d = fig1_disk(3);
  RadiusOptions opt;
  opt.newton = false;
  const RadiusSolution sol =
      solve_radii(disk_problem(d.triangulation, std::vector<double>(d.triangulation.vertex_count(), 1.0)), opt);
  for (std::size_t i = 1; i < sol.sweep_max_residual.size(); ++i) {
    CHECK(sol.sweep_max_residual[i] <= sol.sweep_max_residual[i - 1] * (1 + 1e-12) + 1e-15);
  }
}

TEST_CASE("non-convergence reports the residual") {
  const EmbeddedMesh m = fig1_torus();
  RadiusOptions opt;
  opt.newton = false;
  opt.max_iter = 2;
  CHECK_THROWS_AS(solve_radii(torus_problem(m.triangulation), opt), NonConvergence);
}

TEST_CASE("torus periods") {
  const EmbeddedMesh reg = square_diagonal_torus(3);
  const EmbeddedMesh sym = union_jack_torus(3);
  for (int N : {1, 2, 4, 8}) {
    CHECK(std::abs(torus_period(reg.triangulation, reg.embedding, N) - kTau) < 1e-10);
    CHECK(std::abs(torus_period(sym.triangulation, sym.embedding, N) - Point{0, 1}) < 1e-10);
  }
  const EmbeddedMesh eq = equilateral_torus(3, 6);
  CHECK(std::abs(torus_period(eq.triangulation, eq.embedding, 2) - 2.0 * std::polar(1.0, kPi / 3)) < 1e-10);

  // fig1: stabilising sequence.
  const EmbeddedMesh f1 = fig1_torus();
  std::vector<Point> tau;
  for (int N : {4, 8, 16, 32}) tau.push_back(torus_period(f1.triangulation, f1.embedding, N));
  for (std::size_t i = 2; i < tau.size(); ++i) CHECK(std::abs(tau[i] - tau[i - 1]) < std::abs(tau[i - 1] - tau[i - 2]));
  CHECK(tau.back().imag() > 0);
}

TEST_CASE("torus packing and psi") {
  const EmbeddedMesh f1 = fig1_torus();
  const EmbeddedMesh fine = refine(f1.triangulation, f1.embedding, 16);
  const RadiusSolution sol = solve_radii(torus_problem(fine.triangulation));
  CHECK(sol.residual < 1e-10);
  CHECK(sol.radii.size() == 11u * 256u);
  const CirclePacking cp = layout(fine.triangulation, sol.radii, &fine.embedding);
  check_tangency(fine.triangulation, cp, 1e-9);
  LayoutOptions other;
  other.root_face = 1234;
  const CirclePacking cp2 = layout(fine.triangulation, sol.radii, &fine.embedding, other);
  CHECK(std::abs(*cp.tau - *cp2.tau) < 1e-12);
  const PiecewiseLinearMap psi = psi_map(cp, fine.triangulation, fine.embedding);
  CHECK(std::abs(psi(Point{0, 0})) < 1e-12);
  CHECK(std::abs(psi(Point{1, 0}) - 1.0) < 1e-10);
  CHECK(std::abs(psi(Point{0, 1}) - *cp.tau) < 1e-10);
  const Point z{0.3141, 0.2718};
  CHECK(std::abs(psi(z + Point{2, -1}) - psi(z) - 2.0 + *cp.tau) < 1e-10);
  const auto j = packing_to_json(cp);
  CHECK(j["vertices"].size() == cp.radii.size());
}
