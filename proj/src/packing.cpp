#include "mesoperc/packing.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>

#include "mesoperc/error.hpp"
#include "mesoperc/sparse.hpp"
#include "mesoperc/subdivision.hpp"

namespace mesoperc {

namespace {

constexpr double kTwoPi = 2.0 * kPi;

// For each vertex v, the other two corners (u, w) of every incident face, in face order v -> u -> w.
struct CornerLists {
  std::vector<int> offset;
  std::vector<std::array<int, 2>> others;

  explicit CornerLists(const Triangulation& t) : offset(t.vertex_count() + 1, 0) {
    for (const Face& f : t.faces()) {
      for (int v : f) ++offset[v + 1];
    }
    std::partial_sum(offset.begin(), offset.end(), offset.begin());
    others.resize(offset.back());
    std::vector<int> fill(offset.begin(), offset.end() - 1);
    for (const Face& f : t.faces()) {
      for (int k = 0; k < 3; ++k) others[fill[f[k]]++] = {f[(k + 1) % 3], f[(k + 2) % 3]};
    }
  }
};

double inradius(double a, double b, double c) { return std::sqrt(a * b * c / (a + b + c)); }

double vertex_angle_sum(const CornerLists& cl, const std::vector<double>& r, int v, double rv) {
  double s = 0;
  for (int k = cl.offset[v]; k < cl.offset[v + 1]; ++k) s += tangent_angle(rv, r[cl.others[k][0]], r[cl.others[k][1]]);
  return s;
}

// Solve angle_sum(v) = 2 pi for r_v with the neighbours fixed.
double local_solve(const CornerLists& cl, const std::vector<double>& r, int v) {
  const int k = cl.offset[v + 1] - cl.offset[v];
  double rv = r[v];
  const double theta = vertex_angle_sum(cl, r, v, rv);
  // Uniform-neighbour estimate.
  const double beta = std::sin(theta / (2.0 * k));
  const double delta = std::sin(kPi / k);
  const double rhat = rv * beta / (1.0 - beta);
  double x = std::log(rhat * (1.0 - delta) / delta);
  if (!std::isfinite(x)) x = std::log(rv);
  double lo = -INFINITY, hi = INFINITY;
  for (int it = 0; it < 100; ++it) {
    const double r0 = std::exp(x);
    double g = -kTwoPi, dg = 0;
    for (int j = cl.offset[v]; j < cl.offset[v + 1]; ++j) {
      const double ru = r[cl.others[j][0]], rw = r[cl.others[j][1]];
      g += tangent_angle(r0, ru, rw);
      const double rho = inradius(r0, ru, rw);
      dg -= rho / (r0 + ru) + rho / (r0 + rw);
    }
    if (g == 0) break;
    if (g > 0) {
      lo = std::max(lo, x);
    } else {
      hi = std::min(hi, x);
    }
    double nx = x - g / dg;
    if (!(nx > lo && nx < hi) || !std::isfinite(nx)) {
      if (std::isfinite(lo) && std::isfinite(hi)) {
        nx = 0.5 * (lo + hi);
      } else {
        nx = g > 0 ? x + 1.0 : x - 1.0;
      }
    }
    if (std::abs(nx - x) < 1e-16 * std::max(1.0, std::abs(x))) {
      x = nx;
      break;
    }
    x = nx;
  }
  return std::exp(x);
}

struct ResidualStats {
  double max = 0, l1 = 0, l2 = 0;
};

ResidualStats stats(const std::vector<double>& e) {
  ResidualStats s;
  for (double x : e) {
    s.max = std::max(s.max, std::abs(x));
    s.l1 += std::abs(x);
    s.l2 += x * x;
  }
  s.l2 = std::sqrt(s.l2);
  return s;
}

std::vector<double> residuals_with(const CornerLists& cl, const std::vector<char>& free, const std::vector<double>& r) {
  std::vector<double> e(r.size(), 0.0);
  for (std::size_t v = 0; v < r.size(); ++v) {
    if (free[v]) e[v] = vertex_angle_sum(cl, r, static_cast<int>(v), r[v]) - kTwoPi;
  }
  return e;
}

// One damped Newton step on log-radii; false if no decrease of the residual norm.
bool newton_step(const Triangulation& t, const CornerLists& cl, const std::vector<char>& free, bool torus,
                 std::vector<double>& r) {
  const int nv = t.vertex_count();
  const std::vector<double> e = residuals_with(cl, free, r);
  const double before = stats(e).l2;

  // Weighted Laplacian over free vertices: w_uv = sum over faces of inradius / (r_u + r_v).
  std::vector<std::map<int, double>> rows(nv);
  for (const Face& f : t.faces()) {
    const double rho = inradius(r[f[0]], r[f[1]], r[f[2]]);
    for (int k = 0; k < 3; ++k) {
      const int u = f[k], v = f[(k + 1) % 3];
      const double w = rho / (r[u] + r[v]);
      if (free[u]) {
        rows[u][u] += w;
        if (free[v]) rows[u][v] -= w;
      }
      if (free[v]) {
        rows[v][v] += w;
        if (free[u]) rows[v][u] -= w;
      }
    }
  }
  std::vector<int> index(nv, -1);
  int n = 0;
  for (int v = 0; v < nv; ++v) {
    if (free[v]) index[v] = n++;
  }
  CsrMatrix A;
  A.n = n;
  A.row_ptr.push_back(0);
  std::vector<double> b(n);
  for (int v = 0; v < nv; ++v) {
    if (!free[v]) continue;
    for (const auto& [u, w] : rows[v]) {
      A.col.push_back(index[u]);
      A.val.push_back(w);
    }
    A.row_ptr.push_back(static_cast<int>(A.col.size()));
    b[index[v]] = e[v];
  }
  auto project = [&](std::vector<double>& x) {
    if (!torus) return;
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    for (double& y : x) y -= mean;
  };
  std::vector<double> delta(n, 0.0);
  pcg(A, b, delta, jacobi_preconditioner(A), 1e-13, 20 * n + 100, torus ? std::function<void(std::vector<double>&)>(project)
                                                                          : std::function<void(std::vector<double>&)>());
  std::vector<double> trial(nv);
  for (double step = 1.0; step >= 1.0 / 64; step *= 0.5) {
    for (int v = 0; v < nv; ++v) trial[v] = free[v] ? r[v] * std::exp(step * delta[index[v]]) : r[v];
    if (stats(residuals_with(cl, free, trial)).l2 < before) {
      r = trial;
      return true;
    }
  }
  return false;
}

}  // namespace

double tangent_angle(double r, double ru, double rw) { return 2.0 * std::atan(std::sqrt(ru * rw / (r * (r + ru + rw)))); }

double angle_sum(const Triangulation& t, const std::vector<double>& radii, int v) {
  double s = 0;
  for (int h : t.outgoing(v)) {
    s += tangent_angle(radii[v], radii[t.target(h)], radii[t.origin(Triangulation::prev(h))]);
  }
  return s;
}

PackingProblem torus_problem(const Triangulation& t) {
  if (!t.is_torus()) throw InvalidArgument("torus_problem needs a torus triangulation");
  return PackingProblem{&t, {}};
}

PackingProblem disk_problem(const Triangulation& t, std::vector<double> boundary_radii) {
  if (t.is_torus()) throw InvalidArgument("disk_problem needs a disk triangulation");
  if (static_cast<int>(boundary_radii.size()) != t.vertex_count()) {
    throw InvalidArgument("boundary radii must be indexed by vertex");
  }
  for (int v : t.boundary()) {
    if (!(boundary_radii[v] > 0)) throw InvalidArgument("boundary radii must be positive");
  }
  return PackingProblem{&t, std::move(boundary_radii)};
}

std::vector<double> angle_residuals(const PackingProblem& p, const std::vector<double>& radii) {
  const Triangulation& t = *p.triangulation;
  std::vector<double> e(t.vertex_count(), 0.0);
  for (int v = 0; v < t.vertex_count(); ++v) {
    if (t.is_torus() || !t.is_boundary_vertex(v)) e[v] = angle_sum(t, radii, v) - kTwoPi;
  }
  return e;
}

RadiusSolution solve_radii(const PackingProblem& p, const RadiusOptions& opt) {
  if (p.triangulation == nullptr) throw InvalidArgument("packing problem has no triangulation");
  if (!(opt.tol > 0)) throw InvalidArgument("tolerance must be positive");
  const Triangulation& t = *p.triangulation;
  const bool torus = t.is_torus();
  const int nv = t.vertex_count();
  const CornerLists cl(t);
  std::vector<char> free(nv, 1);
  std::vector<double> r(nv, 1.0);
  if (!torus) {
    double mean = 0;
    for (int v : t.boundary()) {
      free[v] = 0;
      mean += p.boundary_radii[v];
    }
    mean /= static_cast<double>(t.boundary().size());
    for (int v = 0; v < nv; ++v) r[v] = free[v] ? mean : p.boundary_radii[v];
  }
  if (!opt.initial.empty()) {
    if (static_cast<int>(opt.initial.size()) != nv) throw InvalidArgument("initial radii size mismatch");
    for (int v = 0; v < nv; ++v) {
      if (free[v]) r[v] = opt.initial[v];
    }
  }
  std::vector<int> order;
  for (int v = 0; v < nv; ++v) {
    if (free[v]) order.push_back(v);
  }

  RadiusSolution sol;
  bool newton_ok = opt.newton;
  int cooldown_until = 0;
  int iterations = 0;
  while (true) {
    const ResidualStats s = stats(residuals_with(cl, free, r));
    sol.residual = s.max;
    if (s.max <= opt.tol) break;
    if (iterations >= opt.max_iter) throw NonConvergence("circle packing did not converge", s.max);
    ++iterations;
    if (newton_ok && sol.sweeps >= std::max(opt.sweeps_before_newton, cooldown_until)) {
      ++sol.newton_steps;
      if (!newton_step(t, cl, free, torus, r)) cooldown_until = sol.sweeps + 20;
      continue;
    }
    for (int v : order) r[v] = local_solve(cl, r, v);
    if (torus) {
      double mean_log = 0;
      for (double x : r) mean_log += std::log(x);
      const double scale = std::exp(-mean_log / nv);
      for (double& x : r) x *= scale;
    }
    ++sol.sweeps;
    const ResidualStats after = stats(residuals_with(cl, free, r));
    sol.sweep_max_residual.push_back(after.max);
    sol.sweep_l1_residual.push_back(after.l1);
  }
  sol.radii = std::move(r);
  return sol;
}

CirclePacking layout(const Triangulation& t, const std::vector<double>& radii, const Embedding* source,
                     const LayoutOptions& opt) {
  const int nf = t.face_count();
  const int nv = t.vertex_count();
  if (static_cast<int>(radii.size()) != nv) throw InvalidArgument("layout: radii size mismatch");
  if (opt.root_face < 0 || opt.root_face >= nf) throw InvalidArgument("layout: root face out of range");
  const bool torus = t.is_torus();
  if (torus && (source == nullptr || !source->periods)) throw InvalidArgument("torus layout needs the source embedding");

  std::vector<std::array<Point, 3>> pos(nf);
  std::vector<Lift> shift(nf);
  std::vector<char> placed(nf, 0);
  auto total_lift = [&](int f, int k) {
    Lift l = shift[f];
    if (torus) {
      l.i += source->lifts[f][k].i;
      l.j += source->lifts[f][k].j;
    }
    return l;
  };

  {
    const int f = opt.root_face;
    const Face& c = t.face(f);
    const double a = tangent_angle(radii[c[0]], radii[c[1]], radii[c[2]]);
    pos[f][0] = 0;
    pos[f][1] = radii[c[0]] + radii[c[1]];
    pos[f][2] = std::polar(radii[c[0]] + radii[c[2]], a);
    placed[f] = 1;
  }
  std::deque<int> queue{opt.root_face};
  std::vector<int> order;
  while (!queue.empty()) {
    const int f = queue.front();
    queue.pop_front();
    order.push_back(f);
    for (int k = 0; k < 3; ++k) {
      const int tw = t.twin(3 * f + k);
      if (tw < 0) continue;
      const int g = Triangulation::face_of(tw);
      if (placed[g]) continue;
      const int kx = tw % 3, ky = (kx + 1) % 3, kz = (kx + 2) % 3;
      // x = target of h, y = origin of h.
      const Point px = pos[f][(k + 1) % 3], py = pos[f][k];
      const Face& c = t.face(g);
      const double ax = tangent_angle(radii[c[kx]], radii[c[ky]], radii[c[kz]]);
      pos[g][kx] = px;
      pos[g][ky] = py;
      pos[g][kz] = px + std::polar(radii[c[kx]] + radii[c[kz]], std::arg(py - px) + ax);
      if (torus) {
        const Lift lx = total_lift(f, (k + 1) % 3);
        shift[g] = Lift{lx.i - source->lifts[g][kx].i, lx.j - source->lifts[g][kx].j};
      }
      placed[g] = 1;
      queue.push_back(g);
    }
  }
  if (static_cast<int>(order.size()) != nf) throw InvalidTriangulation("layout: face graph is disconnected");

  double radius_sum = 0;
  for (double r : radii) radius_sum += r;

  CirclePacking cp;
  cp.radii = radii;
  // Collect instances of each vertex keyed by total lift.
  std::vector<std::map<std::pair<int, int>, Point>> instances(nv);
  double gap = 0;
  for (int f = 0; f < nf; ++f) {
    for (int k = 0; k < 3; ++k) {
      const int v = t.face(f)[k];
      const Lift l = total_lift(f, k);
      auto [it, fresh] = instances[v].emplace(std::make_pair(l.i, l.j), pos[f][k]);
      if (!fresh) gap = std::max(gap, std::abs(it->second - pos[f][k]));
    }
  }
  Point q1{1, 0}, q2{0, 1};
  if (torus) {
    // Least squares for the two periods from repeated instances.
    double a11 = 0, a12 = 0, a22 = 0;
    Point b1 = 0, b2 = 0;
    struct Eq {
      int di, dj;
      Point d;
    };
    std::vector<Eq> eqs;
    for (int v = 0; v < nv; ++v) {
      const auto& inst = instances[v];
      const auto first = inst.begin();
      for (auto it = std::next(first); it != inst.end(); ++it) {
        const int di = it->first.first - first->first.first, dj = it->first.second - first->first.second;
        const Point d = it->second - first->second;
        eqs.push_back({di, dj, d});
        a11 += di * di;
        a12 += di * dj;
        a22 += dj * dj;
        b1 += static_cast<double>(di) * d;
        b2 += static_cast<double>(dj) * d;
      }
    }
    const double det = a11 * a22 - a12 * a12;
    if (std::abs(det) < 1e-12) throw InvalidTriangulation("layout: lifts do not determine both periods");
    q1 = (a22 * b1 - a12 * b2) / det;
    q2 = (a11 * b2 - a12 * b1) / det;
    for (const Eq& e : eqs) gap = std::max(gap, std::abs(e.d - static_cast<double>(e.di) * q1 - static_cast<double>(e.dj) * q2));
  }
  cp.closure_gap = gap;
  if (gap > opt.closure_tol * radius_sum) {
    throw InvalidArgument("layout: inconsistent radii, closure gap " + std::to_string(gap));
  }

  // Canonical instance of each vertex and canonical face corners.
  cp.centers.resize(nv);
  for (int v = 0; v < nv; ++v) {
    const auto& [key, p] = *instances[v].begin();
    cp.centers[v] = p - static_cast<double>(key.first) * q1 - static_cast<double>(key.second) * q2;
  }
  cp.face_corners.resize(nf);
  for (int f = 0; f < nf; ++f) {
    const Point s = static_cast<double>(shift[f].i) * q1 + static_cast<double>(shift[f].j) * q2;
    for (int k = 0; k < 3; ++k) cp.face_corners[f][k] = pos[f][k] - s;
  }

  // Normalization.
  Point scale, origin;
  if (torus) {
    int v0 = 0;
    for (int v = 1; v < nv; ++v) {
      if (std::abs(source->positions[v]) < std::abs(source->positions[v0])) v0 = v;
    }
    origin = cp.centers[v0];
    scale = 1.0 / q1;
    cp.pin0 = v0;
    cp.tau = q2 / q1;
    cp.periods = Periods{Point{1, 0}, *cp.tau};
    if (cp.tau->imag() <= 0) throw InvalidArgument("layout: period ratio has non-positive imaginary part");
  } else {
    int p0, p1;
    Point w0, w1;
    if (opt.pins) {
      std::tie(p0, p1) = *opt.pins;
      if (opt.pin_targets) {
        std::tie(w0, w1) = *opt.pin_targets;
      } else if (source) {
        w0 = source->positions[p0];
        w1 = source->positions[p1];
      } else {
        w0 = 0;
        w1 = 1;
      }
    } else if (source) {
      p0 = p1 = 0;
      for (int v = 1; v < nv; ++v) {
        if (std::abs(source->positions[v]) < std::abs(source->positions[p0])) p0 = v;
      }
      p1 = p0 == 0 ? 1 : 0;
      for (int v = 0; v < nv; ++v) {
        if (v != p0 && std::abs(source->positions[v] - 1.0) < std::abs(source->positions[p1] - 1.0)) p1 = v;
      }
      w0 = source->positions[p0];
      w1 = source->positions[p1];
    } else {
      p0 = t.face(opt.root_face)[0];
      p1 = t.face(opt.root_face)[1];
      w0 = 0;
      w1 = 1;
    }
    if (p0 == p1) throw InvalidArgument("layout: pins must differ");
    cp.pin0 = p0;
    cp.pin1 = p1;
    scale = (w1 - w0) / (cp.centers[p1] - cp.centers[p0]);
    origin = cp.centers[p0] - w0 / scale;
  }
  for (Point& c : cp.centers) c = (c - origin) * scale;
  for (auto& fc : cp.face_corners) {
    for (Point& c : fc) c = (c - origin) * scale;
  }
  for (double& r : cp.radii) r *= std::abs(scale);
  cp.closure_gap *= std::abs(scale);
  return cp;
}

PiecewiseLinearMap::PiecewiseLinearMap(const Triangulation& t, const Embedding& source, const CirclePacking& cp) {
  const int nf = t.face_count();
  if (static_cast<int>(cp.face_corners.size()) != nf) throw InvalidArgument("psi_map: packing does not match triangulation");
  src_.resize(nf);
  for (int f = 0; f < nf; ++f) src_[f] = source.face_corners(t, f);
  dst_ = cp.face_corners;
  src_periods_ = source.periods;
  dst_periods_ = cp.periods;
  double x1 = -INFINITY, y1 = -INFINITY;
  x0_ = y0_ = INFINITY;
  for (const auto& c : src_) {
    for (Point p : c) {
      x0_ = std::min(x0_, p.real());
      y0_ = std::min(y0_, p.imag());
      x1 = std::max(x1, p.real());
      y1 = std::max(y1, p.imag());
    }
  }
  const double side = std::max(x1 - x0_, y1 - y0_);
  const int cells = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(nf))));
  cell_ = side / cells * 1.0000001 + 1e-300;
  nx_ = static_cast<int>((x1 - x0_) / cell_) + 1;
  ny_ = static_cast<int>((y1 - y0_) / cell_) + 1;
  grid_.resize(static_cast<std::size_t>(nx_) * ny_);
  for (int f = 0; f < nf; ++f) {
    double fx0 = INFINITY, fy0 = INFINITY, fx1 = -INFINITY, fy1 = -INFINITY;
    for (Point p : src_[f]) {
      fx0 = std::min(fx0, p.real());
      fy0 = std::min(fy0, p.imag());
      fx1 = std::max(fx1, p.real());
      fy1 = std::max(fy1, p.imag());
    }
    const int i0 = std::clamp(static_cast<int>((fx0 - x0_) / cell_), 0, nx_ - 1);
    const int i1 = std::clamp(static_cast<int>((fx1 - x0_) / cell_), 0, nx_ - 1);
    const int j0 = std::clamp(static_cast<int>((fy0 - y0_) / cell_), 0, ny_ - 1);
    const int j1 = std::clamp(static_cast<int>((fy1 - y0_) / cell_), 0, ny_ - 1);
    for (int j = j0; j <= j1; ++j) {
      for (int i = i0; i <= i1; ++i) grid_[static_cast<std::size_t>(j) * nx_ + i].push_back(f);
    }
  }
}

std::optional<std::pair<int, Point>> PiecewiseLinearMap::locate(Point z) const {
  const int i = static_cast<int>(std::floor((z.real() - x0_) / cell_));
  const int j = static_cast<int>(std::floor((z.imag() - y0_) / cell_));
  if (i < 0 || j < 0 || i >= nx_ || j >= ny_) return std::nullopt;
  int best = -1;
  double best_min = -INFINITY;
  for (int f : grid_[static_cast<std::size_t>(j) * nx_ + i]) {
    const auto& c = src_[f];
    const auto l = barycentric(z, c[0], c[1], c[2]);
    const double m = std::min({l[0], l[1], l[2]});
    if (m > best_min) {
      best_min = m;
      best = f;
    }
  }
  if (best < 0 || best_min < -1e-9) return std::nullopt;
  return std::make_pair(best, z);
}

Point PiecewiseLinearMap::operator()(Point z) const {
  auto affine = [&](int f, Point p) {
    const auto& c = src_[f];
    const auto l = barycentric(p, c[0], c[1], c[2]);
    return l[0] * dst_[f][0] + l[1] * dst_[f][1] + l[2] * dst_[f][2];
  };
  if (!src_periods_) {
    const auto hit = locate(z);
    if (!hit) throw InvalidArgument("psi_map: point outside the embedded domain");
    return affine(hit->first, z);
  }
  const auto st = period_coordinates(*src_periods_, z);
  const int m = static_cast<int>(std::floor(st[0])), n = static_cast<int>(std::floor(st[1]));
  const Point zr = z - static_cast<double>(m) * (*src_periods_)[0] - static_cast<double>(n) * (*src_periods_)[1];
  for (int dj = -1; dj <= 1; ++dj) {
    for (int di = -1; di <= 1; ++di) {
      const Point zs = zr - static_cast<double>(di) * (*src_periods_)[0] - static_cast<double>(dj) * (*src_periods_)[1];
      const auto hit = locate(zs);
      if (!hit) continue;
      return affine(hit->first, zs) + static_cast<double>(di + m) * (*dst_periods_)[0] +
             static_cast<double>(dj + n) * (*dst_periods_)[1];
    }
  }
  throw InvalidArgument("psi_map: point could not be located on the torus");
}

PiecewiseLinearMap psi_map(const CirclePacking& cp, const Triangulation& t, const Embedding& e) {
  return PiecewiseLinearMap(t, e, cp);
}

Point torus_period(const Triangulation& t, const Embedding& e, int N, double tol) {
  if (!t.is_torus()) throw InvalidArgument("torus_period needs a torus");
  const EmbeddedMesh fine = refine(t, e, N);
  RadiusOptions opt;
  opt.tol = tol;
  const RadiusSolution sol = solve_radii(torus_problem(fine.triangulation), opt);
  const CirclePacking cp = layout(fine.triangulation, sol.radii, &fine.embedding);
  return *cp.tau;
}

nlohmann::json packing_to_json(const CirclePacking& cp) {
  nlohmann::json j;
  auto& verts = j["vertices"] = nlohmann::json::array();
  for (std::size_t v = 0; v < cp.radii.size(); ++v) {
    verts.push_back({{"id", v}, {"radius", cp.radii[v]}, {"center", {cp.centers[v].real(), cp.centers[v].imag()}}});
  }
  if (cp.tau) j["tau"] = {cp.tau->real(), cp.tau->imag()};
  j["closure_gap"] = cp.closure_gap;
  return j;
}

}  // namespace mesoperc
