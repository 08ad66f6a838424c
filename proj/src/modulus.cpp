#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "harmonic.hpp"
#include "mesoperc/error.hpp"
#include "mesoperc/sparse.hpp"
#include "mesoperc/subdivision.hpp"

namespace mesoperc {

namespace detail {

namespace {

// Free-node block of the Laplacian on one level, plus the prolongation from
// the level below (midpoint interpolation restricted to free nodes).
struct Level {
  CsrMatrix A;
  std::vector<double> diag;
  std::vector<double> rhs;
  std::vector<int> free_index;   // vertex -> free index or -1
  std::vector<int> free_vertex;  // free index -> vertex
  std::vector<std::array<int, 2>> p_index;  // coarse free indices, -1 when absent
  std::vector<std::array<double, 2>> p_weight;
  int coarse_n = 0;
};

Level assemble(const Triangulation& t, const std::vector<double>& fixed, const std::vector<char>& is_fixed) {
  Level L;
  const int nv = t.vertex_count();
  L.free_index.assign(nv, -1);
  for (int v = 0; v < nv; ++v) {
    if (!is_fixed[v]) {
      L.free_index[v] = static_cast<int>(L.free_vertex.size());
      L.free_vertex.push_back(v);
    }
  }
  const int n = static_cast<int>(L.free_vertex.size());
  L.A.n = n;
  L.diag.assign(n, 0.0);
  L.rhs.assign(n, 0.0);
  std::vector<int> count(n + 1, 0);
  for (int e = 0; e < t.edge_count(); ++e) {
    const auto [p, q] = t.edge_vertices(e);
    const int i = L.free_index[p], j = L.free_index[q];
    if (i >= 0 && j >= 0) {
      ++count[i + 1];
      ++count[j + 1];
    }
  }
  L.A.row_ptr.assign(n + 1, 0);
  for (int i = 0; i < n; ++i) L.A.row_ptr[i + 1] = L.A.row_ptr[i] + count[i + 1] + 1;
  L.A.col.assign(L.A.row_ptr[n], 0);
  L.A.val.assign(L.A.row_ptr[n], 0.0);
  std::vector<int> fill(n);
  for (int i = 0; i < n; ++i) {
    L.A.col[L.A.row_ptr[i]] = i;
    fill[i] = L.A.row_ptr[i] + 1;
  }
  for (int e = 0; e < t.edge_count(); ++e) {
    const auto [p, q] = t.edge_vertices(e);
    const double w = edge_weight(t, e);
    const int i = L.free_index[p], j = L.free_index[q];
    if (i >= 0) L.diag[i] += w;
    if (j >= 0) L.diag[j] += w;
    if (i >= 0 && j >= 0) {
      L.A.col[fill[i]] = j;
      L.A.val[fill[i]++] = -w;
      L.A.col[fill[j]] = i;
      L.A.val[fill[j]++] = -w;
    } else if (i >= 0) {
      L.rhs[i] += w * fixed[q];
    } else if (j >= 0) {
      L.rhs[j] += w * fixed[p];
    }
  }
  for (int i = 0; i < n; ++i) L.A.val[L.A.row_ptr[i]] = L.diag[i];
  return L;
}

class Multigrid {
 public:
  explicit Multigrid(std::vector<Level>& levels) : levels_(levels) { factor_coarse(); }

  // Symmetric V-cycle approximating A^{-1} r on level `top`.
  void apply(int top, const std::vector<double>& r, std::vector<double>& z) const {
    z.assign(r.size(), 0.0);
    vcycle(top, r, z);
  }

 private:
  void factor_coarse() {
    const Level& L = levels_[0];
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(L.A.val.size());
    for (int i = 0; i < L.A.n; ++i) {
      for (int k = L.A.row_ptr[i]; k < L.A.row_ptr[i + 1]; ++k) trip.emplace_back(i, L.A.col[k], L.A.val[k]);
    }
    Eigen::SparseMatrix<double> M(L.A.n, L.A.n);
    M.setFromTriplets(trip.begin(), trip.end());
    if (L.A.n > 0) {
      ldlt_.compute(M);
      if (ldlt_.info() != Eigen::Success) throw Error("modulus: singular Dirichlet system (disconnected arcs)");
    }
  }

  void smooth(const Level& L, const std::vector<double>& b, std::vector<double>& x, bool forward) const {
    const int n = L.A.n;
    for (int s = 0; s < n; ++s) {
      const int i = forward ? s : n - 1 - s;
      double acc = b[i];
      for (int k = L.A.row_ptr[i] + 1; k < L.A.row_ptr[i + 1]; ++k) acc -= L.A.val[k] * x[L.A.col[k]];
      x[i] = acc / L.diag[i];
    }
  }

  void vcycle(int l, const std::vector<double>& b, std::vector<double>& x) const {
    const Level& L = levels_[l];
    if (l == 0) {
      if (L.A.n == 0) return;
      Eigen::Map<const Eigen::VectorXd> bb(b.data(), L.A.n);
      Eigen::VectorXd sol = ldlt_.solve(bb);
      for (int i = 0; i < L.A.n; ++i) x[i] = sol[i];
      return;
    }
    smooth(L, b, x, true);
    std::vector<double> r;
    L.A.multiply(x, r);
    for (int i = 0; i < L.A.n; ++i) r[i] = b[i] - r[i];
    std::vector<double> rc(L.coarse_n, 0.0);
    for (int i = 0; i < L.A.n; ++i) {
      for (int k = 0; k < 2; ++k) {
        if (L.p_index[i][k] >= 0) rc[L.p_index[i][k]] += L.p_weight[i][k] * r[i];
      }
    }
    std::vector<double> ec(L.coarse_n, 0.0);
    vcycle(l - 1, rc, ec);
    for (int i = 0; i < L.A.n; ++i) {
      for (int k = 0; k < 2; ++k) {
        if (L.p_index[i][k] >= 0) x[i] += L.p_weight[i][k] * ec[L.p_index[i][k]];
      }
    }
    smooth(L, b, x, false);
  }

  std::vector<Level>& levels_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
};

void mark_arc(const Triangulation& t, int from, int to, double value, std::vector<double>& fixed,
              std::vector<char>& is_fixed) {
  for (int v : boundary_arc(t, from, to)) {
    fixed[v] = value;
    is_fixed[v] = 1;
  }
}

}  // namespace

double dirichlet_energy(const Triangulation& t, const std::vector<double>& u) {
  double s = 0;
  for (int e = 0; e < t.edge_count(); ++e) {
    const auto [p, q] = t.edge_vertices(e);
    const double d = u[p] - u[q];
    s += edge_weight(t, e) * d * d;
  }
  return s;
}

HarmonicHierarchy solve_harmonic(const Triangulation& base, int one_from, int one_to, int zero_from, int zero_to,
                                 int n, const ModulusOptions& opt) {
  if (n < 0) throw InvalidArgument("modulus: refinement level must be non-negative");
  HarmonicHierarchy out;
  Triangulation t = base;
  std::vector<Level> levels;
  std::optional<Multigrid> mg;
  std::vector<double> u;
  for (int l = 0; l <= n; ++l) {
    std::vector<std::array<int, 2>> parents;
    if (l > 0) {
      Subdivided s = subdivide(t);
      t = std::move(s.triangulation);
      parents = std::move(s.parents);
    }
    const int nv = t.vertex_count();
    std::vector<double> fixed(nv, 0.0);
    std::vector<char> is_fixed(nv, 0);
    mark_arc(t, one_from, one_to, 1.0, fixed, is_fixed);
    mark_arc(t, zero_from, zero_to, 0.0, fixed, is_fixed);
    levels.push_back(assemble(t, fixed, is_fixed));
    Level& L = levels.back();

    std::vector<double> x(L.A.n, 0.0);
    if (l > 0) {
      const Level& C = levels[l - 1];
      L.coarse_n = C.A.n;
      L.p_index.assign(L.A.n, {-1, -1});
      L.p_weight.assign(L.A.n, {0.0, 0.0});
      std::vector<double> fine(nv);
      for (int v = 0; v < nv; ++v) {
        const auto [p, q] = parents[v];
        fine[v] = p == q ? u[p] : 0.5 * (u[p] + u[q]);
        const int i = L.free_index[v];
        if (i < 0) continue;
        x[i] = fine[v];
        if (p == q) {
          L.p_index[i] = {C.free_index[p], -1};
          L.p_weight[i] = {1.0, 0.0};
        } else {
          L.p_index[i] = {C.free_index[p], C.free_index[q]};
          L.p_weight[i] = {0.5, 0.5};
        }
      }
    }

    int iterations = 0;
    if (l == 0) {
      mg.emplace(levels);
      mg->apply(0, L.rhs, x);
    } else if (L.A.n > 0) {
      const int top = l;
      Preconditioner M = [&mg, top](const std::vector<double>& r, std::vector<double>& z) { mg->apply(top, r, z); };
      CgResult cg = pcg(L.A, L.rhs, x, M, opt.tol, opt.max_iter);
      if (!cg.converged) throw NonConvergence("modulus: conjugate gradients did not converge", cg.relative_residual);
      iterations = cg.iterations;
    }

    u = fixed;
    for (int i = 0; i < L.A.n; ++i) u[L.free_vertex[i]] = x[i];
    const double energy = dirichlet_energy(t, u);
    if (!(energy > 0)) throw Error("modulus: zero conductance between the arcs");
    out.level_energy.push_back(energy);
    out.iterations = iterations;
  }
  out.finest = std::move(t);
  out.u = std::move(u);
  return out;
}

}  // namespace detail

ModulusResult modulus(const MarkedRectangleDomain& d, int n, const ModulusOptions& opt) {
  const int marks[4] = {d.a, d.b, d.c, d.d};
  check_marks(d.triangulation, marks);
  detail::HarmonicHierarchy h = detail::solve_harmonic(d.triangulation, d.a, d.b, d.c, d.d, n, opt);
  ModulusResult r;
  r.level = n;
  r.energy = h.level_energy.back();
  r.rho = 1.0 / r.energy;
  for (double e : h.level_energy) r.level_rho.push_back(1.0 / e);
  r.error_estimate = n > 0 ? std::abs(r.level_rho[n] - r.level_rho[n - 1]) : std::numeric_limits<double>::quiet_NaN();
  r.potential = std::move(h.u);
  r.iterations = h.iterations;
  return r;
}

nlohmann::json modulus_to_json(const ModulusResult& r) {
  nlohmann::json j;
  j["rho"] = r.rho;
  j["level"] = r.level;
  j["energy"] = r.energy;
  j["error_estimate"] = std::isnan(r.error_estimate) ? nlohmann::json(nullptr) : nlohmann::json(r.error_estimate);
  j["level_rho"] = r.level_rho;
  j["iterations"] = r.iterations;
  j["vertex_count"] = r.potential.size();
  return j;
}

std::string potential_csv(const ModulusResult& r) {
  std::ostringstream os;
  os.precision(17);
  os << "vertex,u\n";
  for (std::size_t v = 0; v < r.potential.size(); ++v) os << v << ',' << r.potential[v] << '\n';
  return os.str();
}

}  // namespace mesoperc
