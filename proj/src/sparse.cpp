#include "mesoperc/sparse.hpp"

#include <cmath>

namespace mesoperc {

void CsrMatrix::multiply(const std::vector<double>& x, std::vector<double>& y) const {
  y.resize(n);
#pragma omp parallel for schedule(static) if (n > 20000)
  for (int i = 0; i < n; ++i) {
    double s = 0;
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += val[k] * x[col[k]];
    y[i] = s;
  }
}

std::vector<double> CsrMatrix::diagonal() const {
  std::vector<double> d(n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
      if (col[k] == i) d[i] += val[k];
    }
  }
  return d;
}

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

CgResult pcg(const CsrMatrix& A, const std::vector<double>& b, std::vector<double>& x, const Preconditioner& M,
             double tol, int max_iter, const std::function<void(std::vector<double>&)>& project) {
  const int n = A.n;
  x.resize(n, 0.0);
  std::vector<double> r(n), z(n), p(n), q(n);
  A.multiply(x, q);
  for (int i = 0; i < n; ++i) r[i] = b[i] - q[i];
  if (project) project(r);
  const double bnorm = std::sqrt(dot(b, b));
  CgResult res;
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    res.converged = true;
    return res;
  }
  double rnorm = std::sqrt(dot(r, r));
  if (rnorm <= tol * bnorm) {
    res.relative_residual = rnorm / bnorm;
    res.converged = true;
    return res;
  }
  M(r, z);
  if (project) project(z);
  p = z;
  double rz = dot(r, z);
  for (int it = 1; it <= max_iter; ++it) {
    A.multiply(p, q);
    const double alpha = rz / dot(p, q);
    for (int i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    if (project) project(r);
    rnorm = std::sqrt(dot(r, r));
    res.iterations = it;
    res.relative_residual = rnorm / bnorm;
    if (rnorm <= tol * bnorm) {
      res.converged = true;
      break;
    }
    M(r, z);
    if (project) project(z);
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  if (project) project(x);
  return res;
}

Preconditioner jacobi_preconditioner(const CsrMatrix& A) {
  std::vector<double> inv = A.diagonal();
  for (double& d : inv) d = d != 0.0 ? 1.0 / d : 0.0;
  return [inv](const std::vector<double>& r, std::vector<double>& z) {
    z.resize(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) z[i] = inv[i] * r[i];
  };
}

}  // namespace mesoperc
