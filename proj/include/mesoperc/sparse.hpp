#pragma once

#include <functional>
#include <vector>

namespace mesoperc {

/// Symmetric sparse matrix in compressed-row form.
struct CsrMatrix {
  int n = 0;
  std::vector<int> row_ptr;
  std::vector<int> col;
  std::vector<double> val;

  void multiply(const std::vector<double>& x, std::vector<double>& y) const;
  std::vector<double> diagonal() const;
};

struct CgResult {
  int iterations = 0;
  double relative_residual = 0;
  bool converged = false;
};

using Preconditioner = std::function<void(const std::vector<double>& r, std::vector<double>& z)>;

/// Preconditioned conjugate gradients on A x = b, starting from the given x.
/// `project`, when set, is applied to residuals and iterates (used to stay
/// orthogonal to a known null space). Stops at ||r|| <= tol * ||b||.
CgResult pcg(const CsrMatrix& A, const std::vector<double>& b, std::vector<double>& x, const Preconditioner& M,
             double tol, int max_iter, const std::function<void(std::vector<double>&)>& project = {});

Preconditioner jacobi_preconditioner(const CsrMatrix& A);

}  // namespace mesoperc
