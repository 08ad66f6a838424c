#pragma once

#include <stdexcept>
#include <string>

namespace mesoperc {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller supplied an argument outside the operation's domain.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A triangulation or embedding violates a structural invariant.
class InvalidTriangulation : public Error {
 public:
  using Error::Error;
};

/// A face is (numerically) collinear, so its Beltrami coefficient would reach modulus 1.
class DegenerateFace : public Error {
 public:
  using Error::Error;
};

/// An iterative solver stopped before reaching its tolerance.
class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, double residual)
      : Error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Malformed mesh file or scenario file.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace mesoperc
