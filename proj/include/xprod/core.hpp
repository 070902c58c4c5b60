#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace xprod {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Index = long;

/// Single knob for every approximate comparison in the library.
struct Tolerance {
  double tol = 1e-10;
};

// Error taxonomy. The CLI maps these onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shape or parent mismatch between operands.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// An operation was called outside its domain (e.g. a non-orthogonal ideal).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

/// A configured resource cap was reached.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// Largest singular value; 0 for empty matrices.
inline double operator_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() == 1 && m.cols() == 1) return std::abs(m(0, 0));
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

}  // namespace xprod
