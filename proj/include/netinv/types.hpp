#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace netinv {

using Complex = std::complex<double>;
using Index = Eigen::Index;

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad ids, mismatched dimensions, asymmetric blocks, ...
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A linear system that should be solvable is not (singular block,
/// inconsistent right-hand side). Usually means the regime was misjudged.
class SingularSystem : public Error {
 public:
  using Error::Error;
};

/// A parameter lies outside the admissible set of a problem.
class InadmissibleParameter : public Error {
 public:
  using Error::Error;
};

}  // namespace netinv
