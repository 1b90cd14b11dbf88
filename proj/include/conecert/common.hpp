// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <string_view>

namespace conecert {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr std::string_view kToolVersion = "0.1.0";

/// Numerical thresholds shared by every analysis. The defaults are the values
/// documented in the README; every field can be overridden from the CLI.
struct Tolerances {
  /// Relative residual accepted from linear, Sylvester and Riccati solves.
  double residual_rtol = 1e-10;
  /// |Re(lambda)| <= axis * ||M|| counts as lying on the imaginary axis.
  double axis = 1e-8;
  /// Cone-membership slack, relative to the entry scale of the tested object.
  double cone_slack = 1e-9;
  /// Reciprocal condition number below which a matrix is treated as singular.
  double rcond_min = 1e-13;
  /// |gamma - ||G(0)||| <= boundary_band * (1 + ||G(0)||) is a boundary case.
  double boundary_band = 1e-6;
  /// Boundary sample count for sampled (non-polyhedral) cone checks.
  int sphere_samples = 1000;
  /// Seed of the deterministic generator used by sampled checks.
  unsigned long long sample_seed = 0x5eed;
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class SingularMatrixError : public Error {
 public:
  SingularMatrixError(const std::string& what, double rcond)
      : Error(what + " (rcond estimate " + std::to_string(rcond) + ")"), rcond_(rcond) {}
  double rcond() const noexcept { return rcond_; }

 private:
  double rcond_;
};

class OrderingError : public Error {
 public:
  using Error::Error;
};

class NoUniqueSolutionError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an analysis does not hold for the input.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// An object the theory guarantees to exist could not be produced.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// Results that must agree do not: a numerical or implementation defect.
class InconsistencyError : public Error {
 public:
  using Error::Error;
};

/// DimensionError for an empty matrix, Error for non-finite entries.
void require_valid(const Matrix& m, std::string_view name);
void require_square(const Matrix& m, std::string_view name);

}  // namespace conecert
