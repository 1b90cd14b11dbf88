// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "conecert/common.hpp"

namespace conecert {

/// State-space triple x' = A x + B u, z = C x (no direct feedthrough).
class LtiSystem {
 public:
  LtiSystem(Matrix a, Matrix b, Matrix c);

  const Matrix& A() const noexcept { return a_; }
  const Matrix& B() const noexcept { return b_; }
  const Matrix& C() const noexcept { return c_; }

  Eigen::Index states() const noexcept { return a_.rows(); }
  Eigen::Index inputs() const noexcept { return b_.cols(); }
  Eigen::Index outputs() const noexcept { return c_.rows(); }

 private:
  Matrix a_;
  Matrix b_;
  Matrix c_;
};

}  // namespace conecert
