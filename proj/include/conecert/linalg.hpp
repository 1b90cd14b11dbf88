// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "conecert/common.hpp"

namespace conecert::linalg {

struct Spectrum {
  std::vector<std::complex<double>> eigenvalues;
  /// Largest real part over `eigenvalues`.
  double abscissa = 0.0;
};

/// Real Schur factorisation M = Q T Q^T.
struct SchurForm {
  Matrix Q;
  Matrix T;
  std::vector<std::complex<double>> eigenvalues;  // diagonal order of T
  int selected = 0;                                // size of the leading block
};

using EigenvaluePredicate = std::function<bool(std::complex<double>)>;

Spectrum eigenvalues(const Matrix& m);

SchurForm real_schur(const Matrix& m);

/// Real Schur form whose leading `selected` x `selected` block carries exactly
/// the eigenvalues accepted by `select`. A complex pair must be accepted or
/// rejected as a whole, otherwise OrderingError is thrown.
SchurForm ordered_schur(const Matrix& m, const EigenvaluePredicate& select);

/// Solves M X = rhs with partial-pivot LU. Throws SingularMatrixError when the
/// reciprocal condition estimate falls below `rcond_min`.
Matrix solve_linear(const Matrix& m, const Matrix& rhs, double rcond_min = 1e-13);

/// Estimated reciprocal 1-norm condition number (0 for exactly singular M).
double rcond_estimate(const Matrix& m);

enum class SylvesterMethod { Automatic, Kronecker, Schur };

/// Solves D P + P A = Q. D is n x n, A is k x k and Q is n x k.
///
/// Automatic uses the vectorised Kronecker system for n, k <= 50 and a
/// Bartels-Stewart reduction to quasi-triangular form above that. Throws
/// NoUniqueSolutionError when the spectra of D and -A meet within
/// `overlap_tol * (||D|| + ||A||)`.
Matrix solve_sylvester(const Matrix& d, const Matrix& a, const Matrix& q,
                       SylvesterMethod method = SylvesterMethod::Automatic,
                       double overlap_tol = 1e-10);

/// e^{M t} by Pade scaling and squaring.
Matrix matrix_exponential(const Matrix& m, double t);

/// Largest singular value.
double spectral_norm(const Matrix& m);
double spectral_norm(const Eigen::MatrixXcd& m);

/// Smallest / largest eigenvalue of the symmetric part (M + M^T) / 2.
double min_symmetric_eigenvalue(const Matrix& m);
double max_symmetric_eigenvalue(const Matrix& m);

}  // namespace conecert::linalg
