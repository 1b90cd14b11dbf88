// SPDX-License-Identifier: Apache-2.0
#include "conecert/linalg.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <unsupported/Eigen/MatrixFunctions>

namespace conecert {

void require_valid(const Matrix& m, std::string_view name) {
  if (m.rows() == 0 || m.cols() == 0) {
    throw DimensionError(std::string(name) + ": matrix must have positive dimensions");
  }
  if (!m.allFinite()) {
    throw Error(std::string(name) + ": matrix has non-finite entries");
  }
}

void require_square(const Matrix& m, std::string_view name) {
  require_valid(m, name);
  if (m.rows() != m.cols()) {
    throw DimensionError(std::string(name) + ": expected a square matrix, got " +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

namespace linalg {

namespace {

double abscissa_of(const std::vector<std::complex<double>>& values) {
  double mu = -std::numeric_limits<double>::infinity();
  for (const auto& v : values) mu = std::max(mu, v.real());
  return mu;
}

}  // namespace

SchurForm real_schur(const Matrix& m) {
  require_square(m, "real_schur");
  const lapack_int n = static_cast<lapack_int>(m.rows());
  SchurForm out;
  out.T = m;
  out.Q.resize(n, n);
  std::vector<double> wr(n), wi(n);
  lapack_int sdim = 0;
  const lapack_int info = LAPACKE_dgees(LAPACK_COL_MAJOR, 'V', 'N', nullptr, n, out.T.data(), n,
                                        &sdim, wr.data(), wi.data(), out.Q.data(), n);
  if (info != 0) {
    throw Error("real_schur: QR iteration failed to converge (info " + std::to_string(info) + ")");
  }
  out.eigenvalues.reserve(n);
  for (lapack_int i = 0; i < n; ++i) out.eigenvalues.emplace_back(wr[i], wi[i]);
  return out;
}

Spectrum eigenvalues(const Matrix& m) {
  SchurForm schur = real_schur(m);
  Spectrum s;
  s.eigenvalues = std::move(schur.eigenvalues);
  s.abscissa = abscissa_of(s.eigenvalues);
  return s;
}

SchurForm ordered_schur(const Matrix& m, const EigenvaluePredicate& select) {
  SchurForm schur = real_schur(m);
  const lapack_int n = static_cast<lapack_int>(m.rows());
  std::vector<lapack_logical> flags(n, 0);
  int count = 0;
  for (lapack_int i = 0; i < n; ++i) {
    const auto lambda = schur.eigenvalues[i];
    const bool pick = select(lambda);
    if (lambda.imag() != 0.0) {
      if (pick != select(std::conj(lambda))) {
        throw OrderingError("ordered_schur: selection splits a complex conjugate pair");
      }
    }
    flags[i] = pick ? 1 : 0;
    count += pick ? 1 : 0;
  }
  std::vector<double> wr(n), wi(n);
  lapack_int selected = 0;
  double s = 0.0, sep = 0.0;
  // Explicit workspace: the LAPACKE workspace query crashes some OpenBLAS builds.
  const lapack_int lwork = std::max<lapack_int>(1, n * n);
  std::vector<double> work(lwork);
  std::vector<lapack_int> iwork(lwork);
  const lapack_int info = LAPACKE_dtrsen_work(
      LAPACK_COL_MAJOR, 'N', 'V', flags.data(), n, schur.T.data(), n, schur.Q.data(), n,
      wr.data(), wi.data(), &selected, &s, &sep, work.data(), lwork, iwork.data(), lwork);
  if (info != 0) {
    throw OrderingError("ordered_schur: eigenvalue reordering failed (info " +
                        std::to_string(info) + ")");
  }
  if (selected != count) {
    throw OrderingError("ordered_schur: reordered block size does not match the selection");
  }
  schur.selected = static_cast<int>(selected);
  for (lapack_int i = 0; i < n; ++i) schur.eigenvalues[i] = {wr[i], wi[i]};
  return schur;
}

double rcond_estimate(const Matrix& m) {
  require_square(m, "rcond_estimate");
  Eigen::PartialPivLU<Matrix> lu(m);
  const double r = lu.rcond();
  return std::isfinite(r) ? r : 0.0;
}

Matrix solve_linear(const Matrix& m, const Matrix& rhs, double rcond_min) {
  require_square(m, "solve_linear");
  require_valid(rhs, "solve_linear rhs");
  if (rhs.rows() != m.rows()) {
    throw DimensionError("solve_linear: right-hand side has " + std::to_string(rhs.rows()) +
                         " rows, expected " + std::to_string(m.rows()));
  }
  Eigen::PartialPivLU<Matrix> lu(m);
  double rcond = lu.rcond();
  if (!std::isfinite(rcond)) rcond = 0.0;
  if (rcond < rcond_min) {
    throw SingularMatrixError("solve_linear: matrix is singular to working precision", rcond);
  }
  return lu.solve(rhs);
}

namespace {

Matrix sylvester_kronecker(const Matrix& d, const Matrix& a, const Matrix& q) {
  const Eigen::Index n = d.rows();
  const Eigen::Index k = a.rows();
  // vec(D P + P A) = (I_k (x) D + A^T (x) I_n) vec(P), column-major vec.
  Matrix big = Matrix::Zero(n * k, n * k);
  for (Eigen::Index j = 0; j < k; ++j) {
    big.block(j * n, j * n, n, n) += d;
    for (Eigen::Index i = 0; i < k; ++i) {
      const double aij = a(i, j);  // (A^T)(j, i)
      if (aij != 0.0) big.block(j * n, i * n, n, n).diagonal().array() += aij;
    }
  }
  const Vector rhs = Eigen::Map<const Vector>(q.data(), n * k);
  Eigen::PartialPivLU<Matrix> lu(big);
  const Vector x = lu.solve(rhs);
  return Eigen::Map<const Matrix>(x.data(), n, k);
}

Matrix sylvester_schur(const Matrix& d, const Matrix& a, const Matrix& q) {
  const SchurForm sd = real_schur(d);
  const SchurForm sa = real_schur(a);
  Matrix f = sd.Q.transpose() * q * sa.Q;
  const lapack_int n = static_cast<lapack_int>(d.rows());
  const lapack_int k = static_cast<lapack_int>(a.rows());
  double scale = 1.0;
  const lapack_int info = LAPACKE_dtrsyl(LAPACK_COL_MAJOR, 'N', 'N', 1, n, k, sd.T.data(), n,
                                         sa.T.data(), k, f.data(), n, &scale);
  if (info < 0) throw Error("solve_sylvester: invalid argument to the triangular solver");
  // info == 1 means LAPACK perturbed nearly-common eigenvalues; the overlap
  // check in the caller has already excluded the genuinely ill-posed cases.
  f /= scale;
  return sd.Q * f * sa.Q.transpose();
}

}  // namespace

Matrix solve_sylvester(const Matrix& d, const Matrix& a, const Matrix& q, SylvesterMethod method,
                       double overlap_tol) {
  require_square(d, "solve_sylvester D");
  require_square(a, "solve_sylvester A");
  require_valid(q, "solve_sylvester Q");
  if (q.rows() != d.rows() || q.cols() != a.rows()) {
    throw DimensionError("solve_sylvester: Q must be " + std::to_string(d.rows()) + "x" +
                         std::to_string(a.rows()));
  }
  const auto ed = eigenvalues(d).eigenvalues;
  const auto ea = eigenvalues(a).eigenvalues;
  const double scale = std::max(spectral_norm(d) + spectral_norm(a), 1e-300);
  double gap = std::numeric_limits<double>::infinity();
  for (const auto& x : ed)
    for (const auto& y : ea) gap = std::min(gap, std::abs(x + y));
  if (gap <= overlap_tol * scale) {
    throw NoUniqueSolutionError("solve_sylvester: spectra of D and -A overlap (gap " +
                                std::to_string(gap) + ")");
  }
  if (method == SylvesterMethod::Automatic) {
    method = (d.rows() <= 50 && a.rows() <= 50) ? SylvesterMethod::Kronecker
                                                : SylvesterMethod::Schur;
  }
  return method == SylvesterMethod::Kronecker ? sylvester_kronecker(d, a, q)
                                              : sylvester_schur(d, a, q);
}

Matrix matrix_exponential(const Matrix& m, double t) {
  require_square(m, "matrix_exponential");
  if (!std::isfinite(t)) throw Error("matrix_exponential: time must be finite");
  const Matrix scaled = m * t;
  return scaled.exp();
}

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

double spectral_norm(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues()(0);
}

double min_symmetric_eigenvalue(const Matrix& m) {
  require_square(m, "min_symmetric_eigenvalue");
  const Matrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double max_symmetric_eigenvalue(const Matrix& m) {
  require_square(m, "max_symmetric_eigenvalue");
  const Matrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(es.eigenvalues().size() - 1);
}

}  // namespace linalg
}  // namespace conecert
