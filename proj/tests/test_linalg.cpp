// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>

#include "conecert/linalg.hpp"
#include "support.hpp"

using namespace conecert;

namespace {

Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(rows.size(), rows.begin()->size());
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (double x : r) m(i, j++) = x;
    ++i;
  }
  return m;
}

std::vector<std::complex<double>> sorted(std::vector<std::complex<double>> v) {
  std::sort(v.begin(), v.end(), [](auto a, auto b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return v;
}

}  // namespace

TEST(Eigenvalues, TriangularPairFromSylvesterExample) {
  const auto s = linalg::eigenvalues(mat({{-2, 1}, {0, -2}}));
  ASSERT_EQ(s.eigenvalues.size(), 2u);
  for (const auto& z : s.eigenvalues) EXPECT_NEAR(std::abs(z - std::complex<double>(-2, 0)), 0.0, 1e-7);
  EXPECT_NEAR(s.abscissa, -2.0, 1e-7);
}

TEST(Eigenvalues, IdentityAndRotation) {
  const auto id = linalg::eigenvalues(Matrix::Identity(3, 3));
  EXPECT_DOUBLE_EQ(id.abscissa, 1.0);
  const auto rot = linalg::eigenvalues(mat({{0, 1}, {-1, 0}}));
  const auto ev = sorted(rot.eigenvalues);
  EXPECT_NEAR(ev[0].imag(), -1.0, 1e-14);
  EXPECT_NEAR(ev[1].imag(), 1.0, 1e-14);
  EXPECT_NEAR(rot.abscissa, 0.0, 1e-14);
}

TEST(Eigenvalues, NonSquareRejected) {
  EXPECT_THROW(linalg::eigenvalues(Matrix::Ones(2, 3)), DimensionError);
}

TEST(Eigenvalues, AgreeWithReferenceSolver) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix a = oracle::random_matrix(1 + trial % 9, 1 + trial % 9, rng);
    const auto ours = sorted(linalg::eigenvalues(a).eigenvalues);
    Eigen::EigenSolver<Matrix> es(a, false);
    std::vector<std::complex<double>> ref(es.eigenvalues().data(),
                                          es.eigenvalues().data() + es.eigenvalues().size());
    ref = sorted(ref);
    ASSERT_EQ(ours.size(), ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_LT(std::abs(ours[i] - ref[i]), 1e-9);
    EXPECT_NEAR(linalg::eigenvalues(a).abscissa, oracle::abscissa(a), 1e-9);
  }
}

TEST(OrderedSchur, DiagonalLeadingStableBlock) {
  const auto s = linalg::ordered_schur(mat({{2, 0}, {0, -1}}),
                                       [](std::complex<double> z) { return z.real() < 0; });
  EXPECT_EQ(s.selected, 1);
  EXPECT_NEAR(s.T(0, 0), -1.0, 1e-14);
}

TEST(OrderedSchur, OrthogonalAndReconstructs) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::Index n = 2 + trial % 10;
    const Matrix m = oracle::random_matrix(n, n, rng);
    const auto s = linalg::ordered_schur(m, [](std::complex<double> z) { return z.real() < 0; });
    EXPECT_LE((s.Q * s.Q.transpose() - Matrix::Identity(n, n)).norm(), 1e-10);
    EXPECT_LE((s.Q * s.T * s.Q.transpose() - m).norm(), 1e-10 * (1 + m.norm()));
    // Leading block carries exactly the selected eigenvalues.
    if (s.selected > 0) {
      const auto lead = linalg::eigenvalues(Matrix(s.T.topLeftCorner(s.selected, s.selected)));
      for (const auto& z : lead.eigenvalues) EXPECT_LT(z.real(), 0.0);
    }
    int stable = 0;
    for (const auto& z : linalg::eigenvalues(m).eigenvalues) stable += z.real() < 0;
    EXPECT_EQ(s.selected, stable);
  }
}

TEST(OrderedSchur, ScalarHamiltonianStableBlock) {
  // H(2) for a = -1, b = c = 1: eigenvalues +-sqrt(3)/2.
  const Matrix h = mat({{-1, 0.25}, {-1, 1}});
  const auto s = linalg::ordered_schur(h, [](std::complex<double> z) { return z.real() < 0; });
  EXPECT_EQ(s.selected, 1);
  EXPECT_NEAR(s.T(0, 0), -std::sqrt(3.0) / 2.0, 1e-14);
}

TEST(OrderedSchur, SplittingConjugatePairIsAnError) {
  EXPECT_THROW(linalg::ordered_schur(mat({{0, 1}, {-1, 0}}),
                                     [](std::complex<double> z) { return z.imag() > 0; }),
               OrderingError);
}

TEST(SolveLinear, IdentityAndIrrigationInverse) {
  std::mt19937_64 rng(1);
  const Matrix rhs = oracle::random_matrix(3, 2, rng);
  EXPECT_EQ(linalg::solve_linear(Matrix::Identity(3, 3), rhs), rhs);
  const Matrix a = mat({{-1, 0, 0}, {1, -2, 0}, {0, 2, -4}});
  const Matrix p_star = -linalg::solve_linear(a, Matrix::Identity(3, 3));
  EXPECT_TRUE((p_star.array() >= 0.0).all());
  EXPECT_LE((a * p_star + Matrix::Identity(3, 3)).norm(), 1e-15);
}

TEST(SolveLinear, SingularCarriesConditionEstimate) {
  try {
    linalg::solve_linear(mat({{1, 1}, {1, 1}}), Matrix::Identity(2, 2));
    FAIL() << "expected SingularMatrixError";
  } catch (const SingularMatrixError& e) {
    EXPECT_LT(e.rcond(), 1e-13);
  }
}

TEST(SolveSylvester, WorkedPair) {
  const Matrix a = mat({{-2, 1}, {0, -2}});
  const Matrix d = mat({{-1, 0}, {4, 1}});
  const Matrix q = Matrix::Constant(2, 2, -1.0);
  const Matrix expected = mat({{3, 4}, {21, 46}}) / 9.0;
  for (auto method : {linalg::SylvesterMethod::Kronecker, linalg::SylvesterMethod::Schur}) {
    const Matrix p = linalg::solve_sylvester(d, a, q, method);
    EXPECT_LE((p - expected).cwiseAbs().maxCoeff(), 1e-13);
  }
}

TEST(SolveSylvester, TrivialAndOverlap) {
  const Matrix p = linalg::solve_sylvester(-Matrix::Identity(2, 2), -Matrix::Identity(2, 2),
                                           -2.0 * Matrix::Identity(2, 2));
  EXPECT_LE((p - Matrix::Identity(2, 2)).norm(), 1e-14);
  EXPECT_THROW(linalg::solve_sylvester(mat({{1}}), mat({{-1}}), mat({{1}})), NoUniqueSolutionError);
}

TEST(SolveSylvester, AgreesWithKroneckerOracle) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 1 + trial % 6, k = 1 + (trial * 7) % 5;
    const Matrix d = oracle::random_matrix(n, n, rng) - 4.0 * Matrix::Identity(n, n);
    const Matrix a = oracle::random_matrix(k, k, rng) - 4.0 * Matrix::Identity(k, k);
    const Matrix q = oracle::random_matrix(n, k, rng);
    const Matrix ref = oracle::sylvester(d, a, q);
    for (auto method : {linalg::SylvesterMethod::Kronecker, linalg::SylvesterMethod::Schur}) {
      const Matrix p = linalg::solve_sylvester(d, a, q, method);
      EXPECT_LE((p - ref).norm(), 1e-9 * (1 + ref.norm()));
    }
  }
}

TEST(SolveSylvester, LargeUsesSchurPath) {
  std::mt19937_64 rng(8);
  const Eigen::Index n = 70;
  const Matrix d = oracle::random_matrix(n, n, rng) - 20.0 * Matrix::Identity(n, n);
  const Matrix a = oracle::random_matrix(n, n, rng) - 20.0 * Matrix::Identity(n, n);
  const Matrix q = oracle::random_matrix(n, n, rng);
  const Matrix p = linalg::solve_sylvester(d, a, q);
  EXPECT_LE((d * p + p * a - q).norm(), 1e-10 * q.norm());
}

TEST(MatrixExponential, Basics) {
  EXPECT_EQ(linalg::matrix_exponential(Matrix::Zero(3, 3), 2.5), Matrix::Identity(3, 3));
  EXPECT_NEAR(linalg::matrix_exponential(mat({{-1}}), 1.0)(0, 0), std::exp(-1.0), 1e-15);
}

TEST(MatrixExponential, SymmetricAgainstEigendecomposition) {
  std::mt19937_64 rng(9);
  const Matrix x = oracle::random_matrix(5, 5, rng);
  const Matrix s = x + x.transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> es(s);
  const Matrix ref = es.eigenvectors() * (0.3 * es.eigenvalues()).array().exp().matrix().asDiagonal() *
                     es.eigenvectors().transpose();
  EXPECT_LE((linalg::matrix_exponential(s, 0.3) - ref).norm(), 1e-12 * ref.norm());
}

TEST(MatrixExponential, MetzlerStaysNonnegative) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 30; ++trial) {
    const Matrix a = oracle::random_metzler(2 + trial % 5, rng, -0.5);
    for (double t : {0.0, 0.01, 0.5, 3.0}) {
      EXPECT_GE(linalg::matrix_exponential(a, t).minCoeff(), -1e-12);
    }
  }
}

TEST(SpectralNorm, Examples) {
  EXPECT_NEAR(linalg::spectral_norm(Matrix(Matrix::Identity(4, 4))), 1.0, 1e-15);
  EXPECT_NEAR(linalg::spectral_norm(mat({{3, 0}, {0, -5}})), 5.0, 1e-14);
  const Vector u = (Vector(3) << 1, 2, 2).finished();
  const Vector v = (Vector(2) << 3, 4).finished();
  EXPECT_NEAR(linalg::spectral_norm(Matrix(u * v.transpose())), 15.0, 1e-13);
}

TEST(SpectralNorm, AgreesWithJacobi) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix m = oracle::random_matrix(1 + trial % 7, 1 + trial % 4, rng);
    EXPECT_NEAR(linalg::spectral_norm(m), oracle::norm2(m), 1e-12 * (1 + oracle::norm2(m)));
  }
}

TEST(Validation, RejectsEmptyAndNonFinite) {
  EXPECT_THROW(require_valid(Matrix(0, 0), "m"), DimensionError);
  Matrix bad = Matrix::Identity(2, 2);
  bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(require_valid(bad, "m"), Error);
  EXPECT_THROW(linalg::solve_linear(bad, Matrix::Identity(2, 2)), Error);
}

TEST(LyapunovRealEigenvalues, NegativeUnderNonsymmetricInequality) {
  // P + P^T > 0 and A^T P^T + P A < 0 force every real eigenvalue of A below 0.
  std::mt19937_64 rng(21);
  int real_seen = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index n = 2 + trial % 5;
    Matrix p = oracle::random_matrix(n, n, rng);
    p += (std::abs(oracle::abscissa(Matrix(-(p + p.transpose())))) + 0.5) * Matrix::Identity(n, n);
    ASSERT_GT(Eigen::SelfAdjointEigenSolver<Matrix>(p + p.transpose()).eigenvalues().minCoeff(), 0);
    const Matrix x = oracle::random_matrix(n, n, rng);
    const Matrix q = x * x.transpose() + 0.1 * Matrix::Identity(n, n);
    const Matrix y = oracle::random_matrix(n, n, rng);
    const Matrix w = y - y.transpose();
    // P A = -Q/2 + W gives P A + A^T P^T = -Q.
    const Matrix a = p.fullPivLu().solve(Matrix(-0.5 * q + w));
    ASSERT_LT(Eigen::SelfAdjointEigenSolver<Matrix>(Matrix(a.transpose() * p.transpose() + p * a))
                  .eigenvalues()
                  .maxCoeff(),
              0.0);
    for (const auto& z : linalg::eigenvalues(a).eigenvalues) {
      if (z.imag() == 0.0) {
        ++real_seen;
        EXPECT_LT(z.real(), 0.0);
      }
    }
  }
  EXPECT_GT(real_seen, 50);
}
