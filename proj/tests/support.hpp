// SPDX-License-Identifier: Apache-2.0
// Independent reference computations used as test oracles. Nothing here calls
// into the library's numerical kernels.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "conecert/common.hpp"
#include "conecert/system.hpp"

namespace oracle {

using conecert::LtiSystem;
using conecert::Matrix;
using conecert::Vector;

inline double abscissa(const Matrix& a) {
  return Eigen::EigenSolver<Matrix>(a, false).eigenvalues().real().maxCoeff();
}

inline double norm2(const Matrix& m) {
  return Eigen::JacobiSVD<Matrix>(m).singularValues()(0);
}

inline double gain(const LtiSystem& sys, double w) {
  using C = std::complex<double>;
  Eigen::MatrixXcd m = (C(0.0, w) * Eigen::MatrixXcd::Identity(sys.states(), sys.states())) -
                       sys.A().cast<C>();
  Eigen::MatrixXcd g = sys.C().cast<C>() * m.fullPivLu().solve(sys.B().cast<C>());
  return Eigen::JacobiSVD<Eigen::MatrixXcd>(g).singularValues()(0);
}

/// Dense log sweep followed by golden-section refinement around the best point.
inline double hinf_norm(const LtiSystem& sys, int points = 4000) {
  double best = gain(sys, 0.0);
  double best_w = 0.0;
  const double lo = -4.0, hi = 4.0;
  for (int i = 0; i < points; ++i) {
    const double w = std::pow(10.0, lo + (hi - lo) * i / (points - 1));
    const double g = gain(sys, w);
    if (g > best) {
      best = g;
      best_w = w;
    }
  }
  if (best_w == 0.0) return best;
  const double step = std::pow(10.0, (hi - lo) / (points - 1));
  double a = best_w / step, b = best_w * step;
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 200 && b - a > 1e-13 * b; ++it) {
    const double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    if (gain(sys, x1) > gain(sys, x2)) {
      b = x2;
    } else {
      a = x1;
    }
  }
  return std::max(best, gain(sys, 0.5 * (a + b)));
}

/// Stabilising Riccati solution from eigenvectors of H (no Schur ordering).
inline Matrix riccati_eigvec(const LtiSystem& sys, double gamma) {
  const auto n = sys.states();
  Matrix h(2 * n, 2 * n);
  h << sys.A(), sys.B() * sys.B().transpose() / (gamma * gamma),
      -sys.C().transpose() * sys.C(), -sys.A().transpose();
  Eigen::EigenSolver<Matrix> es(h);
  Eigen::MatrixXcd basis(2 * n, n);
  int k = 0;
  for (int i = 0; i < 2 * n; ++i) {
    if (es.eigenvalues()(i).real() < 0.0 && k < n) basis.col(k++) = es.eigenvectors().col(i);
  }
  Eigen::MatrixXcd p = basis.bottomRows(n) * basis.topRows(n).inverse();
  return p.real();
}

inline Matrix kron(const Matrix& x, const Matrix& y) {
  Matrix out(x.rows() * y.rows(), x.cols() * y.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
  return out;
}

/// Kronecker-product solve of D P + P A = Q by full-pivot LU.
inline Matrix sylvester(const Matrix& d, const Matrix& a, const Matrix& q) {
  const auto n = d.rows(), k = a.rows();
  const Matrix big = kron(Matrix::Identity(k, k), d) + kron(a.transpose(), Matrix::Identity(n, n));
  const Vector rhs = Eigen::Map<const Vector>(q.data(), n * k);
  const Vector x = big.fullPivLu().solve(rhs);
  return Eigen::Map<const Matrix>(x.data(), n, k);
}

inline Matrix random_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  return Matrix::NullaryExpr(r, c, [&] { return nd(rng); });
}

inline Matrix random_metzler(Eigen::Index n, std::mt19937_64& rng, double margin) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix a = Matrix::NullaryExpr(n, n, [&] { return u(rng); });
  a.diagonal().array() -= abscissa(a) + margin;
  return a;
}

/// Points (1, u) with u spread over the unit sphere; dims 2 and 3 use a
/// regular parametrisation, higher dims random directions.
inline std::vector<Vector> lorentz_boundary(Eigen::Index n, int count, std::mt19937_64& rng) {
  std::vector<Vector> pts;
  pts.reserve(count);
  std::normal_distribution<double> nd;
  for (int i = 0; i < count; ++i) {
    Vector x(n);
    x(0) = 1.0;
    if (n == 2) {
      x(1) = i % 2 == 0 ? 1.0 : -1.0;
    } else if (n == 3) {
      const double t = 2.0 * M_PI * i / count;
      x(1) = std::cos(t);
      x(2) = std::sin(t);
    } else {
      Vector u = Vector::NullaryExpr(n - 1, [&] { return nd(rng); });
      x.tail(n - 1) = u.normalized();
    }
    pts.push_back(x);
  }
  return pts;
}

}  // namespace oracle
