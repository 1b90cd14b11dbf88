// SPDX-License-Identifier: Apache-2.0
#include "conecert/stability.hpp"

#include <array>
#include <cmath>

#include "conecert/linalg.hpp"

namespace conecert::stability {

using cones::ConeSpec;

namespace {

double entry_scale(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

void require_cone_dim(const ConeSpec& cone, const Matrix& m, std::string_view name) {
  require_square(m, name);
  if (m.rows() != cone.dim()) {
    throw DimensionError(std::string(name) + ": dimension does not match the cone");
  }
}

double marginal_band(const Matrix& a, const Matrix& d, const Tolerances& tol) {
  return tol.axis * std::max(1.0, linalg::spectral_norm(a) + linalg::spectral_norm(d));
}

}  // namespace

std::string_view to_string(Feasibility f) {
  switch (f) {
    case Feasibility::Feasible:
      return "feasible";
    case Feasibility::Infeasible:
      return "infeasible";
    case Feasibility::Marginal:
      return "marginal";
  }
  return "infeasible";
}

double spectral_abscissa(const Matrix& a) { return linalg::eigenvalues(a).abscissa; }

PerronPair perron_pair(const ConeSpec& cone, const Matrix& a, const Tolerances& tol) {
  require_cone_dim(cone, a, "perron_pair");
  if (!cones::cross_positive(cone, a, tol)) {
    throw PreconditionError("perron_pair: matrix is not cross-positive on the cone");
  }
  const Eigen::Index n = a.rows();
  const double mu = spectral_abscissa(a);
  // Shifted inverse iteration with (sI - A)^{-1}, s > mu: the resolvent of a
  // cross-positive matrix is K-nonnegative, so iterates started in the
  // interior never leave the cone.
  const double scale = std::max(1.0, linalg::spectral_norm(a));
  const double shift = mu + 1e-7 * scale;
  const Eigen::PartialPivLU<Matrix> lu(shift * Matrix::Identity(n, n) - a);
  Vector v = cone.interior_vector();
  v.normalize();
  for (int it = 0; it < 60; ++it) {
    Vector next = lu.solve(v);
    const double norm = next.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) break;
    next /= norm;
    const bool settled = (next - v).norm() < 1e-14;
    v = next;
    if (settled) break;
  }
  PerronPair out;
  out.value = mu;
  out.vector = v;
  out.vector_margin = cones::member(cone, v, tol).margin;
  return out;
}

StabilityReport stability_tests(const ConeSpec& cone, const Matrix& a, const Tolerances& tol) {
  require_cone_dim(cone, a, "stability_tests");
  if (!cones::cross_positive(cone, a, tol)) {
    throw PreconditionError("stability_tests: matrix is not cross-positive on the cone");
  }
  StabilityReport r;
  r.experimental = !cone.is_orthant();
  r.abscissa = spectral_abscissa(a);
  r.hurwitz = r.abscissa < -tol.axis * linalg::spectral_norm(a);

  bool witness_ok = false;
  bool inverse_ok = false;
  if (linalg::rcond_estimate(a) >= tol.rcond_min) {
    const Vector v = cone.interior_vector();
    const Vector x = linalg::solve_linear(a, -v, tol.rcond_min);
    const auto xm = cones::member(cone, x, tol);
    const auto axm = cones::member(cone, -(a * x), tol);
    r.witness_margin = xm.margin;
    r.witness_ax_margin = axm.margin;
    witness_ok = xm.interior && axm.interior;
    if (witness_ok) r.witness_x = x;

    const Matrix neg_inv = -linalg::solve_linear(a, Matrix::Identity(a.rows(), a.cols()),
                                                 tol.rcond_min);
    inverse_ok = cones::matrix_k_nonnegative(cone, neg_inv, tol).inside;
    r.neg_inverse_k_nonneg = inverse_ok;
  }
  r.criteria_agree = (r.hurwitz == witness_ok) && (r.hurwitz == inverse_ok);
  return r;
}

SylvesterCertificate verify_sylvester_certificate(const ConeSpec& cone, const Matrix& a,
                                                  const Matrix& d, const Matrix& p,
                                                  const Tolerances& tol) {
  require_cone_dim(cone, a, "verify_sylvester_certificate A");
  require_cone_dim(cone, d, "verify_sylvester_certificate D");
  require_cone_dim(cone, p, "verify_sylvester_certificate P");
  SylvesterCertificate c;
  c.experimental = !cone.is_orthant();
  c.P = p;
  c.Q = d * p + p * a;
  c.mu_sum = spectral_abscissa(a) + spectral_abscissa(d);
  c.p_positive_margin = cones::matrix_k_positive_margin(cone, p);
  c.q_negative_margin = cones::matrix_k_positive_margin(cone, -c.Q);
  const bool p_ok = c.p_positive_margin > tol.cone_slack * entry_scale(p);
  const bool q_ok = c.q_negative_margin > tol.cone_slack * entry_scale(c.Q);
  c.status = (p_ok && q_ok) ? Feasibility::Feasible : Feasibility::Infeasible;
  return c;
}

SylvesterCertificate solve_sylvester_cone(const ConeSpec& cone, const Matrix& a, const Matrix& d,
                                          const Tolerances& tol) {
  require_cone_dim(cone, a, "solve_sylvester_cone A");
  require_cone_dim(cone, d, "solve_sylvester_cone D");
  if (!cones::cross_positive(cone, a, tol) || !cones::cross_positive(cone, d, tol)) {
    throw PreconditionError("solve_sylvester_cone: A and D must be cross-positive on the cone");
  }
  SylvesterCertificate out;
  out.experimental = !cone.is_orthant();
  out.mu_sum = spectral_abscissa(a) + spectral_abscissa(d);
  const double band = marginal_band(a, d, tol);
  if (std::abs(out.mu_sum) <= band) {
    out.status = Feasibility::Marginal;
    return out;
  }
  if (out.mu_sum > 0.0) {
    out.status = Feasibility::Infeasible;
    return out;
  }

  const Matrix e = cone.positive_matrix();
  const Matrix q0 = -e;
  const Matrix p0 = linalg::solve_sylvester(d, a, q0);
  const double base_q_margin = cones::matrix_k_positive_margin(cone, -q0);

  // Interior lift P <- P + eps E, halving eps until the residual keeps at
  // least half of its K-negativity margin.
  double eps = 0.1 * std::max(linalg::spectral_norm(p0), 1e-12);
  for (int attempt = 0; attempt < 80; ++attempt, eps *= 0.5) {
    SylvesterCertificate c = verify_sylvester_certificate(cone, a, d, p0 + eps * e, tol);
    if (c.feasible() && c.q_negative_margin > 0.5 * base_q_margin) {
      c.mu_sum = out.mu_sum;
      return c;
    }
  }
  throw InconsistencyError(
      "solve_sylvester_cone: mu(A) + mu(D) < 0 but no K-positive certificate was found");
}

SylvesterCertificate lyapunov_cone_test(const ConeSpec& cone, const Matrix& a,
                                        const Tolerances& tol) {
  require_cone_dim(cone, a, "lyapunov_cone_test");
  if (!cones::cross_positive(cone, a, tol)) {
    throw PreconditionError("lyapunov_cone_test: matrix is not cross-positive on the cone");
  }
  const Matrix at = a.transpose();
  // Self-duality makes the transpose cross-positive as well.
  if (!cones::cross_positive(cone, at, tol)) {
    throw InconsistencyError("lyapunov_cone_test: transpose of a cross-positive matrix failed "
                             "the cross-positivity test on a self-dual cone");
  }
  return solve_sylvester_cone(cone, a, at, tol);
}

Matrix integral_sylvester_solution(const Matrix& a, const Matrix& d, const Matrix& q,
                                   double rel_tol) {
  require_square(a, "integral_sylvester_solution A");
  require_square(d, "integral_sylvester_solution D");
  if (q.rows() != d.rows() || q.cols() != a.rows()) {
    throw DimensionError("integral_sylvester_solution: Q has the wrong shape");
  }
  const double mu_sum = spectral_abscissa(a) + spectral_abscissa(d);
  if (!(mu_sum < 0.0)) {
    throw PreconditionError("integral_sylvester_solution: requires mu(A) + mu(D) < 0");
  }
  static constexpr std::array<double, 5> nodes = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                                  0.5384693101056831, 0.9061798459386640};
  static constexpr std::array<double, 5> weights = {0.2369268850561891, 0.4786286704993665,
                                                    0.5688888888888889, 0.4786286704993665,
                                                    0.2369268850561891};
  const double rho = std::max({1.0, linalg::spectral_norm(a), linalg::spectral_norm(d)});

  auto integrate = [&](double horizon, long panels) {
    const double h = horizon / static_cast<double>(panels);
    std::array<Matrix, 5> ed, ea;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const double s = 0.5 * h * (nodes[k] + 1.0);
      ed[k] = linalg::matrix_exponential(d, s);
      ea[k] = linalg::matrix_exponential(a, s);
    }
    const Matrix step_d = linalg::matrix_exponential(d, h);
    const Matrix step_a = linalg::matrix_exponential(a, h);
    Matrix left = Matrix::Identity(d.rows(), d.cols());
    Matrix right = Matrix::Identity(a.rows(), a.cols());
    Matrix acc = Matrix::Zero(q.rows(), q.cols());
    for (long i = 0; i < panels; ++i) {
      for (std::size_t k = 0; k < nodes.size(); ++k) {
        acc.noalias() += (0.5 * h * weights[k]) * (left * ed[k]) * (-q) * (ea[k] * right);
      }
      left = left * step_d;
      right = step_a * right;
    }
    return std::make_pair(acc, Matrix(left * (-q) * right));
  };

  double horizon = std::log(1e12) / -mu_sum;
  for (int grow = 0; grow < 8; ++grow) {
    long panels = std::max<long>(8, static_cast<long>(std::ceil(horizon * rho / 0.5)));
    auto [coarse, tail] = integrate(horizon, panels);
    Matrix fine = integrate(horizon, 2 * panels).first;
    for (int refine = 0; refine < 4 && (fine - coarse).norm() > rel_tol * fine.norm(); ++refine) {
      panels *= 2;
      coarse = fine;
      fine = integrate(horizon, 2 * panels).first;
    }
    // Remaining tail is bounded by ||integrand(T)|| / |mu_sum| up to transients.
    if (tail.norm() / -mu_sum <= rel_tol * fine.norm()) return fine;
    horizon *= 1.5;
  }
  throw InconsistencyError("integral_sylvester_solution: quadrature did not converge");
}

}  // namespace conecert::stability
