// SPDX-License-Identifier: Apache-2.0
#include "conecert/synthesis.hpp"

#include <cmath>

#include "conecert/cones.hpp"
#include "conecert/linalg.hpp"
#include "conecert/stability.hpp"

namespace conecert::synthesis {

SynthesisProblem irrigation_problem() {
  SynthesisProblem prob;
  prob.A.resize(3, 3);
  // clang-format off
  prob.A << -1,  0,  0,
             1, -2,  0,
             0,  2, -4;
  prob.B.resize(3, 2);
  prob.B << -1,  0,
             1, -1,
             0,  1;
  // clang-format on
  return prob;
}

hinf::InequalityCertificate verify_synthesis_inequality(const SynthesisProblem& prob,
                                                        double gamma, const Matrix& p,
                                                        const Tolerances& tol) {
  if (!(gamma > 0.0)) throw PreconditionError("verify_synthesis_inequality: gamma must be > 0");
  require_square(p, "verify_synthesis_inequality P");
  const Eigen::Index n = prob.states();
  if (p.rows() != n) throw DimensionError("verify_synthesis_inequality: P must be n x n");
  const Matrix middle =
      Matrix::Identity(n, n) / (gamma * gamma) - prob.B * prob.B.transpose();
  const Matrix lhs = prob.A.transpose() * p.transpose() + p * prob.A +
                     p * middle * p.transpose() + Matrix::Identity(n, n);
  hinf::InequalityCertificate c;
  c.P = p;
  c.lhs_symmetry_defect = linalg::spectral_norm(Matrix(lhs - lhs.transpose()));
  c.sym_part_min_eig = linalg::min_symmetric_eigenvalue(p + p.transpose());
  c.lhs_max_eig = linalg::max_symmetric_eigenvalue(lhs);
  const double pn = linalg::spectral_norm(p);
  const double scale = std::max(1.0, 1.0 + 2.0 * linalg::spectral_norm(prob.A) * pn +
                                         linalg::spectral_norm(middle) * pn * pn);
  c.valid = c.sym_part_min_eig > tol.residual_rtol * pn &&
            c.lhs_max_eig < -tol.residual_rtol * scale;
  return c;
}

Matrix gain_from_solution(const Matrix& p, const Matrix& b) {
  require_square(p, "gain_from_solution P");
  require_valid(b, "gain_from_solution B");
  if (b.rows() != p.rows()) throw DimensionError("gain_from_solution: B must have n rows");
  Matrix k = -b.transpose() * p.transpose();
  k.array() += 0.0;  // -0.0 -> 0.0 in emitted certificates
  return k;
}

double symmetric_gain_residual(const Matrix& b, const Matrix& k) {
  const Eigen::Index n = b.rows();
  const Eigen::Index m = b.cols();
  if (k.rows() != m || k.cols() != n) {
    throw DimensionError("symmetric_gain_residual: K must be m x n");
  }
  // Unknowns are the upper triangle of P; column (i, j) holds -B^T (E_ij + E_ji).
  const Eigen::Index unknowns = n * (n + 1) / 2;
  Matrix map = Matrix::Zero(m * n, unknowns);
  Eigen::Index col = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j, ++col) {
      Matrix e = Matrix::Zero(n, n);
      e(i, j) = 1.0;
      e(j, i) = 1.0;
      const Matrix image = -b.transpose() * e;
      map.col(col) = Eigen::Map<const Vector>(image.data(), m * n);
    }
  }
  const Vector target = Eigen::Map<const Vector>(k.data(), m * n);
  const Vector x = map.completeOrthogonalDecomposition().solve(target);
  return (map * x - target).norm();
}

bool no_symmetric_solution_check(const Matrix& b, const Matrix& k, double tol) {
  return symmetric_gain_residual(b, k) > tol * (1.0 + k.norm());
}

bool no_symmetric_solution_check(const SynthesisProblem& prob, double tol) {
  const Matrix p_star = -linalg::solve_linear(prob.A, Matrix::Identity(prob.states(), prob.states()));
  return no_symmetric_solution_check(prob.B, gain_from_solution(p_star, prob.B), tol);
}

ClosedLoop closed_loop(const SynthesisProblem& prob, const Matrix& k, const Tolerances& tol) {
  const Eigen::Index n = prob.states();
  if (k.rows() != prob.inputs() || k.cols() != n) {
    throw DimensionError("closed_loop: K must be m x n");
  }
  Matrix out(n + k.rows(), n);
  out << Matrix::Identity(n, n), k;
  const Matrix acl = prob.A + prob.B * k;
  ClosedLoop cl{LtiSystem(acl, Matrix::Identity(n, n), out), false, 0.0};
  cl.abscissa = stability::spectral_abscissa(acl);
  cl.stable = cl.abscissa < -tol.axis * linalg::spectral_norm(acl);
  return cl;
}

double gamma_lower_bound(const SynthesisProblem& prob) {
  const Matrix m = prob.A * prob.A.transpose() + prob.B * prob.B.transpose();
  const Matrix inv = linalg::solve_linear(m, Matrix::Identity(m.rows(), m.cols()));
  return std::sqrt(linalg::spectral_norm(inv));
}

namespace {

bool off_pattern_zero(const Matrix& k, double tol) {
  for (Eigen::Index i = 0; i < k.rows(); ++i)
    for (Eigen::Index j = 0; j < k.cols(); ++j)
      if (i != j && std::abs(k(i, j)) > tol) return false;
  return true;
}

}  // namespace

SynthesisResult run_example(const SynthesisProblem& prob, const Tolerances& tol) {
  const Eigen::Index n = prob.states();
  SynthesisResult r;
  r.P_star = -linalg::solve_linear(prob.A, Matrix::Identity(n, n), tol.rcond_min);
  r.K_star = gain_from_solution(r.P_star, prob.B);
  r.gamma_lower_bound = gamma_lower_bound(prob);
  r.no_symmetric_solution = no_symmetric_solution_check(prob.B, r.K_star);
  r.gain_diagonal = off_pattern_zero(r.K_star, 1e-12);

  const ClosedLoop cl = closed_loop(prob, r.K_star, tol);
  r.closedloop_stable = cl.stable;
  r.closedloop_monotone =
      cones::check_monotone(cl.system, cones::SystemCones::orthants(cl.system), tol).monotone;
  if (cl.stable) {
    r.bisection_norm = hinf::bisection_hinf_norm(cl.system, 1e-9, tol);
    r.achieved_norm = r.closedloop_monotone ? hinf::static_gain_norm(cl.system, tol)
                                            : r.bisection_norm;
  }
  r.inequality = verify_synthesis_inequality(prob, 1.01 * r.gamma_lower_bound, r.P_star, tol);
  r.optimal = cl.stable &&
              std::abs(r.achieved_norm - r.gamma_lower_bound) <= 1e-9 * (1.0 + r.gamma_lower_bound);
  return r;
}

SynthesisResult run_irrigation_example(const Tolerances& tol) {
  return run_example(irrigation_problem(), tol);
}

bool verify_synthesis_result(const SynthesisProblem& prob, const Matrix& p_star,
                             const Matrix& k_star, const Tolerances& tol) {
  const Matrix k = gain_from_solution(p_star, prob.B);
  if (k.rows() != k_star.rows() || k.cols() != k_star.cols()) return false;
  if ((k - k_star).norm() > 1e-12 * (1.0 + k.norm())) return false;
  const ClosedLoop cl = closed_loop(prob, k_star, tol);
  if (!cl.stable) return false;
  if (!cones::check_monotone(cl.system, cones::SystemCones::orthants(cl.system), tol).monotone) {
    return false;
  }
  const double bound = gamma_lower_bound(prob);
  const double achieved = hinf::static_gain_norm(cl.system, tol);
  if (std::abs(achieved - bound) > 1e-9 * (1.0 + bound)) return false;
  return verify_synthesis_inequality(prob, 1.01 * bound, p_star, tol).valid;
}

}  // namespace conecert::synthesis
