// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "conecert/common.hpp"
#include "conecert/hinf.hpp"
#include "conecert/system.hpp"

namespace conecert::synthesis {

/// Plant x' = A x + B u + w with performance output (x; u).
struct SynthesisProblem {
  Matrix A;
  Matrix B;

  Eigen::Index states() const noexcept { return A.rows(); }
  Eigen::Index inputs() const noexcept { return B.cols(); }
};

struct ClosedLoop {
  /// x' = (A + B K) x + w, z = (x; K x).
  LtiSystem system;
  bool stable = false;
  double abscissa = 0.0;
};

struct SynthesisResult {
  Matrix P_star;
  Matrix K_star;
  double gamma_lower_bound = 0.0;
  double achieved_norm = 0.0;
  double bisection_norm = 0.0;
  bool closedloop_monotone = false;
  bool closedloop_stable = false;
  bool gain_diagonal = false;
  bool no_symmetric_solution = false;
  /// The extended inequality holds with P_star at gamma = 1.01 * bound.
  hinf::InequalityCertificate inequality;
  bool optimal = false;
};

/// The three-pool irrigation network used as the worked example.
SynthesisProblem irrigation_problem();

/// A^T P^T + P A + P (g^-2 I - B B^T) P^T + I < 0 together with P + P^T > 0.
hinf::InequalityCertificate verify_synthesis_inequality(const SynthesisProblem& prob,
                                                        double gamma, const Matrix& p,
                                                        const Tolerances& tol = {});

/// K = -B^T P^T.
Matrix gain_from_solution(const Matrix& p, const Matrix& b);

/// Least-squares residual of -B^T P = K over symmetric P.
double symmetric_gain_residual(const Matrix& b, const Matrix& k);

/// True when no symmetric P gives K = -B^T P for the given K.
bool no_symmetric_solution_check(const Matrix& b, const Matrix& k, double tol = 1e-9);
/// Same check for the gain K = B^T A^{-T} of the problem.
bool no_symmetric_solution_check(const SynthesisProblem& prob, double tol = 1e-9);

ClosedLoop closed_loop(const SynthesisProblem& prob, const Matrix& k, const Tolerances& tol = {});

/// ||(A A^T + B B^T)^{-1}||^{1/2}, a lower bound over all stabilising controllers.
double gamma_lower_bound(const SynthesisProblem& prob);

/// P = -A^{-1}, K = B^T A^{-T}, closed-loop checks and the achieved norm.
SynthesisResult run_example(const SynthesisProblem& prob, const Tolerances& tol = {});
SynthesisResult run_irrigation_example(const Tolerances& tol = {});

/// Re-checks a synthesis result from its K_star and P_star alone.
bool verify_synthesis_result(const SynthesisProblem& prob, const Matrix& p_star,
                             const Matrix& k_star, const Tolerances& tol = {});

}  // namespace conecert::synthesis
