// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>

#include "conecert/common.hpp"
#include "conecert/cones.hpp"

namespace conecert::stability {

enum class Feasibility { Feasible, Infeasible, Marginal };

/// Witness that D P + P A is K-negative for a K-positive P.
struct SylvesterCertificate {
  Matrix P;
  Matrix Q;  // D P + P A
  double p_positive_margin = 0.0;
  double q_negative_margin = 0.0;
  double mu_sum = 0.0;  // mu(A) + mu(D)
  Feasibility status = Feasibility::Infeasible;
  bool experimental = false;

  bool feasible() const noexcept { return status == Feasibility::Feasible; }
};

struct StabilityReport {
  bool hurwitz = false;
  double abscissa = 0.0;
  /// x interior with A x = -v for the canonical interior v (present when Hurwitz).
  std::optional<Vector> witness_x;
  double witness_margin = 0.0;      // interior margin of x
  double witness_ax_margin = 0.0;   // interior margin of -A x
  /// -A^{-1} is K-nonnegative (present when A is invertible).
  std::optional<bool> neg_inverse_k_nonneg;
  bool criteria_agree = false;
  bool experimental = false;
};

/// Greatest real part over the spectrum.
double spectral_abscissa(const Matrix& a);

/// Largest-real-part eigenvalue of a cross-positive matrix together with an
/// eigenvector in the cone. Throws PreconditionError if A is not
/// cross-positive or the dominant eigenvalue is not (numerically) real.
struct PerronPair {
  double value = 0.0;
  Vector vector;
  double vector_margin = 0.0;
};
PerronPair perron_pair(const cones::ConeSpec& cone, const Matrix& a, const Tolerances& tol = {});

/// Evaluates the three equivalent stability criteria for a cross-positive A:
/// Hurwitz spectrum, an interior x with A x strictly negative, and
/// K-nonnegativity of -A^{-1}.
StabilityReport stability_tests(const cones::ConeSpec& cone, const Matrix& a,
                                const Tolerances& tol = {});

/// Margins and verdict for a supplied P, independent of how it was obtained.
SylvesterCertificate verify_sylvester_certificate(const cones::ConeSpec& cone, const Matrix& a,
                                                  const Matrix& d, const Matrix& p,
                                                  const Tolerances& tol = {});

/// Searches for a K-positive P with D P + P A K-negative. Such a P exists iff
/// mu(A) + mu(D) < 0 when A and D are cross-positive.
SylvesterCertificate solve_sylvester_cone(const cones::ConeSpec& cone, const Matrix& a,
                                          const Matrix& d, const Tolerances& tol = {});

/// solve_sylvester_cone(cone, A, A^T): feasible iff A is Hurwitz.
SylvesterCertificate lyapunov_cone_test(const cones::ConeSpec& cone, const Matrix& a,
                                        const Tolerances& tol = {});

/// P = int_0^inf e^{D t} (-Q) e^{A t} dt by composite Gauss-Legendre
/// quadrature, truncated where e^{(mu(A)+mu(D)) T} < 1e-12. Requires
/// mu(A) + mu(D) < 0.
Matrix integral_sylvester_solution(const Matrix& a, const Matrix& d, const Matrix& q,
                                   double rel_tol = 1e-10);

std::string_view to_string(Feasibility f);

}  // namespace conecert::stability
