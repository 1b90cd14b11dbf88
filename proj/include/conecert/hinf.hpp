// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "conecert/common.hpp"
#include "conecert/cones.hpp"
#include "conecert/system.hpp"

namespace conecert::hinf {

enum class Execution { Serial, Parallel };

struct SweepResult {
  double peak = 0.0;
  double argmax_frequency = 0.0;
};

/// Stabilising solution of (1/g^2) P B B^T P + A^T P + P A + C^T C = 0.
struct RiccatiSolution {
  Matrix P;
  double residual_norm = 0.0;
  /// Scale the residual is measured against.
  double residual_scale = 1.0;
  /// mu(A + g^-2 B B^T P).
  double closedloop_abscissa = 0.0;
  /// mu(A^T + g^-2 P B B^T).
  double dual_closedloop_abscissa = 0.0;
  double k_nonneg_margin = 0.0;
  double symmetric_defect = 0.0;  // ||P - P^T||
  int newton_steps = 0;
};

/// P with P + P^T > 0 and the nonsymmetric Riccati inequality
/// (1/g^2) P B B^T P^T + A^T P^T + P A + C^T C < 0.
struct InequalityCertificate {
  Matrix P;
  double sym_part_min_eig = 0.0;
  double lhs_max_eig = 0.0;
  double lhs_symmetry_defect = 0.0;
  bool valid = false;
};

/// Interior p, q with A p + g^-2 B B^T q and C^T C p + A^T q strictly K-negative.
struct ConicWitness {
  Vector p;
  Vector q;
  Vector slack1;  // -(A p + g^-2 B B^T q)
  Vector slack2;  // -(C^T C p + A^T q)
  double p_margin = 0.0;
  double q_margin = 0.0;
  double slack1_margin = 0.0;
  double slack2_margin = 0.0;
  bool lifted = false;
  bool valid = false;
};

struct Verdict {
  bool holds = false;
  double margin = 0.0;
  std::string diagnostic;
};

struct BrlReport {
  double gamma = 0.0;
  double static_gain = 0.0;
  Verdict cond_i;    // ||G||_inf < gamma
  Verdict cond_ii;   // L(gamma) Hurwitz
  Verdict cond_iii;  // stabilising K-nonnegative Riccati solution
  Verdict cond_iv;   // nonsymmetric Riccati inequality
  Verdict cond_v;    // conic witness
  std::optional<RiccatiSolution> riccati;
  std::optional<InequalityCertificate> inequality;
  std::optional<ConicWitness> witness;
  bool consistent = false;
  bool boundary = false;
  bool experimental = false;

  bool all_hold() const noexcept {
    return cond_i.holds && cond_ii.holds && cond_iii.holds && cond_iv.holds && cond_v.holds;
  }
};

struct BrlOptions {
  Tolerances tol;
  /// Harness self-test: replaces the Hurwitz tolerance used by condition (ii)
  /// so that a deliberately broken evaluator can be detected.
  std::optional<double> injected_cond_ii_axis_tol;
};

/// ||G(0)|| = ||C A^{-1} B||; the H-infinity norm of monotone systems.
/// Throws PreconditionError if A is not Hurwitz or is singular.
double static_gain_norm(const LtiSystem& sys, const Tolerances& tol = {});

/// ||C (i w I - A)^{-1} B|| at one frequency.
double gain_at(const LtiSystem& sys, double omega);

/// {0} union a log-spaced grid on [lo, hi].
std::vector<double> default_frequency_grid(int points = 400, double lo = 1e-3, double hi = 1e3);

/// Peak gain over a frequency grid. Ties within 1e-12 relative resolve to the
/// lowest frequency. The parallel path splits the grid across OpenMP threads
/// and returns the same result as the serial reference.
SweepResult frequency_sweep_norm(const LtiSystem& sys, const std::vector<double>& grid,
                                 Execution exec = Execution::Serial,
                                 const Tolerances& tol = {});

/// Classical bisection on the imaginary-axis eigenvalue test of H(gamma).
double bisection_hinf_norm(const LtiSystem& sys, double tol = 1e-6,
                           const Tolerances& tolerances = {});

/// H(gamma) has an eigenvalue with |Re| <= axis * ||H||.
bool has_imaginary_axis_eigenvalue(const LtiSystem& sys, double gamma,
                                   const Tolerances& tol = {});

/// [[A, g^-2 B B^T], [C^T C, A^T]].
Matrix build_L(const LtiSystem& sys, double gamma);
/// [[A, g^-2 B B^T], [-C^T C, -A^T]] = diag(I, -I) L.
Matrix build_H(const LtiSystem& sys, double gamma);

/// (1/g^2) P B B^T P + A^T P + P A + C^T C.
Matrix riccati_residual(const LtiSystem& sys, double gamma, const Matrix& p);

Verdict brl_condition_i(const LtiSystem& sys, double gamma, const cones::SystemCones& cones,
                        const Tolerances& tol = {});
Verdict brl_condition_ii(const LtiSystem& sys, double gamma, const Tolerances& tol = {});

struct RiccatiOptions {
  Tolerances tol;
  /// Refuse to run unless L(gamma) is Hurwitz.
  bool check_precondition = true;
  /// Validate P against the state cone (throws InconsistencyError on failure).
  bool require_cone_nonnegative = true;
  int max_newton_steps = 12;
};

/// Stabilising Riccati solution from the stable invariant subspace of
/// H(gamma), refined by Newton steps on the residual.
RiccatiSolution solve_riccati_stabilizing(const LtiSystem& sys, double gamma,
                                          const cones::ConeSpec& state_cone,
                                          const RiccatiOptions& options = {});
RiccatiSolution solve_riccati_stabilizing(const LtiSystem& sys, double gamma,
                                          const RiccatiOptions& options = {});

InequalityCertificate verify_riccati_inequality(const LtiSystem& sys, double gamma,
                                                const Matrix& p, const Tolerances& tol = {});

/// Strict witness for the Riccati inequality at gamma, from the Riccati
/// equation at a smaller gamma' with a small state weight added to C^T C.
InequalityCertificate construct_riccati_inequality_witness(const LtiSystem& sys, double gamma,
                                                           const Tolerances& tol = {});

/// (p; q) = -L^{-1} (v; v) for the canonical interior v, lifted into the
/// interior if needed. Throws InfeasibleError unless L(gamma) is Hurwitz.
ConicWitness construct_conic_witness(const LtiSystem& sys, double gamma,
                                     const cones::ConeSpec& state_cone,
                                     const Tolerances& tol = {});

ConicWitness verify_conic_witness(const LtiSystem& sys, double gamma,
                                  const cones::ConeSpec& state_cone, const Vector& p,
                                  const Vector& q, const Tolerances& tol = {});

/// Evaluates the five equivalent bounded-real conditions independently.
/// Requires A Hurwitz and the system monotone with respect to `cones`.
BrlReport brl_report(const LtiSystem& sys, double gamma, const cones::SystemCones& cones,
                     const BrlOptions& options = {});

struct GainSingularity {
  bool nonsingular = false;
  double min_abs_eigenvalue = 0.0;
};

/// Whether H(gamma) is singular; for invertible A this happens exactly at the
/// singular values of C A^{-1} B.
GainSingularity check_lemma_gain(const LtiSystem& sys, double gamma, const Tolerances& tol = {});

/// det(I - g^-2 Q^T Q) with Q = C A^{-1} B; det H = det(A) det(-A^T) times this.
double gain_determinant_factor(const LtiSystem& sys, double gamma);

/// Largest gamma at which H(gamma) is singular, located from the spectrum of H
/// alone by a descending log scan and golden-section refinement.
double locate_gain_singularity(const LtiSystem& sys, double rel_tol = 1e-13);

}  // namespace conecert::hinf
