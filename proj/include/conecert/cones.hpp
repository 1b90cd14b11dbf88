// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <random>
#include <string>
#include <string_view>

#include "conecert/common.hpp"
#include "conecert/system.hpp"

namespace conecert::cones {

enum class ConeKind { Orthant, Lorentz };

/// Self-dual proper cone: the nonnegative orthant, or the Lorentz cone
/// {x : x_0 >= ||x_{1:}||}.
class ConeSpec {
 public:
  ConeSpec(ConeKind kind, Eigen::Index dim);

  static ConeSpec orthant(Eigen::Index dim) { return {ConeKind::Orthant, dim}; }
  static ConeSpec lorentz(Eigen::Index dim) { return {ConeKind::Lorentz, dim}; }

  ConeKind kind() const noexcept { return kind_; }
  Eigen::Index dim() const noexcept { return dim_; }
  bool is_orthant() const noexcept { return kind_ == ConeKind::Orthant; }

  /// Canonical interior point: all-ones for the orthant, e_0 for Lorentz.
  Vector interior_vector() const;
  /// Canonical K-positive matrix: all-ones for the orthant, e_0 e_0^T + 0.1 I
  /// for Lorentz.
  Matrix positive_matrix() const;

 private:
  ConeKind kind_;
  Eigen::Index dim_;
};

std::string_view to_string(ConeKind kind);
/// Parses "orthant" / "lorentz"; throws Error on anything else.
ConeKind parse_cone_kind(std::string_view name);

struct ConeMembership {
  bool inside = false;
  bool interior = false;
  /// Signed distance proxy; positive means strictly inside.
  double margin = 0.0;
  /// The verdict rests on boundary sampling rather than an exact criterion.
  bool sampled = false;
};

struct MonotonicityReport {
  bool a_cross_positive = false;
  bool b_maps_Ku_to_Kx = false;
  bool c_maps_Kx_to_Kz = false;
  bool monotone = false;
  double a_margin = 0.0;
  double b_margin = 0.0;
  double c_margin = 0.0;
  bool sampled = false;
  bool experimental = false;
};

/// Result of minimising u^T S u + g^T u + c over the unit sphere ||u|| = 1.
struct SphereMinimum {
  double value = 0.0;
  Vector u;
  bool hard_case = false;
};

/// Exact global minimum of a quadratic on the unit sphere (the equality
/// constrained trust-region subproblem), via the eigendecomposition of the
/// symmetric part of S and the secular equation.
SphereMinimum minimize_on_sphere(const Matrix& s, const Vector& g, double c);

ConeMembership member(const ConeSpec& cone, const Vector& x, const Tolerances& tol = {});

/// X K is contained in K.
ConeMembership matrix_k_nonnegative(const ConeSpec& cone, const Matrix& x,
                                    const Tolerances& tol = {});

/// Signed margin of X being K-positive (maps K \ {0} into int K). Positive
/// exactly when X is K-positive; for the orthant it is the minimum entry.
double matrix_k_positive_margin(const ConeSpec& cone, const Matrix& x);

bool matrix_k_positive(const ConeSpec& cone, const Matrix& x, const Tolerances& tol = {});

/// min y^T A x over orthogonal boundary pairs x, y in K with ||x||, ||y|| normalised
/// so that x_0 = y_0 = 1 (Lorentz) or unit coordinate pairs (orthant).
double cross_positivity_margin(const ConeSpec& cone, const Matrix& a);

bool cross_positive(const ConeSpec& cone, const Matrix& a, const Tolerances& tol = {});

/// Cross-positivity of [[A, B], [C, D]] on K x K from its blocks.
bool block_cross_positive(const ConeSpec& cone, const Matrix& a, const Matrix& b, const Matrix& c,
                          const Matrix& d, const Tolerances& tol = {});

/// Cross-positivity of a 2n x 2n matrix on K x K straight from the definition:
/// exact for the orthant, sampled over orthogonal boundary pairs for Lorentz.
ConeMembership block_cross_positive_direct(const ConeSpec& cone, const Matrix& l,
                                           const Tolerances& tol = {});

/// Does M map `from` into `to`? Exact when `from` is an orthant (finite
/// generators), sampled over boundary rays otherwise.
ConeMembership maps_into(const ConeSpec& from, const ConeSpec& to, const Matrix& m,
                         const Tolerances& tol = {});

struct SystemCones {
  ConeSpec u;
  ConeSpec x;
  ConeSpec z;

  static SystemCones orthants(const LtiSystem& sys);
};

MonotonicityReport check_monotone(const LtiSystem& sys, const SystemCones& cones,
                                  const Tolerances& tol = {});

/// Uniform sample from the unit sphere in R^dim.
Vector random_unit_vector(Eigen::Index dim, std::mt19937_64& rng);

}  // namespace conecert::cones
