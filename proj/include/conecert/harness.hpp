// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "conecert/common.hpp"
#include "conecert/cones.hpp"
#include "conecert/hinf.hpp"
#include "conecert/system.hpp"

namespace conecert::harness {

struct InstanceRecipe {
  std::uint64_t seed = 1;
  Eigen::Index n = 3;
  Eigen::Index m = 2;
  Eigen::Index p = 2;
  cones::ConeKind input_cone = cones::ConeKind::Orthant;
  /// Lorentz is accepted for the state cone (needs n >= 2); ports stay orthants.
  cones::ConeKind state_cone = cones::ConeKind::Orthant;
  cones::ConeKind output_cone = cones::ConeKind::Orthant;
  /// A is shifted so that mu(A) = -stability_margin.
  double stability_margin = 0.5;
  /// Fraction of nonzero off-diagonal couplings in A.
  double density = 1.0;
};

/// Throws PreconditionError for an invalid recipe.
void validate(const InstanceRecipe& recipe);

/// A = N - (mu(N) + margin) I with N cone-preserving, B and C mapping the port
/// cones into the state cone and the state cone into the output cone.
LtiSystem random_monotone_system(const InstanceRecipe& recipe);

cones::SystemCones recipe_cones(const InstanceRecipe& recipe);

/// Open interval for mu(A) + mu(D).
struct Band {
  double lo = -1.5;
  double hi = -0.5;
};

/// Two independent Metzler n x n matrices with mu(A) + mu(D) drawn uniformly
/// from the band.
std::pair<Matrix, Matrix> random_cross_positive_pair(const InstanceRecipe& recipe, Band band);

/// Deterministic per-instance seed; independent of evaluation order.
std::uint64_t instance_seed(std::uint64_t battery_seed, std::uint64_t index);

/// Recipe used by the batteries: orthant cones, n <= 6, m, p <= 3.
InstanceRecipe battery_recipe(std::uint64_t battery_seed, std::uint64_t index);

struct Failure {
  std::uint64_t seed = 0;
  std::string check;
  std::string diagnostics;
  InstanceRecipe recipe;
};

struct BatteryResult {
  std::string battery;
  std::uint64_t seed = 0;
  std::size_t total = 0;
  std::size_t passed = 0;
  /// Marginal instances, not part of total.
  std::size_t skipped = 0;
  std::vector<Failure> failures;
  /// Non-monotone contrast group of the zero-frequency battery.
  std::size_t contrast_total = 0;
  std::size_t contrast_argmax_nonzero = 0;
  bool injected_defect = false;
  double elapsed_seconds = 0.0;

  bool ok() const noexcept { return failures.empty(); }
};

struct BatteryOptions {
  std::uint64_t seed = 2024;
  hinf::Execution exec = hinf::Execution::Parallel;
  Tolerances tol;
};

/// Equivalence check of the five bounded-real conditions at
/// gamma = factor * ||G(0)||. With injected_defect the Hurwitz tolerance of
/// condition (ii) is set to 1, which must produce failures.
BatteryResult run_brl_battery(int count, const std::vector<double>& factors,
                              const BatteryOptions& options = {}, bool injected_defect = false);

struct SylvesterBands {
  Band feasible{-1.5, -0.5};
  Band infeasible{0.5, 1.5};
};

/// Even instances draw from the feasible band, odd ones from the infeasible
/// band. Marginal instances are skipped.
BatteryResult run_sylvester_battery(int count, const BatteryOptions& options = {},
                                    const SylvesterBands& bands = {});

/// Sweep peak against static gain, argmax at zero and the bisection oracle,
/// plus a non-monotone contrast group of max(1, count / 5) systems.
BatteryResult run_zero_frequency_battery(int count, const BatteryOptions& options = {});

std::vector<std::string> battery_names();

}  // namespace conecert::harness
