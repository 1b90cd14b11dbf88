// SPDX-License-Identifier: Apache-2.0
#include "conecert/harness.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "conecert/linalg.hpp"
#include "conecert/stability.hpp"

namespace conecert::harness {

using cones::ConeKind;
using cones::ConeSpec;

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Independent of the library's Schur path on purpose.
double eigen_abscissa(const Matrix& a) {
  return Eigen::EigenSolver<Matrix>(a, false).eigenvalues().real().maxCoeff();
}

Matrix random_metzler(Eigen::Index n, double density, std::mt19937_64& rng) {
  std::bernoulli_distribution keep(density);
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      m(i, j) = i == j ? uniform(rng, -1.0, 1.0) : (keep(rng) ? uniform(rng, 0.0, 1.0) : 0.0);
    }
  }
  return m;
}

// Sum of Lorentz-preserving generators: a multiple of e0 e0^T, boosts
// e0 e_i^T + e_i e0^T, rotations of the spatial part and a diagonal shift.
Matrix random_lorentz_cross_positive(Eigen::Index n, double density, std::mt19937_64& rng) {
  std::bernoulli_distribution keep(density);
  Matrix m = Matrix::Identity(n, n) * uniform(rng, -1.0, 1.0);
  m(0, 0) += uniform(rng, 0.0, 1.0);
  for (Eigen::Index i = 1; i < n; ++i) {
    if (keep(rng)) {
      const double b = uniform(rng, -1.0, 1.0);
      m(0, i) += b;
      m(i, 0) += b;
    }
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (!keep(rng)) continue;
      const double w = uniform(rng, -1.0, 1.0);
      m(i, j) += w;
      m(j, i) -= w;
    }
  }
  return m;
}

Vector random_lorentz_vector(Eigen::Index n, std::mt19937_64& rng) {
  Vector v(n);
  for (Eigen::Index i = 1; i < n; ++i) v(i) = uniform(rng, -1.0, 1.0);
  v(0) = v.tail(n - 1).norm() + uniform(rng, 0.1, 1.0);
  return v;
}

Matrix random_positive(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = uniform(rng, 0.1, 1.0);
  return m;
}

std::string describe(const InstanceRecipe& r) {
  std::ostringstream os;
  os.precision(17);
  os << "seed=" << r.seed << " n=" << r.n << " m=" << r.m << " p=" << r.p
     << " margin=" << r.stability_margin << " density=" << r.density;
  return os.str();
}

struct Outcome {
  std::size_t total = 0;
  std::size_t passed = 0;
  std::size_t skipped = 0;
  std::size_t contrast_total = 0;
  std::size_t contrast_argmax_nonzero = 0;
  std::vector<Failure> failures;

  void check(bool ok, const InstanceRecipe& recipe, std::string name, std::string diag) {
    ++total;
    if (ok) {
      ++passed;
    } else {
      failures.push_back({recipe.seed, std::move(name), std::move(diag), recipe});
    }
  }
};

// Evaluates fn(i) for every index and merges in index order, so the result
// does not depend on scheduling.
template <typename Fn>
BatteryResult run_indexed(std::string name, long count, const BatteryOptions& options, Fn fn) {
  const auto start = std::chrono::steady_clock::now();
  std::vector<Outcome> outcomes(static_cast<std::size_t>(count));
  if (options.exec == hinf::Execution::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (long i = 0; i < count; ++i) outcomes[i] = fn(i);
  } else {
    for (long i = 0; i < count; ++i) outcomes[i] = fn(i);
  }
  BatteryResult r;
  r.battery = std::move(name);
  r.seed = options.seed;
  for (auto& o : outcomes) {
    r.total += o.total;
    r.passed += o.passed;
    r.skipped += o.skipped;
    r.contrast_total += o.contrast_total;
    r.contrast_argmax_nonzero += o.contrast_argmax_nonzero;
    for (auto& f : o.failures) r.failures.push_back(std::move(f));
  }
  r.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

void require_count(int count, std::string_view who) {
  if (count < 1) throw PreconditionError(std::string(who) + ": count must be at least 1");
}

}  // namespace

void validate(const InstanceRecipe& r) {
  if (r.n < 1 || r.m < 1 || r.p < 1) throw PreconditionError("recipe: n, m, p must be >= 1");
  if (!(r.density > 0.0 && r.density <= 1.0)) {
    throw PreconditionError("recipe: density must lie in (0, 1]");
  }
  if (!std::isfinite(r.stability_margin)) {
    throw PreconditionError("recipe: stability margin must be finite");
  }
  if (r.input_cone != ConeKind::Orthant || r.output_cone != ConeKind::Orthant) {
    throw PreconditionError("recipe: only orthant input and output cones are generated");
  }
  if (r.state_cone == ConeKind::Lorentz && r.n < 2) {
    throw PreconditionError("recipe: a Lorentz state cone needs n >= 2");
  }
}

cones::SystemCones recipe_cones(const InstanceRecipe& r) {
  return {ConeSpec(r.input_cone, r.m), ConeSpec(r.state_cone, r.n), ConeSpec(r.output_cone, r.p)};
}

LtiSystem random_monotone_system(const InstanceRecipe& recipe) {
  validate(recipe);
  std::mt19937_64 rng(recipe.seed);
  const Eigen::Index n = recipe.n;
  Matrix a, b, c;
  if (recipe.state_cone == ConeKind::Orthant) {
    a = random_metzler(n, recipe.density, rng);
    b = random_positive(n, recipe.m, rng);
    c = random_positive(recipe.p, n, rng);
  } else {
    a = random_lorentz_cross_positive(n, recipe.density, rng);
    b.resize(n, recipe.m);
    for (Eigen::Index j = 0; j < recipe.m; ++j) b.col(j) = random_lorentz_vector(n, rng);
    c.resize(recipe.p, n);
    for (Eigen::Index i = 0; i < recipe.p; ++i) c.row(i) = random_lorentz_vector(n, rng);
  }
  const double alpha = eigen_abscissa(a) + recipe.stability_margin;
  a.diagonal().array() -= alpha;
  return LtiSystem(std::move(a), std::move(b), std::move(c));
}

std::pair<Matrix, Matrix> random_cross_positive_pair(const InstanceRecipe& recipe, Band band) {
  validate(recipe);
  if (!(band.lo <= band.hi)) throw PreconditionError("random_cross_positive_pair: empty band");
  std::mt19937_64 rng(recipe.seed);
  Matrix a = random_metzler(recipe.n, recipe.density, rng);
  Matrix d = random_metzler(recipe.n, recipe.density, rng);
  const double target = band.lo == band.hi ? band.lo : uniform(rng, band.lo, band.hi);
  const double split = uniform(rng, 0.2, 0.8);
  a.diagonal().array() -= eigen_abscissa(a) - split * target;
  d.diagonal().array() -= eigen_abscissa(d) - (1.0 - split) * target;
  return {std::move(a), std::move(d)};
}

std::uint64_t instance_seed(std::uint64_t battery_seed, std::uint64_t index) {
  // splitmix64 of the pair.
  std::uint64_t z = battery_seed * 0x9e3779b97f4a7c15ULL + index + 0x632be59bd9b4e019ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

InstanceRecipe battery_recipe(std::uint64_t battery_seed, std::uint64_t index) {
  InstanceRecipe r;
  r.seed = instance_seed(battery_seed, index);
  std::mt19937_64 rng(r.seed ^ 0xa5a5a5a5ULL);
  r.n = std::uniform_int_distribution<int>(1, 6)(rng);
  r.m = std::uniform_int_distribution<int>(1, 3)(rng);
  r.p = std::uniform_int_distribution<int>(1, 3)(rng);
  r.stability_margin = uniform(rng, 0.1, 1.0);
  r.density = uniform(rng, 0.3, 1.0);
  return r;
}

BatteryResult run_brl_battery(int count, const std::vector<double>& factors,
                              const BatteryOptions& options, bool injected_defect) {
  require_count(count, "run_brl_battery");
  if (factors.empty()) throw PreconditionError("run_brl_battery: no gamma factors");
  for (double f : factors) {
    if (!(f > 0.0) || !std::isfinite(f)) {
      throw PreconditionError("run_brl_battery: gamma factors must be positive");
    }
  }
  hinf::BrlOptions brl;
  brl.tol = options.tol;
  if (injected_defect) brl.injected_cond_ii_axis_tol = 1.0;

  BatteryResult r = run_indexed("brl", count, options, [&](long i) {
    Outcome o;
    const InstanceRecipe recipe = battery_recipe(options.seed, static_cast<std::uint64_t>(i));
    try {
      const LtiSystem sys = random_monotone_system(recipe);
      const auto cones = recipe_cones(recipe);
      const double g0 = hinf::static_gain_norm(sys, options.tol);
      for (double factor : factors) {
        const double gamma = factor * g0;
        std::ostringstream diag;
        diag.precision(17);
        diag << describe(recipe) << " gamma=" << gamma << " g0=" << g0;
        try {
          const auto rep = hinf::brl_report(sys, gamma, cones, brl);
          diag << " verdicts=" << rep.cond_i.holds << rep.cond_ii.holds << rep.cond_iii.holds
               << rep.cond_iv.holds << rep.cond_v.holds;
          for (const auto* v : {&rep.cond_iii, &rep.cond_iv, &rep.cond_v}) {
            if (!v->diagnostic.empty()) diag << " [" << v->diagnostic << "]";
          }
          const bool expected = factor > 1.0;
          const bool ok = rep.consistent && (rep.boundary || rep.cond_i.holds == expected);
          o.check(ok, recipe, "brl_equivalence", diag.str());
        } catch (const std::exception& e) {
          o.check(false, recipe, "brl_equivalence", diag.str() + " exception: " + e.what());
        }
      }
    } catch (const std::exception& e) {
      for (std::size_t k = 0; k < factors.size(); ++k) {
        o.check(false, recipe, "brl_instance", describe(recipe) + " exception: " + e.what());
      }
    }
    return o;
  });
  r.injected_defect = injected_defect;
  return r;
}

BatteryResult run_sylvester_battery(int count, const BatteryOptions& options,
                                    const SylvesterBands& bands) {
  require_count(count, "run_sylvester_battery");
  return run_indexed("sylvester", count, options, [&](long i) {
    Outcome o;
    InstanceRecipe recipe = battery_recipe(options.seed, static_cast<std::uint64_t>(i));
    const bool want_feasible = i % 2 == 0;
    std::ostringstream diag;
    diag.precision(17);
    diag << describe(recipe) << (want_feasible ? " band=feasible" : " band=infeasible");
    try {
      const auto [a, d] =
          random_cross_positive_pair(recipe, want_feasible ? bands.feasible : bands.infeasible);
      const ConeSpec cone = ConeSpec::orthant(recipe.n);
      const double mu_sum = eigen_abscissa(a) + eigen_abscissa(d);
      const double band = options.tol.axis * std::max(1.0, linalg::spectral_norm(a) +
                                                               linalg::spectral_norm(d));
      diag << " mu_sum=" << mu_sum;
      if (std::abs(mu_sum) <= band) {
        ++o.skipped;
        return o;
      }
      const auto cert = stability::solve_sylvester_cone(cone, a, d, options.tol);
      diag << " status=" << stability::to_string(cert.status);
      const bool expected = mu_sum < 0.0;
      if (cert.feasible() != expected) {
        o.check(false, recipe, "sylvester_verdict", diag.str());
      } else if (cert.feasible()) {
        const auto again = stability::verify_sylvester_certificate(cone, a, d, cert.P, options.tol);
        // Direct entrywise check of the certificate, independent of the margins.
        const Matrix q = d * cert.P + cert.P * a;
        const bool entrywise = (cert.P.array() > 0.0).all() && (q.array() < 0.0).all();
        o.check(again.feasible() && entrywise, recipe, "sylvester_reverify", diag.str());
      } else {
        o.check(true, recipe, "sylvester_verdict", diag.str());
      }
    } catch (const std::exception& e) {
      o.check(false, recipe, "sylvester_instance", diag.str() + " exception: " + e.what());
    }
    return o;
  });
}

BatteryResult run_zero_frequency_battery(int count, const BatteryOptions& options) {
  require_count(count, "run_zero_frequency_battery");
  const long contrast = std::max(1, count / 5);
  const auto grid = hinf::default_frequency_grid();
  return run_indexed("zero-frequency", count + contrast, options, [&](long i) {
    Outcome o;
    InstanceRecipe recipe = battery_recipe(options.seed, static_cast<std::uint64_t>(i));
    if (i >= count) {
      // Contrast group: random sign pattern, lightly damped, not monotone.
      std::mt19937_64 rng(recipe.seed);
      std::normal_distribution<double> normal;
      const Eigen::Index n = std::max<Eigen::Index>(2, recipe.n);
      Matrix a = Matrix::NullaryExpr(n, n, [&] { return normal(rng); });
      Matrix b = Matrix::NullaryExpr(n, recipe.m, [&] { return normal(rng); });
      Matrix c = Matrix::NullaryExpr(recipe.p, n, [&] { return normal(rng); });
      a.diagonal().array() -= eigen_abscissa(a) + 0.05;
      ++o.contrast_total;
      try {
        const LtiSystem sys(a, b, c);
        if (hinf::frequency_sweep_norm(sys, grid, hinf::Execution::Serial, options.tol)
                .argmax_frequency != 0.0) {
          ++o.contrast_argmax_nonzero;
        }
      } catch (const Error&) {
        // Contrast instances only feed the statistics.
      }
      return o;
    }
    std::ostringstream diag;
    diag.precision(17);
    diag << describe(recipe);
    try {
      const LtiSystem sys = random_monotone_system(recipe);
      const double g0 = hinf::static_gain_norm(sys, options.tol);
      const auto sweep = hinf::frequency_sweep_norm(sys, grid, hinf::Execution::Serial, options.tol);
      const double bis = hinf::bisection_hinf_norm(sys, 1e-6, options.tol);
      diag << " g0=" << g0 << " peak=" << sweep.peak << " argmax=" << sweep.argmax_frequency
           << " bisection=" << bis;
      std::string failed;
      if (std::abs(sweep.peak - g0) > 1e-6 * (1.0 + g0)) failed = "sweep_equals_static";
      else if (sweep.argmax_frequency != 0.0) failed = "argmax_at_zero";
      else if (std::abs(bis - g0) > 2e-6) failed = "bisection_agrees";
      o.check(failed.empty(), recipe, failed.empty() ? "zero_frequency" : failed, diag.str());
    } catch (const std::exception& e) {
      o.check(false, recipe, "zero_frequency_instance", diag.str() + " exception: " + e.what());
    }
    return o;
  });
}

std::vector<std::string> battery_names() { return {"brl", "sylvester", "zero-frequency"}; }

}  // namespace conecert::harness
