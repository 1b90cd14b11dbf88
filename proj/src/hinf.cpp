// SPDX-License-Identifier: Apache-2.0
#include "conecert/hinf.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "conecert/linalg.hpp"
#include "conecert/stability.hpp"

namespace conecert {

LtiSystem::LtiSystem(Matrix a, Matrix b, Matrix c)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)) {
  require_square(a_, "A");
  require_valid(b_, "B");
  require_valid(c_, "C");
  if (b_.rows() != a_.rows()) {
    throw DimensionError("B must have " + std::to_string(a_.rows()) + " rows");
  }
  if (c_.cols() != a_.rows()) {
    throw DimensionError("C must have " + std::to_string(a_.rows()) + " columns");
  }
}

namespace hinf {

using cones::ConeSpec;

namespace {

void require_gamma(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw PreconditionError("gamma must be a positive finite number");
  }
}

void require_hurwitz(const LtiSystem& sys, const Tolerances& tol, std::string_view who) {
  const double mu = stability::spectral_abscissa(sys.A());
  if (!(mu < -tol.axis * linalg::spectral_norm(sys.A()))) {
    throw PreconditionError(std::string(who) + ": A is not Hurwitz (abscissa " +
                            std::to_string(mu) + ")");
  }
}

double riccati_scale(const LtiSystem& sys, double gamma, const Matrix& p) {
  const double pn = linalg::spectral_norm(p);
  const double bn = linalg::spectral_norm(sys.B());
  const double cn = linalg::spectral_norm(sys.C());
  return std::max(1.0, cn * cn + 2.0 * linalg::spectral_norm(sys.A()) * pn +
                           bn * bn * pn * pn / (gamma * gamma));
}

ConicWitness conic_witness_from_L(const LtiSystem& sys, double gamma, const ConeSpec& cone,
                                  const Tolerances& tol) {
  const Eigen::Index n = sys.states();
  const Matrix l = build_L(sys, gamma);
  const Vector v = cone.interior_vector();
  Vector vv(2 * n);
  vv << v, v;
  Vector x;
  try {
    x = linalg::solve_linear(l, -vv, tol.rcond_min);
  } catch (const SingularMatrixError& e) {
    throw InfeasibleError(std::string("conic witness: L(gamma) is singular: ") + e.what());
  }
  ConicWitness w = verify_conic_witness(sys, gamma, cone, x.head(n), x.tail(n), tol);
  if (w.valid) return w;

  // Lift (p; q) along (v; v) while the slacks keep half of their margin.
  const double base = cones::member(cone, v, tol).margin;
  double eps = 0.1 * std::max(x.norm(), 1e-12);
  for (int attempt = 0; attempt < 60; ++attempt, eps *= 0.5) {
    const Vector y = x + eps * vv;
    ConicWitness lifted = verify_conic_witness(sys, gamma, cone, y.head(n), y.tail(n), tol);
    if (lifted.valid && lifted.slack1_margin > 0.5 * base && lifted.slack2_margin > 0.5 * base) {
      lifted.lifted = true;
      return lifted;
    }
  }
  return w;
}

}  // namespace

double static_gain_norm(const LtiSystem& sys, const Tolerances& tol) {
  require_hurwitz(sys, tol, "static_gain_norm");
  const Matrix x = linalg::solve_linear(sys.A(), sys.B(), tol.rcond_min);
  return linalg::spectral_norm(Matrix(sys.C() * x));
}

double gain_at(const LtiSystem& sys, double omega) {
  using Cplx = std::complex<double>;
  Eigen::MatrixXcd m = -sys.A().cast<Cplx>();
  m.diagonal().array() += Cplx(0.0, omega);
  const Eigen::MatrixXcd x = m.partialPivLu().solve(sys.B().cast<Cplx>());
  return linalg::spectral_norm(Eigen::MatrixXcd(sys.C().cast<Cplx>() * x));
}

std::vector<double> default_frequency_grid(int points, double lo, double hi) {
  std::vector<double> grid;
  grid.reserve(points + 1);
  grid.push_back(0.0);
  const double llo = std::log10(lo);
  const double lhi = std::log10(hi);
  for (int i = 0; i < points; ++i) {
    const double t = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
    grid.push_back(std::pow(10.0, llo + t * (lhi - llo)));
  }
  return grid;
}

SweepResult frequency_sweep_norm(const LtiSystem& sys, const std::vector<double>& grid,
                                 Execution exec, const Tolerances& tol) {
  require_hurwitz(sys, tol, "frequency_sweep_norm");
  if (grid.empty() || std::find(grid.begin(), grid.end(), 0.0) == grid.end()) {
    throw PreconditionError("frequency_sweep_norm: grid must be non-empty and contain 0");
  }
  const long count = static_cast<long>(grid.size());
  std::vector<double> gains(grid.size());
  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(static)
    for (long i = 0; i < count; ++i) gains[i] = gain_at(sys, grid[i]);
  } else {
    for (long i = 0; i < count; ++i) gains[i] = gain_at(sys, grid[i]);
  }
  SweepResult r;
  r.peak = *std::max_element(gains.begin(), gains.end());
  const double tie = 1e-12 * (1.0 + r.peak);
  r.argmax_frequency = std::numeric_limits<double>::infinity();
  for (long i = 0; i < count; ++i) {
    if (gains[i] >= r.peak - tie) r.argmax_frequency = std::min(r.argmax_frequency, grid[i]);
  }
  return r;
}

Matrix build_L(const LtiSystem& sys, double gamma) {
  require_gamma(gamma);
  const Eigen::Index n = sys.states();
  Matrix l(2 * n, 2 * n);
  l << sys.A(), sys.B() * sys.B().transpose() / (gamma * gamma), sys.C().transpose() * sys.C(),
      sys.A().transpose();
  return l;
}

Matrix build_H(const LtiSystem& sys, double gamma) {
  require_gamma(gamma);
  const Eigen::Index n = sys.states();
  Matrix h(2 * n, 2 * n);
  h << sys.A(), sys.B() * sys.B().transpose() / (gamma * gamma), -sys.C().transpose() * sys.C(),
      -sys.A().transpose();
  return h;
}

bool has_imaginary_axis_eigenvalue(const LtiSystem& sys, double gamma, const Tolerances& tol) {
  const Matrix h = build_H(sys, gamma);
  const double band = tol.axis * linalg::spectral_norm(h);
  for (const auto& lambda : linalg::eigenvalues(h).eigenvalues) {
    if (std::abs(lambda.real()) <= band) return true;
  }
  return false;
}

double bisection_hinf_norm(const LtiSystem& sys, double tol, const Tolerances& tolerances) {
  require_hurwitz(sys, tolerances, "bisection_hinf_norm");
  if (!(tol > 0.0)) throw PreconditionError("bisection_hinf_norm: tolerance must be positive");
  // ||G(0)|| is always a lower bound; grow the upper bound until H(gamma)
  // loses its imaginary-axis eigenvalues.
  double lo = linalg::spectral_norm(
      Matrix(sys.C() * linalg::solve_linear(sys.A(), sys.B(), tolerances.rcond_min)));
  double hi = std::max(2.0 * lo, tol);
  for (int it = 0; it < 200 && has_imaginary_axis_eigenvalue(sys, hi, tolerances); ++it) {
    lo = hi;
    hi *= 2.0;
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (has_imaginary_axis_eigenvalue(sys, mid, tolerances) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

Matrix riccati_residual(const LtiSystem& sys, double gamma, const Matrix& p) {
  const Matrix& a = sys.A();
  const Matrix bbt = sys.B() * sys.B().transpose();
  return p * bbt * p / (gamma * gamma) + a.transpose() * p + p * a +
         sys.C().transpose() * sys.C();
}

Verdict brl_condition_i(const LtiSystem& sys, double gamma, const cones::SystemCones& cones,
                        const Tolerances& tol) {
  require_gamma(gamma);
  const auto mono = cones::check_monotone(sys, cones, tol);
  if (!mono.monotone) {
    throw PreconditionError(
        "condition (i): the static gain equals the H-infinity norm only for monotone systems; "
        "use bisection_hinf_norm instead");
  }
  const double g0 = static_gain_norm(sys, tol);
  Verdict v;
  v.margin = gamma - g0;
  v.holds = g0 < gamma;
  return v;
}

Verdict brl_condition_ii(const LtiSystem& sys, double gamma, const Tolerances& tol) {
  const Matrix l = build_L(sys, gamma);
  const double mu = stability::spectral_abscissa(l);
  Verdict v;
  v.margin = -mu;
  v.holds = mu < -tol.axis * linalg::spectral_norm(l);
  return v;
}

RiccatiSolution solve_riccati_stabilizing(const LtiSystem& sys, double gamma,
                                          const RiccatiOptions& options) {
  return solve_riccati_stabilizing(sys, gamma, ConeSpec::orthant(sys.states()), options);
}

RiccatiSolution solve_riccati_stabilizing(const LtiSystem& sys, double gamma,
                                          const ConeSpec& state_cone,
                                          const RiccatiOptions& options) {
  require_gamma(gamma);
  const Tolerances& tol = options.tol;
  if (options.check_precondition && !brl_condition_ii(sys, gamma, tol).holds) {
    throw PreconditionError("solve_riccati_stabilizing: L(gamma) is not Hurwitz");
  }
  const Eigen::Index n = sys.states();
  const Matrix h = build_H(sys, gamma);
  const double band = tol.axis * linalg::spectral_norm(h);
  const auto schur =
      linalg::ordered_schur(h, [band](std::complex<double> z) { return z.real() < -band; });
  if (schur.selected != n) {
    throw InfeasibleError("solve_riccati_stabilizing: subspace-degenerate, H(gamma) has " +
                          std::to_string(schur.selected) + " stable eigenvalues, expected " +
                          std::to_string(n));
  }
  const Matrix u = schur.Q.topLeftCorner(n, n);
  const Matrix v = schur.Q.bottomLeftCorner(n, n);
  Matrix p;
  try {
    p = linalg::solve_linear(u.transpose(), v.transpose(), tol.rcond_min).transpose();
  } catch (const SingularMatrixError& e) {
    throw InfeasibleError(std::string("solve_riccati_stabilizing: subspace-degenerate, ") +
                          e.what());
  }

  const Matrix bbt = sys.B() * sys.B().transpose() / (gamma * gamma);
  RiccatiSolution sol;
  Matrix r = riccati_residual(sys, gamma, p);
  double rn = linalg::spectral_norm(r);
  // Newton on the nonsymmetric Riccati map: the derivative at P is
  // X -> (A^T + P G) X + X (A + G P) with G = g^-2 B B^T.
  for (int step = 0; step < options.max_newton_steps; ++step) {
    if (rn <= 1e-2 * tol.residual_rtol * riccati_scale(sys, gamma, p)) break;
    Matrix delta;
    try {
      delta = linalg::solve_sylvester(sys.A().transpose() + p * bbt, sys.A() + bbt * p, -r);
    } catch (const Error&) {
      break;
    }
    const Matrix candidate = p + delta;
    const Matrix rc = riccati_residual(sys, gamma, candidate);
    const double rcn = linalg::spectral_norm(rc);
    if (!(rcn < rn)) break;
    p = candidate;
    r = rc;
    rn = rcn;
    ++sol.newton_steps;
  }

  sol.P = p;
  sol.residual_norm = rn;
  sol.residual_scale = riccati_scale(sys, gamma, p);
  sol.closedloop_abscissa = stability::spectral_abscissa(sys.A() + bbt * p);
  sol.dual_closedloop_abscissa = stability::spectral_abscissa(sys.A().transpose() + p * bbt);
  sol.symmetric_defect = linalg::spectral_norm(Matrix(p - p.transpose()));
  const auto nonneg = cones::matrix_k_nonnegative(state_cone, p, tol);
  sol.k_nonneg_margin = nonneg.margin;

  if (sol.residual_norm > tol.residual_rtol * sol.residual_scale) {
    throw InconsistencyError("solve_riccati_stabilizing: residual " +
                             std::to_string(sol.residual_norm) + " exceeds tolerance");
  }
  const double acl_norm = linalg::spectral_norm(Matrix(sys.A() + bbt * p));
  if (!(sol.closedloop_abscissa < -tol.axis * acl_norm)) {
    throw InconsistencyError("solve_riccati_stabilizing: closed loop is not Hurwitz");
  }
  if (options.require_cone_nonnegative && !nonneg.inside) {
    throw InconsistencyError("solve_riccati_stabilizing: solution is not K-nonnegative (margin " +
                             std::to_string(sol.k_nonneg_margin) + ")");
  }
  return sol;
}

InequalityCertificate verify_riccati_inequality(const LtiSystem& sys, double gamma,
                                                const Matrix& p, const Tolerances& tol) {
  require_gamma(gamma);
  require_square(p, "verify_riccati_inequality P");
  if (p.rows() != sys.states()) {
    throw DimensionError("verify_riccati_inequality: P must be n x n");
  }
  const Matrix& a = sys.A();
  const Matrix lhs = p * sys.B() * sys.B().transpose() * p.transpose() / (gamma * gamma) +
                     a.transpose() * p.transpose() + p * a + sys.C().transpose() * sys.C();
  InequalityCertificate c;
  c.P = p;
  c.lhs_symmetry_defect = linalg::spectral_norm(Matrix(lhs - lhs.transpose()));
  c.sym_part_min_eig = linalg::min_symmetric_eigenvalue(p + p.transpose());
  c.lhs_max_eig = linalg::max_symmetric_eigenvalue(lhs);
  const double pscale = linalg::spectral_norm(p);
  const double lscale = riccati_scale(sys, gamma, p);
  c.valid = c.sym_part_min_eig > tol.residual_rtol * pscale &&
            c.lhs_max_eig < -tol.residual_rtol * lscale &&
            c.lhs_symmetry_defect <= 1e3 * std::numeric_limits<double>::epsilon() * lscale;
  return c;
}

InequalityCertificate construct_riccati_inequality_witness(const LtiSystem& sys, double gamma,
                                                           const Tolerances& tol) {
  require_gamma(gamma);
  require_hurwitz(sys, tol, "construct_riccati_inequality_witness");
  const Eigen::Index n = sys.states();
  const Matrix ainv_b = linalg::solve_linear(sys.A(), sys.B(), tol.rcond_min);
  const double g0 = linalg::spectral_norm(Matrix(sys.C() * ainv_b));
  const double ab = linalg::spectral_norm(ainv_b);
  const double cc = linalg::spectral_norm(Matrix(sys.C().transpose() * sys.C()));

  RiccatiOptions ropt;
  ropt.tol = tol;
  ropt.check_precondition = false;
  ropt.require_cone_nonnegative = false;
  double delta = 0.5;
  for (int attempt = 0; attempt < 20; ++attempt, delta *= 0.5) {
    // gamma' sits strictly between the static gain and gamma when possible.
    const double gp = g0 < gamma ? (1.0 - delta) * gamma + delta * g0 : (1.0 - delta) * gamma;
    double eps = std::max(1.0, cc);
    if (ab > 0.0 && gp > g0) eps = std::min(eps, 0.5 * (gp * gp - g0 * g0) / (ab * ab));
    if (gp <= g0) eps = 1e-6 * std::max(1.0, cc);
    Matrix c_aug(sys.outputs() + n, n);
    c_aug << sys.C(), std::sqrt(eps) * Matrix::Identity(n, n);
    const LtiSystem augmented(sys.A(), sys.B(), c_aug);
    try {
      const RiccatiSolution sol = solve_riccati_stabilizing(augmented, gp, ropt);
      InequalityCertificate cert = verify_riccati_inequality(sys, gamma, sol.P, tol);
      if (cert.valid) return cert;
    } catch (const Error&) {
      continue;
    }
  }
  throw InfeasibleError(
      "construct_riccati_inequality_witness: no certificate found (the bound likely fails)");
}

ConicWitness verify_conic_witness(const LtiSystem& sys, double gamma, const ConeSpec& state_cone,
                                  const Vector& p, const Vector& q, const Tolerances& tol) {
  require_gamma(gamma);
  if (p.size() != sys.states() || q.size() != sys.states() || state_cone.dim() != sys.states()) {
    throw DimensionError("verify_conic_witness: p, q and the cone must have dimension n");
  }
  ConicWitness w;
  w.p = p;
  w.q = q;
  w.slack1 = -(sys.A() * p + sys.B() * (sys.B().transpose() * q) / (gamma * gamma));
  w.slack2 = -(sys.C().transpose() * (sys.C() * p) + sys.A().transpose() * q);
  const auto mp = cones::member(state_cone, p, tol);
  const auto mq = cones::member(state_cone, q, tol);
  const auto m1 = cones::member(state_cone, w.slack1, tol);
  const auto m2 = cones::member(state_cone, w.slack2, tol);
  w.p_margin = mp.margin;
  w.q_margin = mq.margin;
  w.slack1_margin = m1.margin;
  w.slack2_margin = m2.margin;
  w.valid = mp.interior && mq.interior && m1.interior && m2.interior;
  return w;
}

ConicWitness construct_conic_witness(const LtiSystem& sys, double gamma,
                                     const ConeSpec& state_cone, const Tolerances& tol) {
  if (!brl_condition_ii(sys, gamma, tol).holds) {
    throw InfeasibleError("construct_conic_witness: L(gamma) is not Hurwitz");
  }
  return conic_witness_from_L(sys, gamma, state_cone, tol);
}

BrlReport brl_report(const LtiSystem& sys, double gamma, const cones::SystemCones& cones,
                     const BrlOptions& options) {
  require_gamma(gamma);
  const Tolerances& tol = options.tol;
  require_hurwitz(sys, tol, "brl_report");
  const auto mono = cones::check_monotone(sys, cones, tol);
  if (!mono.monotone) throw PreconditionError("brl_report: system is not monotone");

  BrlReport r;
  r.gamma = gamma;
  r.experimental = mono.experimental;
  r.static_gain = static_gain_norm(sys, tol);
  r.cond_i = brl_condition_i(sys, gamma, cones, tol);

  Tolerances tol_ii = tol;
  if (options.injected_cond_ii_axis_tol) tol_ii.axis = *options.injected_cond_ii_axis_tol;
  r.cond_ii = brl_condition_ii(sys, gamma, tol_ii);

  try {
    RiccatiOptions ropt;
    ropt.tol = tol;
    ropt.check_precondition = false;
    RiccatiSolution sol = solve_riccati_stabilizing(sys, gamma, cones.x, ropt);
    r.cond_iii.holds = true;
    r.cond_iii.margin = -sol.closedloop_abscissa;
    r.riccati = std::move(sol);
  } catch (const Error& e) {
    r.cond_iii.diagnostic = e.what();
  }

  try {
    InequalityCertificate cert = construct_riccati_inequality_witness(sys, gamma, tol);
    r.cond_iv.holds = cert.valid;
    r.cond_iv.margin = -cert.lhs_max_eig;
    r.inequality = std::move(cert);
  } catch (const Error& e) {
    r.cond_iv.diagnostic = e.what();
  }

  try {
    ConicWitness w = conic_witness_from_L(sys, gamma, cones.x, tol);
    r.cond_v.holds = w.valid;
    r.cond_v.margin = std::min({w.p_margin, w.q_margin, w.slack1_margin, w.slack2_margin});
    if (w.valid) r.witness = std::move(w);
  } catch (const Error& e) {
    r.cond_v.diagnostic = e.what();
  }

  const bool h = r.cond_i.holds;
  const bool agree = r.cond_ii.holds == h && r.cond_iii.holds == h && r.cond_iv.holds == h &&
                     r.cond_v.holds == h;
  r.boundary = std::abs(gamma - r.static_gain) <= tol.boundary_band * (1.0 + r.static_gain);
  r.consistent = agree || r.boundary;
  return r;
}

GainSingularity check_lemma_gain(const LtiSystem& sys, double gamma, const Tolerances& tol) {
  require_gamma(gamma);
  if (linalg::rcond_estimate(sys.A()) < tol.rcond_min) {
    throw PreconditionError("check_lemma_gain: A is singular");
  }
  const Matrix h = build_H(sys, gamma);
  double smallest = std::numeric_limits<double>::infinity();
  for (const auto& lambda : linalg::eigenvalues(h).eigenvalues) {
    smallest = std::min(smallest, std::abs(lambda));
  }
  GainSingularity g;
  g.min_abs_eigenvalue = smallest;
  g.nonsingular = smallest > tol.axis * linalg::spectral_norm(h);
  return g;
}

double gain_determinant_factor(const LtiSystem& sys, double gamma) {
  require_gamma(gamma);
  const Matrix q = sys.C() * linalg::solve_linear(sys.A(), sys.B());
  const Eigen::Index m = q.cols();
  return (Matrix::Identity(m, m) - q.transpose() * q / (gamma * gamma)).determinant();
}

double locate_gain_singularity(const LtiSystem& sys, double rel_tol) {
  const Matrix ainv = linalg::solve_linear(sys.A(), Matrix::Identity(sys.states(), sys.states()));
  const double upper = linalg::spectral_norm(sys.C()) * linalg::spectral_norm(ainv) *
                       linalg::spectral_norm(sys.B());
  if (upper == 0.0) return 0.0;
  auto f = [&](double gamma) {
    double smallest = std::numeric_limits<double>::infinity();
    for (const auto& lambda : linalg::eigenvalues(build_H(sys, gamma)).eigenvalues) {
      smallest = std::min(smallest, std::abs(lambda));
    }
    return smallest;
  };
  constexpr int kPoints = 2000;
  const double top = 1.5 * upper;
  const double bottom = 1e-8 * upper;
  const double ratio = std::pow(bottom / top, 1.0 / (kPoints - 1));
  std::vector<double> gammas(kPoints);
  std::vector<double> values(kPoints);
  for (int i = 0; i < kPoints; ++i) {
    gammas[i] = top * std::pow(ratio, i);
    values[i] = f(gammas[i]);
  }
  for (int i = 1; i + 1 < kPoints; ++i) {
    if (!(values[i] <= values[i - 1] && values[i] <= values[i + 1])) continue;
    // Golden-section refinement on [gammas[i+1], gammas[i-1]].
    double lo = gammas[i + 1];
    double hi = gammas[i - 1];
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - phi * (hi - lo);
    double x2 = lo + phi * (hi - lo);
    double f1 = f(x1);
    double f2 = f(x2);
    while (hi - lo > rel_tol * hi) {
      if (f1 < f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - phi * (hi - lo);
        f1 = f(x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + phi * (hi - lo);
        f2 = f(x2);
      }
    }
    const double at = 0.5 * (lo + hi);
    // Near a singularity the smallest eigenvalue behaves like sqrt|gamma - g0|,
    // so a genuine zero leaves a dip orders of magnitude below its
    // neighbours. Shallow dips from eigenvalues passing by are skipped.
    if (f(at) <= 1e-3 * std::min(values[i - 1], values[i + 1])) return at;
  }
  return 0.0;
}

}  // namespace hinf
}  // namespace conecert
