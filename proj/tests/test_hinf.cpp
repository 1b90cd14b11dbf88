// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "conecert/harness.hpp"
#include "conecert/hinf.hpp"
#include "conecert/linalg.hpp"
#include "conecert/synthesis.hpp"
#include "support.hpp"

using namespace conecert;
using cones::ConeSpec;

namespace {

LtiSystem scalar() { return {Matrix::Constant(1, 1, -1.0), Matrix::Ones(1, 1), Matrix::Ones(1, 1)}; }

LtiSystem diag_system(double second_gain) {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = -1.0;
  a(1, 1) = -2.0;
  Matrix b = Matrix::Identity(2, 2);
  b(1, 1) = second_gain;
  return {a, b, Matrix::Identity(2, 2)};
}

LtiSystem irrigation_closed_loop() {
  Matrix a(3, 3), c(5, 3);
  a << -2, 0, 0, 2, -2.5, 0, 0, 2.5, -4;
  c << Matrix::Identity(3, 3), (Matrix(2, 3) << 1, 0, 0, 0, 0.5, 0).finished();
  return {a, Matrix::Identity(3, 3), c};
}

std::vector<LtiSystem> battery_systems(int count, std::uint64_t seed) {
  std::vector<LtiSystem> out;
  for (int i = 0; i < count; ++i) {
    out.push_back(harness::random_monotone_system(harness::battery_recipe(seed, i)));
  }
  return out;
}

}  // namespace

TEST(StaticGain, Examples) {
  EXPECT_NEAR(hinf::static_gain_norm(scalar()), 1.0, 1e-15);
  const LtiSystem cl = irrigation_closed_loop();
  const double bound = synthesis::gamma_lower_bound(synthesis::irrigation_problem());
  EXPECT_NEAR(hinf::static_gain_norm(cl), bound, 1e-12 * bound);
  EXPECT_NEAR(hinf::static_gain_norm(cl), oracle::hinf_norm(cl), 1e-9);
  const LtiSystem zero_c(scalar().A(), scalar().B(), Matrix::Zero(1, 1));
  EXPECT_EQ(hinf::static_gain_norm(zero_c), 0.0);
  const LtiSystem unstable(Matrix::Ones(1, 1), Matrix::Ones(1, 1), Matrix::Ones(1, 1));
  EXPECT_THROW(hinf::static_gain_norm(unstable), PreconditionError);
}

TEST(FrequencySweep, Examples) {
  const auto r = hinf::frequency_sweep_norm(scalar(), {0.0, 1.0, 10.0});
  EXPECT_DOUBLE_EQ(r.peak, 1.0);
  EXPECT_EQ(r.argmax_frequency, 0.0);
  EXPECT_THROW(hinf::frequency_sweep_norm(scalar(), {1.0, 2.0}), PreconditionError);
  EXPECT_THROW(hinf::frequency_sweep_norm(scalar(), {}), PreconditionError);
}

TEST(FrequencySweep, PeakAtLeastZeroFrequencyGain) {
  std::mt19937_64 rng(50);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix a = oracle::random_matrix(4, 4, rng);
    a.diagonal().array() -= oracle::abscissa(a) + 0.2;
    const LtiSystem sys(a, oracle::random_matrix(4, 2, rng), oracle::random_matrix(2, 4, rng));
    const auto grid = hinf::default_frequency_grid();
    const auto r = hinf::frequency_sweep_norm(sys, grid);
    EXPECT_GE(r.peak, oracle::gain(sys, 0.0) * (1.0 - 1e-12));
    EXPECT_LE(r.peak, oracle::hinf_norm(sys) + 1e-9);
  }
}

TEST(FrequencySweep, ParallelMatchesSerial) {
  const auto grid = hinf::default_frequency_grid(2000);
  for (const LtiSystem& sys : battery_systems(10, 11)) {
    const auto s = hinf::frequency_sweep_norm(sys, grid, hinf::Execution::Serial);
    const auto p = hinf::frequency_sweep_norm(sys, grid, hinf::Execution::Parallel);
    EXPECT_EQ(s.peak, p.peak);
    EXPECT_EQ(s.argmax_frequency, p.argmax_frequency);
  }
  const LtiSystem resonant((Matrix(2, 2) << -0.1, 2, -2, -0.1).finished(),
                           (Matrix(2, 1) << 0, 1).finished(), (Matrix(1, 2) << 1, 0).finished());
  const auto s = hinf::frequency_sweep_norm(resonant, grid, hinf::Execution::Serial);
  const auto p = hinf::frequency_sweep_norm(resonant, grid, hinf::Execution::Parallel);
  EXPECT_EQ(s.peak, p.peak);
  EXPECT_EQ(s.argmax_frequency, p.argmax_frequency);
  EXPECT_GT(s.argmax_frequency, 1.0);
}

TEST(Bisection, Examples) {
  EXPECT_NEAR(hinf::bisection_hinf_norm(scalar(), 1e-6), 1.0, 1e-6);
  EXPECT_NEAR(hinf::bisection_hinf_norm(diag_system(2.0), 1e-6), 1.0, 1e-6);
  EXPECT_NEAR(hinf::bisection_hinf_norm(diag_system(4.0), 1e-6), 2.0, 1e-6);
  EXPECT_THROW(hinf::bisection_hinf_norm(scalar(), 0.0), PreconditionError);
}

TEST(Bisection, MatchesOracleOnGeneralSystems) {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 2 + trial % 4;
    Matrix a = oracle::random_matrix(n, n, rng);
    a.diagonal().array() -= oracle::abscissa(a) + 0.3;
    const LtiSystem sys(a, oracle::random_matrix(n, 2, rng), oracle::random_matrix(2, n, rng));
    EXPECT_NEAR(hinf::bisection_hinf_norm(sys, 1e-8), oracle::hinf_norm(sys), 1e-6) << trial;
  }
}

TEST(HamiltonianBlocks, ScalarExamples) {
  const Matrix l = hinf::build_L(scalar(), 1.0);
  EXPECT_EQ(l, (Matrix(2, 2) << -1, 1, 1, -1).finished());
  const Matrix h = hinf::build_H(scalar(), 1.0);
  EXPECT_EQ(h, (Matrix(2, 2) << -1, 1, -1, 1).finished());
  EXPECT_THROW(hinf::build_L(scalar(), 0.0), PreconditionError);
  EXPECT_THROW(hinf::build_H(scalar(), -1.0), PreconditionError);
}

TEST(HamiltonianBlocks, VerbatimAndSignFlip) {
  std::mt19937_64 rng(52);
  const LtiSystem sys(oracle::random_matrix(3, 3, rng), oracle::random_matrix(3, 2, rng),
                      oracle::random_matrix(4, 3, rng));
  const double g = 1.7;
  const Matrix l = hinf::build_L(sys, g);
  EXPECT_EQ(l.topLeftCorner(3, 3), sys.A());
  EXPECT_LE((l.topRightCorner(3, 3) - sys.B() * sys.B().transpose() / (g * g)).norm(), 1e-15);
  EXPECT_LE((l.bottomLeftCorner(3, 3) - sys.C().transpose() * sys.C()).norm(), 1e-15);
  EXPECT_EQ(l.bottomRightCorner(3, 3), Matrix(sys.A().transpose()));
  Matrix flip = Matrix::Identity(6, 6);
  flip.bottomRightCorner(3, 3) *= -1.0;
  EXPECT_EQ(hinf::build_H(sys, g), flip * l);
}

TEST(BrlConditions, ScalarVerdicts) {
  const auto cones = cones::SystemCones::orthants(scalar());
  const auto i2 = hinf::brl_condition_i(scalar(), 2.0, cones);
  EXPECT_TRUE(i2.holds);
  EXPECT_NEAR(i2.margin, 1.0, 1e-15);
  EXPECT_FALSE(hinf::brl_condition_i(scalar(), 0.5, cones).holds);
  EXPECT_TRUE(hinf::brl_condition_ii(scalar(), 2.0).holds);
  EXPECT_FALSE(hinf::brl_condition_ii(scalar(), 1.0).holds);
  EXPECT_FALSE(hinf::brl_condition_ii(scalar(), 0.5).holds);
  const LtiSystem neg(scalar().A(), Matrix::Constant(1, 1, -1.0), scalar().C());
  EXPECT_THROW(hinf::brl_condition_i(neg, 2.0, cones), PreconditionError);
}

TEST(BrlConditions, ClosedLoopAboveOptimum) {
  const LtiSystem cl = irrigation_closed_loop();
  const double bound = synthesis::gamma_lower_bound(synthesis::irrigation_problem());
  const auto cones = cones::SystemCones::orthants(cl);
  EXPECT_TRUE(hinf::brl_condition_i(cl, 1.01 * bound, cones).holds);
  EXPECT_TRUE(hinf::construct_riccati_inequality_witness(cl, 1.01 * bound).valid);
  const auto r = hinf::brl_report(cl, 1.01 * bound, cones);
  EXPECT_TRUE(r.all_hold());
  EXPECT_TRUE(r.consistent);
}

TEST(Riccati, ScalarClosedForm) {
  const auto sol = hinf::solve_riccati_stabilizing(scalar(), 2.0);
  EXPECT_NEAR(sol.P(0, 0), 4.0 - 2.0 * std::sqrt(3.0), 1e-14);
  EXPECT_NEAR(sol.closedloop_abscissa, -std::sqrt(3.0) / 2.0, 1e-14);
  EXPECT_LE(sol.residual_norm, 1e-10 * sol.residual_scale);
  EXPECT_THROW(hinf::solve_riccati_stabilizing(scalar(), 0.5), PreconditionError);
}

TEST(Riccati, ZeroOutputGivesZero) {
  std::mt19937_64 rng(53);
  const Matrix a = oracle::random_metzler(3, rng, 0.5);
  const LtiSystem sys(a, Matrix::Ones(3, 1), Matrix::Zero(2, 3));
  for (double g : {0.1, 1.0, 10.0}) {
    const auto sol = hinf::solve_riccati_stabilizing(sys, g);
    EXPECT_LE(sol.P.norm(), 1e-12);
  }
  EXPECT_TRUE(hinf::check_lemma_gain(sys, 1.0).nonsingular);
}

TEST(Riccati, BatteryContract) {
  for (const LtiSystem& sys : battery_systems(40, 2024)) {
    const double g = 1.5 * hinf::static_gain_norm(sys);
    const auto sol = hinf::solve_riccati_stabilizing(sys, g, ConeSpec::orthant(sys.states()));
    EXPECT_LE(sol.residual_norm, 1e-10 * sol.residual_scale);
    EXPECT_LT(sol.closedloop_abscissa, 0.0);
    EXPECT_LT(sol.dual_closedloop_abscissa, 0.0);
    EXPECT_GE(sol.P.minCoeff(), -1e-9);
    EXPECT_LE(sol.symmetric_defect, 1e-8 * std::max(sol.P.norm(), 1e-300));

    // Independent check against the eigenvector construction.
    const Matrix ref = oracle::riccati_eigvec(sys, g);
    EXPECT_LE((sol.P - ref).norm(), 1e-7 * (1.0 + ref.norm()));
    const Matrix dual =
        sys.A().transpose() + sol.P * sys.B() * sys.B().transpose() / (g * g);
    EXPECT_LT(oracle::abscissa(dual), 0.0);

    // T = [[I, 0], [P, I]] block-triangularises H with leading block A + g^-2 B B^T P.
    const Eigen::Index n = sys.states();
    Matrix t = Matrix::Identity(2 * n, 2 * n);
    t.bottomLeftCorner(n, n) = sol.P;
    Matrix tinv = Matrix::Identity(2 * n, 2 * n);
    tinv.bottomLeftCorner(n, n) = -sol.P;
    const Matrix h = hinf::build_H(sys, g);
    const Matrix th = tinv * h * t;
    const double scale = 1.0 + h.norm() * (1.0 + t.norm() * t.norm());
    EXPECT_LE(th.bottomLeftCorner(n, n).norm(), 1e-8 * scale);
    const Matrix lead = sys.A() + sys.B() * sys.B().transpose() * sol.P / (g * g);
    EXPECT_LE((th.topLeftCorner(n, n) - lead).norm(), 1e-10 * scale);
  }
}

TEST(RiccatiInequality, Examples) {
  const auto v = hinf::verify_riccati_inequality(scalar(), 2.0, Matrix::Ones(1, 1));
  EXPECT_TRUE(v.valid);
  EXPECT_NEAR(v.lhs_max_eig, -0.75, 1e-15);
  EXPECT_NEAR(v.sym_part_min_eig, 2.0, 1e-15);
  const auto z = hinf::verify_riccati_inequality(scalar(), 2.0, Matrix::Zero(1, 1));
  EXPECT_FALSE(z.valid);
  EXPECT_EQ(z.sym_part_min_eig, 0.0);
  EXPECT_THROW(hinf::verify_riccati_inequality(scalar(), 2.0, Matrix::Ones(2, 2)), DimensionError);
}

TEST(RiccatiInequality, SolutionAtSmallerGammaIsStrict) {
  for (const LtiSystem& sys : battery_systems(20, 3)) {
    const double g = 1.5 * hinf::static_gain_norm(sys);
    const auto sol = hinf::solve_riccati_stabilizing(sys, 0.99 * g);
    const auto cert = hinf::verify_riccati_inequality(sys, g, sol.P);
    // C^T C may be singular, so the inequality is only guaranteed non-strict.
    EXPECT_LE(cert.lhs_max_eig, 1e-9 * (1.0 + sol.P.norm()));
    const auto witness = hinf::construct_riccati_inequality_witness(sys, g);
    EXPECT_TRUE(witness.valid);
    EXPECT_GT(witness.sym_part_min_eig, 0.0);
    EXPECT_LT(witness.lhs_max_eig, 0.0);
  }
}

TEST(RiccatiInequality, WitnessScalar) {
  EXPECT_TRUE(hinf::construct_riccati_inequality_witness(scalar(), 2.0).valid);
  EXPECT_THROW(hinf::construct_riccati_inequality_witness(scalar(), 0.5), InfeasibleError);
}

TEST(ConicWitness, ScalarConstruction) {
  const auto cone = ConeSpec::orthant(1);
  const auto w = hinf::construct_conic_witness(scalar(), 2.0, cone);
  EXPECT_TRUE(w.valid);
  EXPECT_FALSE(w.lifted);
  EXPECT_NEAR(w.p(0), 5.0 / 3.0, 1e-14);
  EXPECT_NEAR(w.q(0), 8.0 / 3.0, 1e-14);
  EXPECT_NEAR(w.slack1(0), 1.0, 1e-14);
  EXPECT_NEAR(w.slack2(0), 1.0, 1e-14);
  EXPECT_THROW(hinf::construct_conic_witness(scalar(), 0.5, cone), InfeasibleError);
}

TEST(ConicWitness, ScalarVerification) {
  const auto cone = ConeSpec::orthant(1);
  const Vector one = Vector::Ones(1);
  EXPECT_TRUE(hinf::verify_conic_witness(scalar(), 2.0, cone, one, Vector::Constant(1, 2.0)).valid);
  const auto boundary = hinf::verify_conic_witness(scalar(), 2.0, cone, one, one);
  EXPECT_FALSE(boundary.valid);
  EXPECT_NEAR(boundary.slack1(0), 0.75, 1e-15);
  EXPECT_EQ(boundary.slack2(0), 0.0);
  EXPECT_FALSE(
      hinf::verify_conic_witness(scalar(), 2.0, cone, Vector::Zero(1), Vector::Constant(1, 2.0))
          .valid);
  EXPECT_FALSE(
      hinf::verify_conic_witness(scalar(), 2.0, cone, one, Vector::Constant(1, -2.0)).valid);
}

TEST(ConicWitness, SlackIdentity) {
  for (const LtiSystem& sys : battery_systems(20, 4)) {
    const Eigen::Index n = sys.states();
    const double g = 1.2 * hinf::static_gain_norm(sys);
    const auto w = hinf::construct_conic_witness(sys, g, ConeSpec::orthant(n));
    EXPECT_TRUE(w.valid);
    if (w.lifted) continue;
    Vector pq(2 * n);
    pq << w.p, w.q;
    const Matrix l = hinf::build_L(sys, g);
    const double scale = 1.0 + l.norm() * pq.norm();
    EXPECT_LE((l * pq + Vector::Ones(2 * n)).norm(), 1e-10 * scale);
  }
}

TEST(BrlReport, ScalarAssembled) {
  const auto cones = cones::SystemCones::orthants(scalar());
  const auto hold = hinf::brl_report(scalar(), 2.0, cones);
  EXPECT_TRUE(hold.all_hold());
  EXPECT_TRUE(hold.consistent);
  EXPECT_FALSE(hold.boundary);
  ASSERT_TRUE(hold.riccati && hold.inequality && hold.witness);
  const auto fail = hinf::brl_report(scalar(), 0.5, cones);
  EXPECT_FALSE(fail.cond_i.holds || fail.cond_ii.holds || fail.cond_iii.holds ||
               fail.cond_iv.holds || fail.cond_v.holds);
  EXPECT_TRUE(fail.consistent);
  const auto edge = hinf::brl_report(scalar(), 1.0, cones);
  EXPECT_TRUE(edge.boundary);
  EXPECT_TRUE(edge.consistent);
}

TEST(BrlReport, BatteryEquivalence) {
  for (const LtiSystem& sys : battery_systems(30, 5)) {
    const auto cones = cones::SystemCones::orthants(sys);
    const double g0 = hinf::static_gain_norm(sys);
    for (double f : {0.5, 0.8, 1.2, 2.0}) {
      const auto r = hinf::brl_report(sys, f * g0, cones);
      EXPECT_TRUE(r.consistent);
      EXPECT_FALSE(r.boundary);
      EXPECT_EQ(r.cond_i.holds, f > 1.0);
    }
  }
}

TEST(BrlReport, InjectedDefectIsDetected) {
  const auto cones = cones::SystemCones::orthants(scalar());
  hinf::BrlOptions opt;
  opt.injected_cond_ii_axis_tol = 1.0;
  const auto r = hinf::brl_report(scalar(), 2.0, cones, opt);
  EXPECT_FALSE(r.cond_ii.holds);
  EXPECT_FALSE(r.consistent);
}

TEST(BrlReport, RejectsNonMonotoneOrUnstable) {
  const LtiSystem neg(scalar().A(), Matrix::Constant(1, 1, -1.0), scalar().C());
  EXPECT_THROW(hinf::brl_report(neg, 2.0, cones::SystemCones::orthants(neg)), PreconditionError);
  const LtiSystem unstable(Matrix::Ones(1, 1), Matrix::Ones(1, 1), Matrix::Ones(1, 1));
  EXPECT_THROW(hinf::brl_report(unstable, 2.0, cones::SystemCones::orthants(unstable)),
               PreconditionError);
}

TEST(ZeroFrequency, MonotoneSystemsPeakAtZero) {
  const auto grid = hinf::default_frequency_grid();
  for (const LtiSystem& sys : battery_systems(40, 6)) {
    const double g0 = hinf::static_gain_norm(sys);
    const auto r = hinf::frequency_sweep_norm(sys, grid);
    EXPECT_LE(std::abs(r.peak - g0), 1e-6 * (1.0 + g0));
    EXPECT_EQ(r.argmax_frequency, 0.0);
    EXPECT_NEAR(hinf::bisection_hinf_norm(sys, 1e-6), g0, 2e-6);
    EXPECT_NEAR(oracle::hinf_norm(sys, 500), g0, 1e-9 * (1.0 + g0));
  }
}

TEST(GainSingularity, ScalarExamples) {
  const auto at1 = hinf::check_lemma_gain(scalar(), 1.0);
  EXPECT_FALSE(at1.nonsingular);
  EXPECT_LE(at1.min_abs_eigenvalue, 1e-12);
  EXPECT_TRUE(hinf::check_lemma_gain(scalar(), 2.0).nonsingular);
  EXPECT_NEAR(hinf::gain_determinant_factor(scalar(), 2.0), 0.75, 1e-15);
  EXPECT_NEAR(hinf::locate_gain_singularity(scalar()), 1.0, 1e-10);
  const LtiSystem singular_a(Matrix::Zero(1, 1), Matrix::Ones(1, 1), Matrix::Ones(1, 1));
  EXPECT_THROW(hinf::check_lemma_gain(singular_a, 1.0), PreconditionError);
}

TEST(GainSingularity, DeterminantFactorisation) {
  // det H = det(A) det(-A^T) det(I - g^-2 Q^T Q).
  std::mt19937_64 rng(54);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 2 + trial % 3;
    const Matrix a = oracle::random_metzler(n, rng, 0.5);
    const LtiSystem sys(a, oracle::random_matrix(n, 2, rng), oracle::random_matrix(2, n, rng));
    for (double g : {0.7, 1.3, 4.0}) {
      const double lhs = hinf::build_H(sys, g).determinant();
      const double rhs = a.determinant() * Matrix(-a.transpose()).determinant() *
                         hinf::gain_determinant_factor(sys, g);
      EXPECT_NEAR(lhs, rhs, 1e-9 * (1.0 + std::abs(lhs)));
    }
  }
}

TEST(GainSingularity, BatteryLocatesStaticGain) {
  for (const LtiSystem& sys : battery_systems(20, 7)) {
    const double g0 = hinf::static_gain_norm(sys);
    for (double f : {1.05, 1.5, 3.0}) {
      const auto s = hinf::check_lemma_gain(sys, f * g0);
      EXPECT_TRUE(s.nonsingular);
      EXPECT_GT(s.min_abs_eigenvalue, 1e-8 * linalg::spectral_norm(hinf::build_H(sys, f * g0)));
    }
    EXPECT_NEAR(hinf::locate_gain_singularity(sys), g0, 1e-6 * g0);
  }
}
