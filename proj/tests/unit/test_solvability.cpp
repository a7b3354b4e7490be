#include "ptwg/error.hpp"
#include "ptwg/solvability.hpp"
#include "ptwg/spectral_cluster.hpp"

#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace ptwg;
using namespace ptwg::testing;

namespace {

struct KernelRun {
  double lambda = 0.0;
  CriterionReport report;
};

KernelRun run_fixture(const std::string& name, double expected_lambda) {
  const auto scenario = fixture_scenario(name);
  const auto alpha = scenario.effective_profile();
  const auto op = assemble_operator(scenario.geometry, alpha);
  const auto res = solve_eigs_near(op, expected_lambda, 1);
  const auto psi = pt_normalize(op, res.pairs.front().psi).psi;
  CriterionOptions opts;
  opts.pt_tol = 1e-3;
  return {res.pairs.front().lambda.real(), kernel_criterion(op, psi, alpha, opts)};
}

}  // namespace

TEST(KernelK, PiecewiseDefinition) {
  EXPECT_EQ(kernel_k(1.0, 2.0), -2.0);
  EXPECT_EQ(kernel_k(2.0, 1.0), 2.0);
  EXPECT_EQ(kernel_k(1.5, 1.5), 1.5);
  EXPECT_EQ(kernel_k(-3.0, -1.0), 1.0);
}

TEST(KernelIntegral, ConstantAlphaGivesZero) {
  Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(21, -1.0, 1.0);
  Eigen::VectorXd w = Eigen::VectorXd::Constant(21, 0.1);
  Eigen::VectorXd a = Eigen::VectorXd::Constant(21, 0.7);
  Eigen::VectorXd re = x.array().cos();
  Eigen::VectorXd im = x.array().sin();
  EXPECT_EQ(kernel_double_integral(x, w, a, re, im), 0.0);
  EXPECT_THROW(kernel_double_integral(x, w, a, re, im.head(5)), Error);
}

TEST(KernelIntegral, SmallHandComputedCase) {
  Eigen::VectorXd x(2), w(2), a(2), re(2), im(2);
  x << 0.0, 1.0;
  w << 1.0, 1.0;
  a << 1.0, 3.0;
  re << 2.0, 5.0;
  im << 7.0, 11.0;
  // (0, 1): K = -1, da = -2, re 2, im 11 -> 44; (1, 0): K = 1, da = 2, re 5, im 7 -> 70
  EXPECT_DOUBLE_EQ(kernel_double_integral(x, w, a, re, im), 114.0);
}

TEST(DecayCheck, ExponentialPassesAndFlatFails) {
  const auto g = StripGeometry::make(1.0, 20.0, 200, 4);
  GridFunction decaying(g.nodes()), flat = GridFunction::Ones(g.nodes());
  for (int i = 0; i <= g.n1; ++i) {
    for (int j = 0; j <= g.n2; ++j) decaying[g.node(i, j)] = std::exp(-std::abs(g.x1(i)));
  }
  const auto ok = check_decay(g, decaying);
  EXPECT_TRUE(ok.ok);
  EXPECT_LT(ok.worst_ratio, 1.0);
  const auto bad = check_decay(g, flat);
  EXPECT_FALSE(bad.ok);
  EXPECT_GT(bad.worst_ratio, 1.0);
}

TEST(KernelCriterion, ConstantCouplingHasZeroLeftSide) {
  const auto g = StripGeometry::make(1.0, 5.0, 50, 8);
  const auto alpha = BoundaryProfile::constant(g, 0.3);
  const auto op = assemble_operator(g, alpha);
  const auto res = solve_eigs_near(op, 0.1, 1);
  const auto psi = pt_normalize(op, res.pairs.front().psi).psi;
  const auto r = kernel_criterion(op, psi, alpha);
  EXPECT_EQ(r.lhs, 0.0);
  EXPECT_FALSE(r.solvable);
}

TEST(KernelCriterion, RejectsNonPTFixedVectors) {
  const auto g = StripGeometry::make(1.0, 5.0, 50, 8);
  const auto alpha = BoundaryProfile::constant(g, 0.3);
  const auto op = assemble_operator(g, alpha);
  const auto res = solve_eigs_near(op, 0.1, 1);
  const auto psi = pt_normalize(op, res.pairs.front().psi).psi;
  try {
    kernel_criterion(op, (cplx(0.0, 1.0) * psi).eval(), alpha);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::not_pt_symmetric);
  }
  EXPECT_THROW(kernel_criterion(op, psi, BoundaryProfile::constant(StripGeometry::make(1.0, 5.0, 40, 8), 0.3)),
               Error);
}

TEST(KernelCriterion, WideWellFixture) {
  const auto run = run_fixture("check_kernel_wide", kWideWellLambda);
  EXPECT_NEAR(run.lambda, kWideWellLambda, 1e-9);
  EXPECT_TRUE(run.report.decay_ok);
  EXPECT_LT(run.report.rel_gap, 1e-3);
  EXPECT_LT(run.report.lhs, 0.0);
  EXPECT_FALSE(run.report.solvable);
}

TEST(KernelCriterion, NarrowWellFixture) {
  const auto run = run_fixture("check_kernel_narrow", kNarrowWellLambda);
  EXPECT_NEAR(run.lambda, kNarrowWellLambda, 1e-9);
  EXPECT_TRUE(run.report.decay_ok);
  EXPECT_LT(run.report.rel_gap, 1e-3);
}
