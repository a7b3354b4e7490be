#include "ptwg/discrete_operator.hpp"
#include "ptwg/eigensolver.hpp"
#include "ptwg/error.hpp"
#include "ptwg/strip.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

using namespace ptwg;

namespace {

const double kPi = std::acos(-1.0);

// Eigenvalues of the separable alpha = 0 discretization: Dirichlet second difference
// in x1 plus the ghost-point Neumann second difference in x2.
double separable_eigenvalue(const StripGeometry& g, int k, int m) {
  const double h1 = g.h1();
  const double h2 = g.h2();
  const double a = std::sin(k * kPi / (2.0 * g.n1));
  const double b = std::sin(m * kPi / (2.0 * g.n2));
  return 4.0 / (h1 * h1) * a * a + 4.0 / (h2 * h2) * b * b;
}

GridFunction random_grid_function(const StripGeometry& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  GridFunction v(g.nodes());
  for (auto& x : v) x = cplx(u(rng), u(rng));
  return v;
}

BoundaryProfile bump_profile(const StripGeometry& g) {
  return BoundaryProfile::from_function(
      g, [](double x) { return 0.5 - std::exp(-x * x) + 0.3 * std::exp(-(x - 1) * (x - 1)); }, 0.5);
}

}  // namespace

TEST(StripGeometry, RejectsCoarseGrids) {
  EXPECT_THROW(StripGeometry::make(1.0, 10.0, 4, 16), Error);
  try {
    StripGeometry::make(1.0, 10.0, 400, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::grid_too_coarse);
  }
  EXPECT_THROW(StripGeometry::make(-1.0, 10.0, 400, 16), Error);
}

TEST(StripGeometry, NodeLayoutIsTransverseFastest) {
  const auto g = StripGeometry::make(1.0, 10.0, 40, 8);
  EXPECT_EQ(g.node(0, 0), 0);
  EXPECT_EQ(g.node(0, 8), 8);
  EXPECT_EQ(g.node(1, 0), 9);
  EXPECT_EQ(g.nodes(), 41 * 9);
  EXPECT_DOUBLE_EQ(g.x1(0), -10.0);
  EXPECT_DOUBLE_EQ(g.x1(40), 10.0);
  EXPECT_DOUBLE_EQ(g.x2(8), 1.0);
}

TEST(StripGeometry, ExtensionKeepsSpacingAndParity) {
  const auto g = StripGeometry::make(1.0, 10.0, 400, 16);
  const auto e = g.extended(1.25);
  EXPECT_NEAR(e.h1(), g.h1(), 1e-14);
  EXPECT_EQ((e.n1 - g.n1) % 2, 0);
  EXPECT_NEAR(e.L, 12.5, 1e-12);
  EXPECT_THROW(g.extended(0.5), Error);
}

TEST(BoundaryProfile, DerivativesOfQuadraticAreExact) {
  const auto g = StripGeometry::make(1.0, 2.0, 40, 4);
  const auto p = BoundaryProfile::from_function(g, [](double x) { return 3.0 * x * x - x + 1.0; }, 0.0);
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double x = g.x1(static_cast<int>(i));
    EXPECT_NEAR(p.first_derivative()[i], 6.0 * x - 1.0, 1e-10);
    EXPECT_NEAR(p.second_derivative()[i], 6.0, 1e-8);
  }
}

TEST(BoundaryProfile, SampleCountMustMatchGrid) {
  const auto g = StripGeometry::make(1.0, 2.0, 40, 4);
  try {
    BoundaryProfile::from_samples(g, Eigen::VectorXd::Zero(10), 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::dimension_mismatch);
  }
}

TEST(BoundaryProfile, ExtensionPadsWithAsymptote) {
  const auto g = StripGeometry::make(1.0, 10.0, 100, 8);
  const auto p = bump_profile(g);
  const auto e = g.extended(1.5);
  const auto q = p.extended_to(e);
  ASSERT_EQ(q.size(), e.n1 + 1);
  const Eigen::Index off = (q.size() - p.size()) / 2;
  EXPECT_DOUBLE_EQ(q[0], 0.5);
  EXPECT_DOUBLE_EQ(q[off + 50], p[50]);
  EXPECT_THROW(p.extended_to(StripGeometry::make(1.0, 10.0, 200, 8)), Error);
}

TEST(BoundaryProfile, BumpsAndTables) {
  EXPECT_DOUBLE_EQ(compact_bump(2.0, 1.0, 1.0, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(compact_bump(0.0, 2.0, 1.0, 0.0), 2.0);
  EXPECT_DOUBLE_EQ(gaussian_bump(1.0, 1.0, 1.0, 1.0), 1.0);

  std::istringstream in("# x value\n-1, 0\n0 1\n1, 0\n");
  const auto table = read_profile_table(in);
  ASSERT_EQ(table.size(), 3u);
  const auto g = StripGeometry::make(1.0, 2.0, 8, 4);
  const auto p = resample_table(g, table);
  EXPECT_DOUBLE_EQ(p[4], 1.0);   // x = 0
  EXPECT_DOUBLE_EQ(p[3], 0.5);   // x = -0.5
  EXPECT_DOUBLE_EQ(p[0], 0.0);   // constant extension
  std::istringstream bad("0 1\n-1 2\n");
  EXPECT_THROW(read_profile_table(bad), Error);
}

TEST(BoundaryProfile, SpecSampling) {
  const auto g = StripGeometry::make(1.0, 10.0, 80, 4);
  ProfileSpec spec;
  spec.baseline = 2.0;
  spec.terms.push_back({BumpTerm::Kind::gaussian, -1.1, 5.0, 0.0});
  const auto p = sample_profile(g, spec);
  EXPECT_DOUBLE_EQ(p[40], 0.9);
  EXPECT_DOUBLE_EQ(p.asymptote(), 2.0);
  spec.terms.front().width = 0.0;
  EXPECT_THROW(sample_profile(g, spec), Error);
}

TEST(Weights, TrapezoidSumsToArea) {
  const auto g = StripGeometry::make(1.5, 7.0, 70, 12);
  const auto op = assemble_operator(g, BoundaryProfile::constant(g, 0.0));
  EXPECT_NEAR(op.weights().sum(), 4.0 * 1.5 * 7.0, 1e-12);
  EXPECT_NEAR(boundary_weights(g).sum(), 14.0, 1e-12);
}

TEST(Assembly, ZeroCouplingMatchesSeparableSpectrum) {
  const auto g = StripGeometry::make(1.0, 10.0, 400, 16);
  const auto op = assemble_operator(g, BoundaryProfile::constant(g, 0.0));
  const auto res = solve_eigs_near(op, 0.0, 4);
  const double expected[] = {separable_eigenvalue(g, 1, 0), separable_eigenvalue(g, 2, 0),
                             separable_eigenvalue(g, 3, 0), separable_eigenvalue(g, 4, 0)};
  ASSERT_EQ(res.pairs.size(), 4u);
  for (int k = 0; k < 4; ++k) {
    EXPECT_NEAR(res.pairs[k].lambda.real(), expected[k], 1e-11);
    EXPECT_NEAR(res.pairs[k].lambda.imag(), 0.0, 1e-11);
  }
  // analytic rectangle mode pi^2 / (2L)^2
  EXPECT_NEAR(res.pairs[0].lambda.real(), kPi * kPi / 400.0, 1e-5);
}

TEST(Assembly, WeightedMatrixIsSymmetric) {
  const auto g = StripGeometry::make(1.0, 10.0, 100, 8);
  const auto op = assemble_operator(g, bump_profile(g));
  EXPECT_LE(op.weighted_symmetry_defect(), 1e-12 * op.norm_inf());
}

TEST(Assembly, TFormSymmetryHoldsForRandomVectors) {
  const auto g = StripGeometry::make(1.0, 5.0, 50, 8);
  const auto op = assemble_operator(g, bump_profile(g));
  const auto u = random_grid_function(g, 1);
  const auto v = random_grid_function(g, 2);
  const cplx a = op.t_inner(op.apply(u), v);
  const cplx b = op.t_inner(u, op.apply(v));
  EXPECT_LE(std::abs(a - b), 1e-12 * std::abs(a));
}

TEST(Assembly, CommutesWithPT) {
  const auto g = StripGeometry::make(1.0, 5.0, 50, 8);
  const auto op = assemble_operator(g, bump_profile(g));
  const auto u = random_grid_function(g, 3);
  const GridFunction lhs = pt_reflect(g, op.apply(pt_reflect(g, u)));
  EXPECT_LE((lhs - op.apply(u)).norm(), 1e-12 * op.apply(u).norm());
  EXPECT_LE((pt_reflect(g, pt_reflect(g, u)) - u).norm(), 0.0);
  EXPECT_LE((parity_reflect(g, parity_reflect(g, u)) - u).norm(), 0.0);
}

TEST(Assembly, DirichletRowsStayOutOfTheSpectrumOfInterest) {
  const auto g = StripGeometry::make(1.0, 5.0, 50, 8);
  const auto op = assemble_operator(g, bump_profile(g));
  const auto& a = op.matrix();
  double interior = 0.0;
  for (int i = 1; i < g.n1; ++i) {
    for (int j = 0; j <= g.n2; ++j) {
      double row = 0.0;
      for (int c = 0; c < g.nodes(); ++c) row += std::abs(a.coeff(g.node(i, j), c));
      interior = std::max(interior, row);
    }
  }
  for (int j = 0; j <= g.n2; ++j) {
    EXPECT_GT(a.coeff(g.node(0, j), g.node(0, j)).real(), interior);
    EXPECT_GT(a.coeff(g.node(g.n1, j), g.node(g.n1, j)).real(), interior);
  }
}

TEST(Gauge, ZeroEpsilonReproducesTheOperator) {
  const auto g = StripGeometry::make(1.0, 5.0, 50, 8);
  const auto alpha = bump_profile(g);
  const auto beta = BoundaryProfile::from_function(g, [](double x) { return x * std::exp(-x * x); }, 0.0);
  const auto a = assemble_operator(g, alpha);
  const auto b = assemble_gauge_transformed(g, alpha, beta, 0.0);
  EXPECT_EQ(SparseMatrixC(a.matrix() - b.matrix()).norm(), 0.0);
  EXPECT_EQ((gauge_phase(g, beta, 0.0) - GridFunction::Ones(g.nodes())).norm(), 0.0);
}

TEST(Gauge, PhaseHasUnitModulus) {
  const auto g = StripGeometry::make(1.0, 5.0, 50, 8);
  const auto beta = bump_profile(g);
  const auto ph = gauge_phase(g, beta, 0.7);
  EXPECT_NEAR(ph.cwiseAbs().maxCoeff(), 1.0, 1e-15);
  EXPECT_NEAR(ph.cwiseAbs().minCoeff(), 1.0, 1e-15);
}

TEST(Transverse, ConstantCouplingSpectrum) {
  const auto t = transverse_operator(1.0, 200, 0.5);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(t);
  std::vector<double> re;
  for (const auto& z : es.eigenvalues()) re.push_back(z.real());
  std::sort(re.begin(), re.end());
  EXPECT_NEAR(re[0], 0.25, 1e-3);
  EXPECT_NEAR(re[1], kPi * kPi / 4.0, 1e-3);
}

TEST(Transverse, ThresholdAndBlockAgree) {
  const auto g = StripGeometry::make(1.0, 2.0, 20, 64);
  const auto op = assemble_operator(g, BoundaryProfile::constant(g, 0.5));
  const Eigen::MatrixXcd block = transverse_block(op, 10);
  const Eigen::MatrixXcd direct = transverse_operator(1.0, 64, 0.5);
  EXPECT_LE((block - direct).cwiseAbs().maxCoeff(), 1e-10 * direct.cwiseAbs().maxCoeff());
  EXPECT_NEAR(essential_threshold(g, 0.5), 0.25, 1e-3);
  EXPECT_NEAR(essential_threshold(g, 5.0), kPi * kPi / 4.0, 1e-3);
}

TEST(TailMass, LocalizedAndSpreadFunctions) {
  const auto g = StripGeometry::make(1.0, 10.0, 100, 4);
  const auto op = assemble_operator(g, BoundaryProfile::constant(g, 0.0));
  GridFunction loc(g.nodes()), flat = GridFunction::Ones(g.nodes());
  for (int i = 0; i <= g.n1; ++i) {
    for (int j = 0; j <= g.n2; ++j) loc[g.node(i, j)] = std::exp(-g.x1(i) * g.x1(i));
  }
  EXPECT_LT(tail_mass(op, loc), 1e-30);
  EXPECT_NEAR(tail_mass(op, flat), 0.1, 0.02);
}

TEST(Assembly, LowestModeConvergesQuadratically) {
  std::vector<double> hs, errors;
  for (int refine : {1, 2, 4}) {
    const auto g = StripGeometry::make(1.0, 10.0, 100 * refine, 4 * refine);
    const auto op = assemble_operator(g, BoundaryProfile::constant(g, 0.0));
    const double lambda = solve_eigs_near(op, 0.03, 1).pairs.front().lambda.real();
    hs.push_back(g.h1());
    errors.push_back(std::abs(lambda - kPi * kPi / 400.0));
  }
  const double slope = std::log(errors[0] / errors[2]) / std::log(hs[0] / hs[2]);
  EXPECT_NEAR(slope, 2.0, 0.3);
}

TEST(Gauge, DiagonalSimilarityKeepsTheSpectrum) {
  const auto g = StripGeometry::make(1.0, 2.0, 16, 4);
  const auto alpha = bump_profile(g);
  const auto beta = BoundaryProfile::from_function(g, [](double x) { return std::exp(-x * x); }, 0.0);
  const auto op = assemble_operator(g, alpha.combined(1.0, beta, 0.4));
  const GridFunction d = gauge_phase(g, beta, 0.4);
  const Eigen::MatrixXcd a(op.matrix());
  const Eigen::MatrixXcd s = d.cwiseInverse().asDiagonal() * a * d.asDiagonal();
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> ea(a), es(s);
  const double scale = op.norm_inf();
  for (const auto& z : ea.eigenvalues()) {
    double best = 1e300;
    for (const auto& w : es.eigenvalues()) best = std::min(best, std::abs(z - w));
    EXPECT_LE(best, 1e-9 * scale);
  }
}

TEST(Gauge, TransformedOperatorMatchesUnderRefinement) {
  std::vector<double> hs, diffs;
  for (int refine : {1, 2, 4}) {
    const auto g = StripGeometry::make(1.0, 5.0, 50 * refine, 4 * refine);
    const auto alpha = BoundaryProfile::from_function(
        g, [](double x) { return 0.5 - std::exp(-x * x); }, 0.5);
    const auto beta = BoundaryProfile::from_function(
        g, [](double x) { return std::exp(-(x - 0.5) * (x - 0.5)) - std::exp(-(x + 0.5) * (x + 0.5)); },
        0.0);
    const auto direct = assemble_operator(g, alpha.combined(1.0, beta, 0.3));
    const auto gauged = assemble_gauge_transformed(g, alpha, beta, 0.3);
    const cplx a = solve_eigs_near(direct, 0.17, 1).pairs.front().lambda;
    const cplx b = solve_eigs_near(gauged, 0.17, 1).pairs.front().lambda;
    hs.push_back(g.h1());
    diffs.push_back(std::abs(a - b));
  }
  const double slope = std::log(diffs[0] / diffs[2]) / std::log(hs[0] / hs[2]);
  EXPECT_NEAR(slope, 2.0, 0.3);
}
