#include "ptwg/error.hpp"
#include "ptwg/spectral_cluster.hpp"

#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace ptwg;

namespace {

const cplx I(0.0, 1.0);

// [[i, 1], [1, -i]]: nilpotent, complex symmetric, kernel spanned by (1, -i).
DiscreteOperator jordan_model() {
  Eigen::MatrixXcd a(2, 2);
  a << I, 1.0, 1.0, -I;
  return DiscreteOperator::from_dense(a);
}

GridFunction vec2(cplx a, cplx b) {
  GridFunction v(2);
  v << a, b;
  return v;
}

EigenPair pair_of(const DiscreteOperator& op, cplx lambda, GridFunction psi) {
  EigenPair p;
  p.lambda = lambda;
  p.psi = std::move(psi);
  p.t_norm = op.t_inner(p.psi, p.psi);
  return p;
}

}  // namespace

TEST(JordanChain, ModelProblemOracle) {
  const auto op = jordan_model();
  const GridFunction psi0 = vec2(1.0, -I);
  EXPECT_NEAR(self_orthogonality(op, psi0), 0.0, 1e-15);

  const auto chain = solve_jordan_chain(op, 0.0, psi0);
  const GridFunction raw_phi = chain.phi0 / chain.scale;
  EXPECT_NEAR(std::abs(raw_phi[0] - (-0.5 * I)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(raw_phi[1] - 0.5), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(chain.raw_pairing - (-I)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(chain.scale * chain.scale * chain.raw_pairing - 1.0), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(chain.border), 0.0, 1e-12);

  // chain relations after rescaling
  const GridFunction r = op.apply(chain.phi0) - chain.psi0;
  EXPECT_LE(r.norm(), 1e-12);
  EXPECT_NEAR(std::abs(op.t_inner(chain.phi0, chain.psi0) - 1.0), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(op.hermitian_inner(chain.phi0, chain.psi0)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(op.t_inner(chain.psi0, chain.psi0)), 0.0, 1e-12);
  EXPECT_LE(chain.residual, 1e-12);
  EXPECT_LE(chain.pairing_defect, 1e-12);
  EXPECT_LE(chain.hermitian_defect, 1e-12);
}

TEST(JordanChain, NonSelfOrthogonalVectorIsRejected) {
  const auto op = jordan_model();
  try {
    solve_jordan_chain(op, 0.0, vec2(1.0, 0.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::unsolvable_chain);
  }
}

TEST(ClassifyCluster, SinglePairOnJordanModel) {
  const auto op = jordan_model();
  std::vector<EigenPair> pairs{pair_of(op, 0.0, vec2(1.0, -I))};
  const auto c = classify_cluster(op, pairs);
  EXPECT_EQ(c.kind, ClusterKind::jordan_block);
  ASSERT_TRUE(c.chain.has_value());
  EXPECT_LE(c.chain->residual, 1e-12);
}

TEST(ClassifyCluster, SolverPairsOnJordanModel) {
  const auto op = jordan_model();
  const auto res = solve_eigs_near(op, 0.0, 2);
  ClusterOptions opts;
  opts.radius_abs = 1e-6;
  const auto c = classify_cluster(op, res.pairs, opts);
  EXPECT_EQ(c.kind, ClusterKind::jordan_block);
  EXPECT_LT(c.self_orthogonality, 1e-6);
}

TEST(ClassifyCluster, IdentityIsSemisimple) {
  const auto op = DiscreteOperator::from_dense(Eigen::MatrixXcd::Identity(2, 2));
  std::vector<EigenPair> pairs{pair_of(op, 1.0, vec2(1.0, 0.0)), pair_of(op, 1.0, vec2(0.0, 1.0))};
  const auto c = classify_cluster(op, pairs);
  EXPECT_EQ(c.kind, ClusterKind::semisimple_double);
  EXPECT_NEAR(c.t_gram_condition, 1.0, 1e-12);
  EXPECT_NEAR(std::abs(op.t_inner(c.psi_plus, c.psi_plus) - 1.0), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(op.t_inner(c.psi_minus, c.psi_minus) - 1.0), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(op.t_inner(c.psi_plus, c.psi_minus)), 0.0, 1e-12);
}

TEST(ClassifyCluster, SimpleEigenvalue) {
  const auto op = DiscreteOperator::from_dense(Eigen::MatrixXcd::Identity(2, 2));
  const auto c = classify_cluster(op, {pair_of(op, 1.0, vec2(1.0, 0.0))});
  EXPECT_EQ(c.kind, ClusterKind::simple);
  EXPECT_NEAR(c.self_orthogonality, 1.0, 1e-14);
}

TEST(ClassifyCluster, RejectsWidelySeparatedPairs) {
  const auto op = DiscreteOperator::from_dense(Eigen::MatrixXcd::Identity(2, 2));
  std::vector<EigenPair> pairs{pair_of(op, 1.0, vec2(1.0, 0.0)), pair_of(op, 1.5, vec2(0.0, 1.0))};
  EXPECT_THROW(classify_cluster(op, pairs), Error);
  EXPECT_THROW(classify_cluster(op, {}), Error);
}

TEST(ClassifyCluster, NearlyParallelNonIsotropicVectorsAreIndeterminate) {
  const auto op = DiscreteOperator::from_dense(Eigen::MatrixXcd::Identity(2, 2));
  std::vector<EigenPair> pairs{pair_of(op, 1.0, vec2(1.0, 0.0)), pair_of(op, 1.0, vec2(1.0, 1e-9))};
  try {
    classify_cluster(op, pairs);
    FAIL();
  } catch (const ClusterError& e) {
    EXPECT_EQ(e.code(), ErrorCode::indeterminate_cluster);
    EXPECT_GT(e.diagnostics().t_gram_condition, 1e3);
    EXPECT_NEAR(e.diagnostics().self_orthogonality, 1.0, 1e-6);
  }
}

TEST(Biorthogonalize, ProducesTOrthonormalPair) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(3, 3);
  const auto op = DiscreteOperator::from_dense(m);
  GridFunction v1(3), v2(3);
  v1 << 1.0, 0.3 * I, 0.2;
  v2 << 0.1, 1.0, -0.4 * I;
  const auto [a, b] = biorthogonalize_pair(op, v1, v2);
  EXPECT_NEAR(std::abs(op.t_inner(a, a) - 1.0), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(op.t_inner(b, b) - 1.0), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(op.t_inner(a, b)), 0.0, 1e-12);
}

TEST(PtNormalize, RecoversPTFixedVector) {
  const auto g = StripGeometry::make(1.0, 5.0, 50, 8);
  const auto alpha = BoundaryProfile::from_function(
      g, [](double x) { return 0.5 - std::exp(-x * x); }, 0.5);
  const auto op = assemble_operator(g, alpha);
  const auto res = solve_eigs_near(op, 0.2, 1);
  const GridFunction rotated = std::polar(1.0, 0.7) * res.pairs.front().psi;
  const auto n = pt_normalize(op, rotated);
  EXPECT_LE(n.residual, 1e-8);
  EXPECT_LE((pt_reflect(g, n.psi) - n.psi).norm(), 1e-15);
  const auto m = pt_normalize(op, -rotated);
  EXPECT_LE((m.psi - n.psi).norm(), 1e-8);
}

TEST(PtNormalize, RejectsNonSymmetricVector) {
  const auto g = StripGeometry::make(1.0, 2.0, 20, 4);
  const auto op = assemble_operator(g, BoundaryProfile::constant(g, 0.0));
  GridFunction v = GridFunction::Zero(g.nodes());
  v[g.node(5, 0)] = 1.0;
  v[g.node(5, 4)] = I;
  v[g.node(6, 1)] = 0.5;
  EXPECT_THROW(pt_normalize(op, v), Error);
}

TEST(ConjugationDefect, IgnoresOuterRing) {
  const std::vector<cplx> values{cplx(1, 0.1), cplx(1, -0.1), cplx(2, 0.0), cplx(3, 0.5)};
  EXPECT_NEAR(conjugation_defect(values, 1.0, 1e-9), 0.0, 1e-15);
  const std::vector<cplx> broken{cplx(1, 0.1), cplx(1, -0.2), cplx(3, 0.5)};
  EXPECT_NEAR(conjugation_defect(broken, 1.0, 1e-9), 0.1, 1e-12);
}

TEST(ClassifyCluster, JordanFixtureIsDefective) {
  auto scenario = ptwg::testing::fixture_scenario("jordan_perturb");
  scenario.epsilon = ptwg::testing::kJordanEpsStar;
  const auto op = assemble_operator(scenario.geometry, scenario.effective_profile());
  const auto res = solve_eigs_near(op, ptwg::testing::kJordanLambdaStar, 2);
  ClusterOptions opts;
  opts.radius_abs = 1e-4;
  const auto c = classify_cluster(op, res.pairs, opts);
  EXPECT_EQ(c.kind, ClusterKind::jordan_block);
  EXPECT_NEAR(c.center.real(), ptwg::testing::kJordanLambdaStar, 1e-6);
  ASSERT_TRUE(c.chain.has_value());
  EXPECT_LE(c.chain->pairing_defect, 1e-8);
  EXPECT_LE(c.chain->hermitian_defect, 1e-8);
}
