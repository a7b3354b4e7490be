#include "ptwg/perturbation.hpp"

#include "ptwg/error.hpp"

#include <cmath>
#include <sstream>

namespace ptwg {

namespace {

constexpr cplx kI{0.0, 1.0};

void check_beta(const BoundaryTraces& t, const Eigen::VectorXd& beta) {
  if (beta.size() != t.upper.size() || t.lower.size() != t.upper.size() ||
      t.weights.size() != t.upper.size()) {
    throw Error(ErrorCode::dimension_mismatch, "boundary traces and beta have different lengths");
  }
}

double pt_parity_residual(const DiscreteOperator& op, const GridFunction& psi) {
  const auto& g = op.grid();
  const GridFunction pt = pt_reflect(g, psi);
  const double scale = psi.cwiseAbs().maxCoeff();
  const double fixed = (pt - psi).cwiseAbs().maxCoeff();
  const double anti = (pt + psi).cwiseAbs().maxCoeff();
  return std::min(fixed, anti) / scale;
}

}  // namespace

std::string_view to_string(Prediction p) noexcept {
  return p == Prediction::real ? "Real" : "ComplexConjugatePair";
}

BoundaryTraces BoundaryTraces::of(const DiscreteOperator& op, const GridFunction& u) {
  const auto& g = op.grid();
  return {upper_trace(g, u), lower_trace(g, u), boundary_weights(g)};
}

cplx robin_pairing(const BoundaryTraces& u, const BoundaryTraces& v, const Eigen::VectorXd& beta) {
  check_beta(u, beta);
  check_beta(v, beta);
  const Eigen::ArrayXcd wb = (u.weights.array() * beta.array()).cast<cplx>();
  const cplx top = (wb * u.upper.array() * v.upper.array()).sum();
  const cplx bottom = (wb * u.lower.array() * v.lower.array()).sum();
  return kI * top - kI * bottom;
}

cplx robin_pairing(const DiscreteOperator& op, const GridFunction& u, const GridFunction& v,
                   const BoundaryProfile& beta) {
  return robin_pairing(BoundaryTraces::of(op, u), BoundaryTraces::of(op, v), beta.values());
}

SemisimpleCoefficients semisimple_coefficients(const DiscreteOperator& op,
                                               const GridFunction& psi_plus,
                                               const GridFunction& psi_minus,
                                               const BoundaryProfile& beta, double tol) {
  const cplx pp = op.t_inner(psi_plus, psi_plus);
  const cplx mm = op.t_inner(psi_minus, psi_minus);
  const cplx pm = op.t_inner(psi_plus, psi_minus);
  if (std::abs(pp - 1.0) > tol || std::abs(mm - 1.0) > tol || std::abs(pm) > tol) {
    std::ostringstream msg;
    msg << "basis is not T-biorthonormal:";
    if (std::abs(pp - 1.0) > tol) msg << " <psi+, psi+>_T = " << pp;
    if (std::abs(mm - 1.0) > tol) msg << " <psi-, psi->_T = " << mm;
    if (std::abs(pm) > tol) msg << " <psi+, psi->_T = " << pm;
    throw Error(ErrorCode::normalization_violated, msg.str());
  }
  const auto tp = BoundaryTraces::of(op, psi_plus);
  const auto tm = BoundaryTraces::of(op, psi_minus);
  SemisimpleCoefficients c;
  c.b11 = robin_pairing(tp, tp, beta.values());
  c.b22 = robin_pairing(tm, tm, beta.values());
  c.b12 = robin_pairing(tp, tm, beta.values());
  c.b21 = robin_pairing(tm, tp, beta.values());
  const double scale = std::abs(c.b11) + std::abs(c.b22) + std::abs(c.b12);
  if (std::abs(c.b12 - c.b21) > 1e-12 * std::max(scale, 1e-300)) {
    throw Error(ErrorCode::hypothesis_violated, "off-diagonal boundary pairings differ");
  }
  return c;
}

FirstOrderSplitting semisimple_first_order(cplx b11, cplx b22, cplx b12, double tol) {
  FirstOrderSplitting out;
  out.discriminant = (b11 - b22) * (b11 - b22) + 4.0 * b12 * b12;
  const double scale = std::abs(b11) + std::abs(b22) + std::abs(b12);
  if (!(std::abs(out.discriminant) > tol * scale * scale)) {
    std::ostringstream msg;
    msg << "discriminant " << out.discriminant << " vanishes: first-order splitting is degenerate";
    throw Error(ErrorCode::degenerate_splitting, msg.str());
  }
  const cplx root = std::sqrt(out.discriminant);
  out.lambda1_plus = 0.5 * (b11 + b22) + 0.5 * root;
  out.lambda1_minus = 0.5 * (b11 + b22) - 0.5 * root;
  return out;
}

HalfPowerSplitting jordan_halfpower(const BoundaryTraces& psi0, const Eigen::VectorXd& beta,
                                    int epsilon_sign, double tol) {
  check_beta(psi0, beta);
  if (epsilon_sign != 1 && epsilon_sign != -1) {
    throw Error(ErrorCode::invalid_argument, "epsilon_sign must be +1 or -1");
  }
  const Eigen::ArrayXd wb = psi0.weights.array() * beta.array();
  HalfPowerSplitting out;
  out.J = (wb * psi0.upper.real().array() * psi0.upper.imag().array()).sum();
  const double scale = (wb.abs() * psi0.upper.array().abs2()).sum();
  if (!(std::abs(out.J) > tol * scale)) {
    throw Error(ErrorCode::hypothesis_violated,
                "boundary integral of beta Re psi0 Im psi0 vanishes: half-power law does not apply");
  }
  out.lambda_half_plus = 2.0 * std::sqrt(cplx(-out.J, 0.0));
  out.lambda_half_minus = -out.lambda_half_plus;
  out.prediction = epsilon_sign * out.J < 0.0 ? Prediction::real : Prediction::complex_conjugate_pair;
  return out;
}

HalfPowerSplitting jordan_halfpower(const DiscreteOperator& op, const GridFunction& psi0,
                                    const BoundaryProfile& beta, int epsilon_sign, double tol,
                                    double pt_tol) {
  const double res = pt_parity_residual(op, psi0);
  if (res > pt_tol) {
    std::ostringstream msg;
    msg << "psi0 is not PT-fixed (parity residual " << res << ")";
    throw Error(ErrorCode::not_pt_symmetric, msg.str());
  }
  return jordan_halfpower(BoundaryTraces::of(op, psi0), beta.values(), epsilon_sign, tol);
}

BoundaryIdentity boundary_identity_check(const BoundaryTraces& psi0, const Eigen::VectorXd& beta) {
  check_beta(psi0, beta);
  const Eigen::ArrayXd wb = psi0.weights.array() * beta.array();
  BoundaryIdentity out;
  out.lhs = robin_pairing(psi0, psi0, beta);
  out.rhs = -4.0 * (wb * psi0.upper.real().array() * psi0.upper.imag().array()).sum();
  out.gap = std::abs(out.lhs - out.rhs);
  out.scale = (wb.abs() * psi0.upper.array().abs2()).sum();
  return out;
}

BoundaryIdentity boundary_identity_check(const DiscreteOperator& op, const GridFunction& psi0,
                                         const BoundaryProfile& beta) {
  return boundary_identity_check(BoundaryTraces::of(op, psi0), beta.values());
}

PerturbationReport perturbation_report(const DiscreteOperator& op, const SpectralCluster& cluster,
                                       const BoundaryProfile& beta, int epsilon_sign) {
  PerturbationReport r;
  r.kind = cluster.kind;
  r.lambda0 = cluster.center;
  r.epsilon_sign = epsilon_sign;
  r.self_orthogonality = cluster.self_orthogonality;
  if (cluster.kind == ClusterKind::semisimple_double) {
    const auto c = semisimple_coefficients(op, cluster.psi_plus, cluster.psi_minus, beta);
    r.b11 = c.b11;
    r.b22 = c.b22;
    r.b12 = c.b12;
    r.normalization_defect =
        std::max({std::abs(op.t_inner(cluster.psi_plus, cluster.psi_plus) - 1.0),
                  std::abs(op.t_inner(cluster.psi_minus, cluster.psi_minus) - 1.0),
                  std::abs(op.t_inner(cluster.psi_plus, cluster.psi_minus))});
    const auto s = semisimple_first_order(c.b11, c.b22, c.b12);
    r.lambda1_plus = s.lambda1_plus;
    r.lambda1_minus = s.lambda1_minus;
    r.discriminant = s.discriminant;
    const double scale = std::abs(s.lambda1_plus) + std::abs(s.lambda1_minus);
    const bool complex_roots = std::abs(s.lambda1_plus.imag()) > 1e-9 * scale ||
                               std::abs(s.lambda1_minus.imag()) > 1e-9 * scale;
    r.prediction = complex_roots ? Prediction::complex_conjugate_pair : Prediction::real;
    return r;
  }
  if (cluster.kind == ClusterKind::jordan_block) {
    r.pt_residual = pt_parity_residual(op, cluster.psi0);
    r.normalization_defect = cluster.chain ? cluster.chain->pairing_defect : 0.0;
    const auto h = jordan_halfpower(op, cluster.psi0, beta, epsilon_sign, 1e-10, 1e-3);
    r.J = h.J;
    r.lambda_half_plus = h.lambda_half_plus;
    r.lambda_half_minus = h.lambda_half_minus;
    r.prediction = h.prediction;
    r.identity_gap = boundary_identity_check(op, cluster.psi0, beta).gap;
    return r;
  }
  throw Error(ErrorCode::invalid_argument, "perturbation formulas need a double eigenvalue");
}

}  // namespace ptwg
