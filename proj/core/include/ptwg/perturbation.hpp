#pragma once

#include "ptwg/spectral_cluster.hpp"

#include <string_view>
#include <utility>

namespace ptwg {

enum class Prediction { real, complex_conjugate_pair };

std::string_view to_string(Prediction p) noexcept;

/// Boundary values of a grid function on x2 = +d and x2 = -d with their x1 quadrature.
struct BoundaryTraces {
  Eigen::VectorXcd upper;
  Eigen::VectorXcd lower;
  Eigen::VectorXd weights;

  static BoundaryTraces of(const DiscreteOperator& op, const GridFunction& u);
};

/// i * sum w beta u+ v+ - i * sum w beta u- v-: first-order change of the T-form of the
/// operator when the boundary function moves by beta.
cplx robin_pairing(const BoundaryTraces& u, const BoundaryTraces& v, const Eigen::VectorXd& beta);
cplx robin_pairing(const DiscreteOperator& op, const GridFunction& u, const GridFunction& v,
                   const BoundaryProfile& beta);

struct SemisimpleCoefficients {
  cplx b11;
  cplx b22;
  cplx b12;
  cplx b21;  // same pairing with the arguments swapped; checked against b12
};

/// Requires <psi+, psi+>_T = <psi-, psi->_T = 1 and <psi+, psi->_T = 0 within `tol`.
SemisimpleCoefficients semisimple_coefficients(const DiscreteOperator& op,
                                               const GridFunction& psi_plus,
                                               const GridFunction& psi_minus,
                                               const BoundaryProfile& beta, double tol = 1e-6);

struct FirstOrderSplitting {
  cplx lambda1_plus;
  cplx lambda1_minus;
  cplx discriminant;  // (b11 - b22)^2 + 4 b12^2
};

/// Roots of the 2x2 first-order problem with the principal square root. Throws
/// degenerate_splitting when the discriminant is below tol * (|b11| + |b22| + |b12|)^2.
FirstOrderSplitting semisimple_first_order(cplx b11, cplx b22, cplx b12, double tol = 1e-10);

struct HalfPowerSplitting {
  double J = 0.0;  // sum w beta Re psi0 Im psi0 on x2 = +d
  cplx lambda_half_plus;
  cplx lambda_half_minus;
  Prediction prediction = Prediction::real;
};

/// J from trace samples; lambda_half = +-2 sqrt(-J). Throws hypothesis_violated when
/// |J| <= tol * sum w |beta| |psi0+|^2.
HalfPowerSplitting jordan_halfpower(const BoundaryTraces& psi0, const Eigen::VectorXd& beta,
                                    int epsilon_sign, double tol = 1e-10);
/// Also checks that psi0 is PT-fixed or PT-anti-fixed within pt_tol.
HalfPowerSplitting jordan_halfpower(const DiscreteOperator& op, const GridFunction& psi0,
                                    const BoundaryProfile& beta, int epsilon_sign,
                                    double tol = 1e-10, double pt_tol = 1e-6);

struct BoundaryIdentity {
  cplx lhs;     // i * sum w beta psi+^2 - i * sum w beta psi-^2
  double rhs;   // -4 * sum w beta Re psi+ Im psi+
  double gap;   // |lhs - rhs|
  double scale; // sum w |beta| |psi+|^2
};

BoundaryIdentity boundary_identity_check(const BoundaryTraces& psi0, const Eigen::VectorXd& beta);
BoundaryIdentity boundary_identity_check(const DiscreteOperator& op, const GridFunction& psi0,
                                         const BoundaryProfile& beta);

struct PerturbationReport {
  ClusterKind kind = ClusterKind::simple;
  cplx lambda0;
  int epsilon_sign = 1;
  // semisimple case
  cplx b11, b22, b12;
  cplx lambda1_plus, lambda1_minus;
  cplx discriminant;
  // Jordan case
  double J = 0.0;
  cplx lambda_half_plus, lambda_half_minus;
  Prediction prediction = Prediction::real;
  // preconditions as measured
  double normalization_defect = 0.0;
  double pt_residual = 0.0;
  double identity_gap = 0.0;
  double self_orthogonality = 0.0;
};

/// Dispatches on the cluster kind (semisimple_double or jordan_block).
PerturbationReport perturbation_report(const DiscreteOperator& op, const SpectralCluster& cluster,
                                       const BoundaryProfile& beta, int epsilon_sign);

}  // namespace ptwg
