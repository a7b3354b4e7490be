#pragma once

#include "ptwg/eigensolver.hpp"

#include <string_view>
#include <utility>
#include <vector>

namespace ptwg {

enum class ClusterKind { simple, semisimple_double, jordan_block };

std::string_view to_string(ClusterKind kind) noexcept;

struct ClusterOptions {
  /// Pairs must lie within radius_rel * |center| + radius_abs of their mean.
  double radius_rel = 1e-6;
  double radius_abs = 1e-9;
  /// |<psi, psi>_T| / ||psi||^2 below this marks a self-orthogonal direction.
  double self_orthogonality_tol = 1e-3;
  /// Two vectors are semisimple if t_gram_condition < 1 / gram_tol.
  double gram_tol = 1e-3;
  /// Relative PT-phase defect accepted by pt_normalize.
  double pt_tol = 1e-3;
};

/// Result of a Jordan-chain solve: (A - lambda0) phi0 = psi0 with
/// <phi0, psi0>_T = 1 and (phi0, psi0) = 0.
struct JordanChain {
  GridFunction psi0;
  GridFunction phi0;
  cplx raw_pairing;   // <phi, psi0>_T before rescaling
  cplx scale;         // common factor c with c^2 * raw_pairing = 1
  cplx border;        // multiplier of the border column; zero for an exact chain
  double residual = 0.0;          // ||(A - lambda0) phi0 - psi0|| / ||psi0||
  double pairing_defect = 0.0;    // |<phi0, psi0>_T - 1|
  double hermitian_defect = 0.0;  // |(phi0, psi0)| / (||phi0|| ||psi0||)
  /// +1 if the rescaled psi0 stays PT-fixed, -1 if the rescaling made it PT-anti-fixed
  /// (negative raw pairing); the chain relations hold either way.
  int pt_parity = 1;
};

struct SpectralCluster {
  cplx center;
  double radius = 0.0;
  std::vector<EigenPair> pairs;
  ClusterKind kind = ClusterKind::simple;
  GridFunction psi_plus;   // semisimple_double
  GridFunction psi_minus;  // semisimple_double
  GridFunction psi0;       // jordan_block (and the single vector of a simple cluster)
  GridFunction phi0;       // jordan_block
  std::optional<JordanChain> chain;
  double self_orthogonality = 0.0;  // of the dominant direction
  double t_gram_condition = 1.0;
};

struct PtNormalized {
  GridFunction psi;
  double theta = 0.0;
  double residual = 0.0;  // max node |PT psi - psi| / max node |psi| before averaging
};

/// |<psi, psi>_T| / ||psi||^2.
double self_orthogonality(const DiscreteOperator& op, const GridFunction& psi);

/// Multiplies psi by e^{i theta / 2} where PT psi = e^{i theta} psi, making it PT-fixed.
/// The overall sign is fixed by making the real part of the largest entry positive.
/// The returned vector is the PT-average (psi + PT psi) / 2, exactly PT-fixed; `residual`
/// is the defect measured before averaging.
PtNormalized pt_normalize(const DiscreteOperator& op, const GridFunction& psi,
                          double tol = 1e-3);

/// Bordered solve of [(A - lambda0) phi + mu conj(psi0) = psi0; (phi, psi0) = 0] followed
/// by the common rescaling. Throws unsolvable_chain if psi0 is not self-orthogonal
/// within `tol`, degenerate_chain if the pairing vanishes.
JordanChain solve_jordan_chain(const DiscreteOperator& op, cplx lambda0, const GridFunction& psi0,
                               double tol = 1e-3);

/// T-bilinear Gram-Schmidt: outputs have <u, u>_T = 1 and <u+, u->_T = 0.
std::pair<GridFunction, GridFunction> biorthogonalize_pair(const DiscreteOperator& op,
                                                           const GridFunction& v1,
                                                           const GridFunction& v2,
                                                           double tol = 1e-10);

SpectralCluster classify_cluster(const DiscreteOperator& op, std::vector<EigenPair> pairs,
                                 const ClusterOptions& opts = {});

/// Largest distance from conj(lambda) to the nearest member of `values`, ignoring the
/// outermost ring |lambda - target| >= max distance - ring_tol whose partners may have
/// been cut off by the nearest-k selection.
double conjugation_defect(const std::vector<cplx>& values, cplx target, double ring_tol);

}  // namespace ptwg
