#pragma once

#include "ptwg/discrete_operator.hpp"

#include <cstdint>
#include <vector>

namespace ptwg {

struct SolverOptions {
  double tol = 1e-10;
  int max_restarts = 300;
  int krylov_dim = 0;  // 0: max(2k + 1, k + 20), capped by the problem size
  std::uint64_t seed = 1;
  /// Extra deflated searches for eigenvectors a single Krylov sequence cannot see
  /// (second vector of a semisimple multiple eigenvalue).
  int deflation_checks = 1;
  /// Problems up to this size use a dense eigendecomposition.
  int dense_threshold = 64;
};

struct EigenPair {
  cplx lambda;
  GridFunction psi;  // weighted Hermitian norm 1, largest entry real positive
  double residual = 0.0;  // ||(A - lambda) psi|| / ||psi||, weighted norm
  cplx t_norm;            // <psi, psi>_T
};

struct EigenSolveResult {
  std::vector<EigenPair> pairs;  // sorted by distance to the target
  cplx shift;                    // shift actually factorized
  bool shift_perturbed = false;
  int restarts = 0;
};

/// Shift-invert Krylov-Schur for the k eigenvalues nearest `target`.
///
/// Deterministic for a fixed seed. A singular shifted matrix moves the shift by a
/// small real amount (reported in the result). Throws ConvergenceError if the
/// residual contract ||(A - lambda) psi|| <= tol * ||A||_inf is not met.
EigenSolveResult solve_eigs_near(const DiscreteOperator& op, cplx target, int k,
                                 const SolverOptions& opts = {});

}  // namespace ptwg
