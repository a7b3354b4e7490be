#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ptwg {

enum class ErrorCode {
  invalid_argument,
  grid_too_coarse,
  non_finite,
  dimension_mismatch,
  no_convergence,
  indeterminate_cluster,
  not_pt_symmetric,
  unsolvable_chain,
  degenerate_chain,
  singular_gram,
  normalization_violated,
  degenerate_splitting,
  hypothesis_violated,
  non_bracketing,
  eigenvalues_not_found,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Base exception for all numerical and contract failures raised by the core.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised when the eigensolver exhausts its restarts; carries the last residual estimates.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> last_residuals);
  const std::vector<double>& last_residuals() const noexcept { return residuals_; }

 private:
  std::vector<double> residuals_;
};

/// Diagnostics of a cluster that is neither clearly semisimple nor clearly defective.
struct ClusterDiagnostics {
  double hermitian_gram_ratio = 0.0;  // sigma_min / sigma_max of the Hermitian Gram matrix
  double t_gram_condition = 0.0;      // Hermitian Gram norm over the smallest singular value of the T-Gram matrix
  double self_orthogonality = 0.0;    // |<psi, psi>_T| / ||psi||^2 of the dominant direction
};

class ClusterError : public Error {
 public:
  ClusterError(const std::string& what, ClusterDiagnostics diagnostics);
  const ClusterDiagnostics& diagnostics() const noexcept { return diagnostics_; }

 private:
  ClusterDiagnostics diagnostics_;
};

}  // namespace ptwg
