#include "ptwg/error.hpp"

#include <utility>

namespace ptwg {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::grid_too_coarse: return "grid_too_coarse";
    case ErrorCode::non_finite: return "non_finite";
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::no_convergence: return "no_convergence";
    case ErrorCode::indeterminate_cluster: return "indeterminate_cluster";
    case ErrorCode::not_pt_symmetric: return "not_pt_symmetric";
    case ErrorCode::unsolvable_chain: return "unsolvable_chain";
    case ErrorCode::degenerate_chain: return "degenerate_chain";
    case ErrorCode::singular_gram: return "singular_gram";
    case ErrorCode::normalization_violated: return "normalization_violated";
    case ErrorCode::degenerate_splitting: return "degenerate_splitting";
    case ErrorCode::hypothesis_violated: return "hypothesis_violated";
    case ErrorCode::non_bracketing: return "non_bracketing";
    case ErrorCode::eigenvalues_not_found: return "eigenvalues_not_found";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

ConvergenceError::ConvergenceError(const std::string& what, std::vector<double> last_residuals)
    : Error(ErrorCode::no_convergence, what), residuals_(std::move(last_residuals)) {}

ClusterError::ClusterError(const std::string& what, ClusterDiagnostics diagnostics)
    : Error(ErrorCode::indeterminate_cluster, what), diagnostics_(diagnostics) {}

}  // namespace ptwg
