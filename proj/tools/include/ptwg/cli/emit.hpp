#pragma once

#include "ptwg/collision.hpp"
#include "ptwg/eigensolver.hpp"
#include "ptwg/perturbation.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ptwg::cli {

/// 17 significant digits, locale independent.
std::string format_real(double v);

/// Writes `text` verbatim, creating parent directories.
void write_file(const std::filesystem::path& path, const std::string& text);

/// index,re_lambda,im_lambda,residual,re_t_norm,im_t_norm
std::string eigenvalues_csv(const std::vector<EigenPair>& pairs);

/// mode,i,j,x1,x2,re_psi,im_psi
std::string eigenvectors_csv(const StripGeometry& geom, const std::vector<EigenPair>& pairs);

/// param,branch_id,re_lambda,im_lambda,residual; grid-major, then by branch id.
std::string trace_csv(const BranchTrace& trace);

/// Array of event records.
std::string events_json(const std::vector<CollisionEvent>& events);

/// Branch paths in the complex plane; real segments solid and thick, complex segments
/// dashed, events marked by circles.
std::string trajectories_svg(const BranchTrace& trace, double real_tol);

struct SignedAsymptotics {
  int epsilon_sign = 1;
  PerturbationReport report;
  AsymptoticsFit fit;
};

struct PerturbRun {
  std::optional<CollisionEvent> refined;  // set when the configuration asked for refinement
  std::vector<SignedAsymptotics> runs;
};

/// One flat record per epsilon sign.
std::string perturbation_report_json(const PerturbRun& run);

/// epsilon,re_lambda_plus,im_lambda_plus,re_lambda_minus,im_lambda_minus,gap_plus,gap_minus,
/// observed,predicted
std::string asymptotics_fit_csv(const PerturbRun& run);

}  // namespace ptwg::cli
