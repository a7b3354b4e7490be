#pragma once

#include "ptwg/cli/config.hpp"
#include "ptwg/cli/emit.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ptwg::cli {

enum ExitCode : int { exit_ok = 0, exit_config = 1, exit_numerical = 2, exit_check_failed = 3 };

enum class CheckStatus { pass, fail, skipped };

std::string_view to_string(CheckStatus s) noexcept;

struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::skipped;
  std::string note;
  std::vector<std::pair<std::string, double>> metrics;
};

struct CheckSuite {
  std::vector<CheckResult> checks;
  bool passed() const;
};

/// Spectrum near the configured target, restricted to the window when one is set.
std::vector<EigenPair> compute_spectrum(const RunConfig& config);

/// Branch trace with refined events, from the solver or the synthetic square-root model.
BranchTrace compute_sweep(const RunConfig& config, std::ostream& log);

/// Cluster at the configured target (after optional refinement) and the asymptotic fits.
PerturbRun compute_perturbation(const RunConfig& config, std::ostream& log);

/// Gauge invariance, kernel criterion, boundary identity and PT spectral symmetry.
CheckSuite compute_checks(const RunConfig& config);

std::string check_report_json(const CheckSuite& suite);

/// The command entry points write their files into config.outputs.dir and map
/// exceptions onto exit codes (messages go to `err`).
int cmd_spectrum(const RunConfig& config, std::ostream& log, std::ostream& err);
int cmd_sweep(const RunConfig& config, std::ostream& log, std::ostream& err);
int cmd_perturb(const RunConfig& config, std::ostream& log, std::ostream& err);
int cmd_check(const RunConfig& config, std::ostream& log, std::ostream& err);

/// Runs `body`, translating ConfigError to 1 and numerical errors to 2.
int guarded(const std::function<int()>& body, std::ostream& err);

}  // namespace ptwg::cli
