#pragma once

#include "ptwg/cli/config.hpp"

#include <filesystem>
#include <string>

namespace ptwg::testing {

inline std::filesystem::path config_path(const std::string& name) {
  return std::filesystem::path(PTWG_CONFIG_DIR) / (name + ".yaml");
}

inline cli::RunConfig fixture(const std::string& name) { return cli::load_config(config_path(name)); }

inline WaveguideScenario fixture_scenario(const std::string& name) {
  return fixture(name).make_scenario();
}

// Regression values of the Jordan fixture (jordan_sweep / jordan_perturb), recorded from
// an independent dense prototype of the same discretization and confirmed by the solver.
inline constexpr double kJordanEpsStar = 0.0871755468261;
inline constexpr double kJordanLambdaStar = 2.39621952447;
inline constexpr double kJordanJ = 0.0417673657;

// Kernel fixtures: isolated eigenvalue of each profile on its configured grid.
inline constexpr double kWideWellLambda = 1.08882600269;
inline constexpr double kNarrowWellLambda = 0.174118419328;

// Pass-through fixture: the t-independent mode and the crossing parameter.
inline constexpr double kFlatModeLambda = 2.53454288649;
inline constexpr double kPassThroughT = 1.43817237274;

}  // namespace ptwg::testing
