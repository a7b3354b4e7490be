#pragma once

#include "ptwg/collision.hpp"
#include "ptwg/strip.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ptwg::cli {

/// Malformed or inconsistent configuration; the message carries the line number.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScenarioConfig {
  double d = 1.0;
  double L = 10.0;
  int n1 = 400;
  int n2 = 16;
  double t = 1.0;
  double epsilon = 0.0;
  ProfileSpec alpha;
  ProfileSpec beta;

  bool operator==(const ScenarioConfig&) const = default;
};

struct SolverConfig {
  double tol = 1e-10;
  int max_restarts = 300;
  int krylov_dim = 0;
  std::uint64_t seed = 1;
  int deflation_checks = 1;

  bool operator==(const SolverConfig&) const = default;
};

struct WindowConfig {
  double re_min = 0.0;
  double re_max = 1.0;
  double im_min = -1.0;
  double im_max = 1.0;

  bool operator==(const WindowConfig&) const = default;
};

struct SpectrumConfig {
  double target_re = 0.0;
  double target_im = 0.0;
  int k = 6;
  bool write_eigenvectors = false;
  std::optional<WindowConfig> window;

  bool operator==(const SpectrumConfig&) const = default;
};

struct SyntheticConfig {
  double p0 = 0.0;
  double center = 0.0;
  double scale = 1.0;

  bool operator==(const SyntheticConfig&) const = default;
};

struct SweepConfig {
  std::string parameter = "coupling";  // coupling | perturbation
  double start = 0.0;
  double stop = 1.0;
  int steps = 11;
  WindowConfig window;
  int discovery_shifts = 4;
  int eigs_per_shift = 4;
  double min_jump = 0.02;
  double jump_factor = 5.0;
  double collision_tol = 1e-3;
  double real_tol = 1e-8;
  std::string filter = "threshold";  // none | threshold | l_stability
  double l_factor = 1.25;
  double l_stability_tol = 1e-6;
  bool refine = true;
  double refine_tol = 1e-10;
  std::string source = "solver";  // solver | synthetic_sqrt
  SyntheticConfig synthetic;

  bool operator==(const SweepConfig&) const = default;
  std::vector<double> grid() const;
};

struct ClusterConfig {
  double radius_rel = 1e-6;
  double radius_abs = 1e-9;
  double self_orthogonality_tol = 1e-3;
  double gram_tol = 1e-3;

  bool operator==(const ClusterConfig&) const = default;
};

struct PerturbConfig {
  double target = 0.0;
  std::optional<std::array<double, 2>> refine_bracket;
  std::string refine_parameter = "perturbation";
  double refine_tol = 1e-10;
  ClusterConfig cluster;
  double eps_min = 1e-6;
  double eps_max = 1e-3;
  int eps_count = 7;
  bool both_signs = true;

  bool operator==(const PerturbConfig&) const = default;
  std::vector<double> epsilons() const;  // log-spaced, positive
};

struct GaugeCheckConfig {
  bool enabled = true;
  double epsilon = 0.3;
  double target = 0.0;
  std::vector<std::array<int, 2>> grids;  // (n1, n2) pairs; empty: scenario grid only
  double slope = 2.0;
  double slope_tol = 0.3;

  bool operator==(const GaugeCheckConfig&) const = default;
};

struct CheckConfig {
  double target = 0.0;
  int k = 6;
  GaugeCheckConfig gauge;
  bool kernel = true;
  double kernel_rel_tol = 1e-3;
  bool identity = true;
  double identity_tol = 1e-12;
  bool pt_symmetry = true;
  double pt_factor = 10.0;

  bool operator==(const CheckConfig&) const = default;
};

struct OutputConfig {
  std::string dir = "out";
  bool csv = true;
  bool json = true;
  bool svg = true;

  bool operator==(const OutputConfig&) const = default;
};

struct RunConfig {
  ScenarioConfig scenario;
  SolverConfig solver;
  SpectrumConfig spectrum;
  SweepConfig sweep;
  PerturbConfig perturb;
  CheckConfig check;
  OutputConfig outputs;
  std::filesystem::path base_dir;  // directory of the config file; resolves profile tables

  bool operator==(const RunConfig& o) const {
    return scenario == o.scenario && solver == o.solver && spectrum == o.spectrum &&
           sweep == o.sweep && perturb == o.perturb && check == o.check && outputs == o.outputs;
  }

  /// Throws ConfigError for non-positive tolerances and unknown enumerations.
  void validate() const;

  WaveguideScenario make_scenario() const;
  SolverOptions solver_options() const;
  TrackerOptions tracker_options() const;
  ClusterOptions cluster_options() const;
  SweepParameter sweep_parameter() const;
};

RunConfig parse_config(const std::string& yaml_text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);
std::string to_yaml(const RunConfig& config);

}  // namespace ptwg::cli
