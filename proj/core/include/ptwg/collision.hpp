#pragma once

#include "ptwg/perturbation.hpp"
#include "ptwg/spectral_cluster.hpp"
#include "ptwg/strip.hpp"

#include <functional>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

namespace ptwg {

/// Which scenario field the sweep parameter drives: t in Op_{t alpha + eps beta}, or eps.
enum class SweepParameter { coupling, perturbation };

std::string_view to_string(SweepParameter p) noexcept;

WaveguideScenario at_parameter(const WaveguideScenario& base, SweepParameter which, double value);

struct ComplexWindow {
  double re_min = 0.0;
  double re_max = 1.0;
  double im_min = -1.0;
  double im_max = 1.0;

  bool contains(cplx z) const noexcept {
    return z.real() >= re_min && z.real() <= re_max && z.imag() >= im_min && z.imag() <= im_max;
  }
  cplx center() const noexcept { return {0.5 * (re_min + re_max), 0.5 * (im_min + im_max)}; }
};

/// Removal of discrete modes of the truncated rectangle that belong to the continuum.
enum class EssentialFilter { none, threshold, threshold_and_l_stability };

struct TrackerOptions {
  SolverOptions solver;
  int discovery_shifts = 4;  // shifts spread along the real extent of the window
  int eigs_per_shift = 4;
  double real_tol = 1e-8;       // |Im lambda| <= real_tol (1 + |lambda|) counts as real
  double collision_tol = 1e-3;  // inter-branch distance marking a near approach
  double jump_factor = 5.0;     // jump bound = max(jump_factor * predicted step, min_jump)
  double min_jump = 0.02;
  double tie_tol = 1e-9;        // relative distance tie between two candidates
  EssentialFilter filter = EssentialFilter::threshold;
  double l_factor = 1.25;
  double l_stability_tol = 1e-6;
  double refine_tol = 1e-10;
  int max_refine_iterations = 200;
  ClusterOptions cluster;
};

struct SpectrumSample {
  cplx lambda;
  double residual = 0.0;
};

/// Eigenvalues at one parameter value; `predicted` are the continuation targets.
using SpectrumProvider =
    std::function<std::vector<SpectrumSample>(double param, const std::vector<cplx>& predicted)>;

enum class EventKind { pass_through, real_to_complex, complex_to_real, unresolved };

std::string_view to_string(EventKind k) noexcept;

struct CollisionEvent {
  double param_star = 0.0;
  cplx lambda_star;
  EventKind kind = EventKind::unresolved;
  double self_orthogonality = 0.0;
  bool refined = false;
  std::pair<double, double> bracket{0.0, 0.0};
  std::pair<int, int> branches{-1, -1};
  std::optional<ClusterKind> cluster_kind;
  std::optional<cplx> discriminant;  // first-order discriminant along the sweep direction
  double gap = 0.0;                  // |lambda_a - lambda_b| at param_star
};

struct Branch {
  int id = 0;
  std::vector<std::optional<cplx>> values;  // aligned with param_grid
  std::vector<double> residuals;
  bool terminated = false;
};

struct BranchTrace {
  std::vector<double> param_grid;
  std::vector<Branch> branches;
  std::vector<CollisionEvent> events;
};

/// Continuation and event detection over an arbitrary spectrum source.
BranchTrace trace_values(const SpectrumProvider& provider, const std::vector<double>& param_grid,
                         const ComplexWindow& window, const TrackerOptions& opts = {});

/// Spectrum source backed by the eigensolver, with window and essential filters applied.
SpectrumProvider scenario_provider(const WaveguideScenario& base, SweepParameter which,
                                   const ComplexWindow& window, const TrackerOptions& opts);

BranchTrace trace_branches(const WaveguideScenario& scenario, SweepParameter which,
                           const std::vector<double>& param_grid, const ComplexWindow& window,
                           const TrackerOptions& opts = {});

/// The two eigenvalues of the colliding pair at a parameter value, near `hint`.
using PairProvider = std::function<std::pair<cplx, cplx>(double param, cplx hint)>;

/// Bisection on Re[(la - lb)^2] (character-changing events) or golden-section search on
/// |la - lb| (pass-through) until the bracket is shorter than tol. Throws non_bracketing.
CollisionEvent refine_collision(const PairProvider& pair, const CollisionEvent& event, double tol,
                                int max_iterations = 200);

/// Same, on the scenario; also classifies the cluster at the refined parameter.
CollisionEvent refine_collision(const WaveguideScenario& scenario, SweepParameter which,
                                const CollisionEvent& event, const TrackerOptions& opts);

/// Two eigenpairs nearest `hint` at a parameter value.
std::vector<EigenPair> colliding_pairs(const WaveguideScenario& scenario, SweepParameter which,
                                       double param, cplx hint, const SolverOptions& opts);

struct AsymptoticsFit {
  std::vector<double> epsilons;
  std::vector<double> gaps;        // Jordan: |l+ - l-| / 2; semisimple: |l+ - l0|
  std::vector<double> gaps_minus;  // semisimple: |l- - l0|
  std::vector<cplx> lambda_plus;
  std::vector<cplx> lambda_minus;
  double fitted_exponent = 0.0;
  double fitted_prefactor = 0.0;
  double fitted_exponent_minus = 0.0;
  double fitted_prefactor_minus = 0.0;
  double predicted_exponent = 0.0;
  double predicted_prefactor = 0.0;
  double predicted_prefactor_minus = 0.0;
  std::vector<Prediction> observed;
  std::vector<Prediction> predicted;
  int misclassified = 0;
};

struct LogLogFit {
  double exponent = 0.0;
  double prefactor = 0.0;
};

/// Least squares of log y = log C + p log x.
LogLogFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

/// Complex if |Im(a - b)| > |Re(a - b)|.
Prediction classify_pair(cplx a, cplx b) noexcept;

/// For each eps, solves Op_{alpha + eps beta} (alpha taken from `scenario` at its
/// current t and epsilon) near the cluster center and fits the splitting law.
/// Requires >= 5 values of one sign spanning >= 2 decades.
AsymptoticsFit verify_asymptotics(const WaveguideScenario& scenario, const SpectralCluster& cluster,
                                  const BoundaryProfile& beta, const std::vector<double>& epsilons,
                                  const SolverOptions& opts = {});

}  // namespace ptwg
