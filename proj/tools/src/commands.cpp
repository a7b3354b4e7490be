#include "ptwg/cli/commands.hpp"

#include "json.hpp"
#include "ptwg/error.hpp"
#include "ptwg/solvability.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <ostream>

namespace ptwg::cli {

namespace {

namespace fs = std::filesystem;

DiscreteOperator assemble(const WaveguideScenario& s) {
  return assemble_operator(s.geometry, s.effective_profile());
}

ComplexWindow to_window(const WindowConfig& w) { return {w.re_min, w.re_max, w.im_min, w.im_max}; }

bool nearly_real(cplx z) { return std::abs(z.imag()) <= 1e-8 * (1.0 + std::abs(z)); }

fs::path out_path(const RunConfig& c, const char* name) { return fs::path(c.outputs.dir) / name; }

std::pair<cplx, cplx> synthetic_pair(const SyntheticConfig& s, double p) {
  const cplx r = s.scale * std::sqrt(cplx(s.p0 - p, 0.0));
  return {s.center + r, s.center - r};
}

/// Character-changing if the two eigenvalues near `target` switch between real and
/// complex across the bracket, pass-through otherwise.
CollisionEvent bracket_event(const WaveguideScenario& sc, SweepParameter which,
                             const std::array<double, 2>& bracket, double target,
                             const SolverOptions& opts) {
  const auto lo = colliding_pairs(sc, which, bracket[0], cplx(target, 0.0), opts);
  const auto hi = colliding_pairs(sc, which, bracket[1], cplx(target, 0.0), opts);
  const cplx dlo = lo[0].lambda - lo[1].lambda;
  const cplx dhi = hi[0].lambda - hi[1].lambda;
  CollisionEvent e;
  e.bracket = {bracket[0], bracket[1]};
  e.param_star = 0.5 * (bracket[0] + bracket[1]);
  e.lambda_star = cplx(target, 0.0);
  e.branches = {0, 1};
  const bool real_lo = (dlo * dlo).real() > 0.0;
  const bool real_hi = (dhi * dhi).real() > 0.0;
  if (real_lo && !real_hi) {
    e.kind = EventKind::real_to_complex;
  } else if (!real_lo && real_hi) {
    e.kind = EventKind::complex_to_real;
  } else {
    e.kind = EventKind::pass_through;
  }
  return e;
}

CheckResult pt_symmetry_check(const RunConfig& c, const std::vector<EigenPair>& pairs) {
  CheckResult r{"pt_symmetry", CheckStatus::skipped, "", {}};
  if (pairs.empty()) {
    r.note = "no eigenvalues";
    return r;
  }
  std::vector<cplx> values;
  double scale = 1.0;
  for (const auto& p : pairs) {
    values.push_back(p.lambda);
    scale = std::max(scale, std::abs(p.lambda));
  }
  const double tol = c.check.pt_factor * c.solver.tol * scale;
  const double defect = conjugation_defect(values, cplx(c.check.target, 0.0), tol);
  r.status = defect <= tol ? CheckStatus::pass : CheckStatus::fail;
  r.metrics = {{"conjugation_defect", defect}, {"tolerance", tol},
               {"eigenvalues", static_cast<double>(values.size())}};
  return r;
}

CheckResult identity_check(const RunConfig& c, const DiscreteOperator& op,
                           const WaveguideScenario& sc, const std::vector<EigenPair>& pairs) {
  CheckResult r{"boundary_identity", CheckStatus::skipped, "", {}};
  const BoundaryProfile beta =
      sc.beta.is_zero() ? BoundaryProfile::constant(sc.geometry, 1.0) : sc.beta;
  double worst = 0.0;
  int tested = 0;
  for (const auto& p : pairs) {
    if (!nearly_real(p.lambda)) continue;
    const PtNormalized n = pt_normalize(op, p.psi);
    const BoundaryIdentity id = boundary_identity_check(op, n.psi, beta);
    worst = std::max(worst, id.scale > 0.0 ? id.gap / id.scale : id.gap);
    ++tested;
  }
  if (tested == 0) {
    r.note = "no real eigenvalues";
    return r;
  }
  r.status = worst <= c.check.identity_tol ? CheckStatus::pass : CheckStatus::fail;
  r.metrics = {{"worst_relative_gap", worst}, {"tolerance", c.check.identity_tol},
               {"eigenfunctions", static_cast<double>(tested)}};
  return r;
}

CheckResult kernel_check(const RunConfig& c, const DiscreteOperator& op,
                         const WaveguideScenario& sc, const std::vector<EigenPair>& pairs) {
  CheckResult r{"kernel_criterion", CheckStatus::skipped, "", {}};
  const BoundaryProfile alpha = sc.effective_profile();
  const double threshold = essential_threshold(sc.geometry, alpha.asymptote());
  const EigenPair* chosen = nullptr;
  for (const auto& p : pairs) {
    if (nearly_real(p.lambda) && p.lambda.real() < threshold) {
      chosen = &p;
      break;
    }
  }
  if (!chosen) {
    r.note = "no real eigenvalue below the essential threshold";
    return r;
  }
  const PtNormalized n = pt_normalize(op, chosen->psi);
  if (!check_decay(sc.geometry, n.psi).ok) {
    r.note = "eigenfunction does not decay inside the truncated strip";
    r.metrics = {{"lambda", chosen->lambda.real()}};
    return r;
  }
  CriterionOptions co;
  co.pt_tol = 1e-3;
  const CriterionReport k = kernel_criterion(op, n.psi, alpha, co);
  r.status = k.rel_gap <= c.check.kernel_rel_tol ? CheckStatus::pass : CheckStatus::fail;
  r.metrics = {{"lambda", chosen->lambda.real()}, {"lhs", k.lhs},
               {"rhs", k.rhs},                    {"rel_gap", k.rel_gap},
               {"tolerance", c.check.kernel_rel_tol}, {"tail_mass", k.tail_mass},
               {"C_fit", k.C_fit}};
  return r;
}

CheckResult gauge_check(const RunConfig& c) {
  CheckResult r{"gauge_invariance", CheckStatus::skipped, "", {}};
  const auto& g = c.check.gauge;
  if (!g.enabled) {
    r.note = "disabled";
    return r;
  }
  std::vector<std::array<int, 2>> grids = g.grids;
  if (grids.empty()) grids.push_back({c.scenario.n1, c.scenario.n2});
  std::vector<double> hs, diffs;
  double scale = 1.0;
  for (const auto& grid : grids) {
    RunConfig rc = c;
    rc.scenario.n1 = grid[0];
    rc.scenario.n2 = grid[1];
    const WaveguideScenario sc = rc.make_scenario();
    const BoundaryProfile base = sc.effective_profile();
    const DiscreteOperator direct = assemble_operator(sc.geometry, base.combined(1.0, sc.beta, g.epsilon));
    const DiscreteOperator gauged = assemble_gauge_transformed(sc.geometry, base, sc.beta, g.epsilon);
    const SolverOptions so = c.solver_options();
    const cplx a = solve_eigs_near(direct, cplx(g.target, 0.0), 1, so).pairs.front().lambda;
    const cplx b = solve_eigs_near(gauged, cplx(g.target, 0.0), 1, so).pairs.front().lambda;
    hs.push_back(sc.geometry.h1());
    diffs.push_back(std::abs(a - b));
    scale = std::max(scale, std::abs(a));
    r.metrics.emplace_back(fmt::format("diff_{}x{}", grid[0], grid[1]), std::abs(a - b));
  }
  const double floor = 100.0 * c.solver.tol * scale;
  const double worst = *std::max_element(diffs.begin(), diffs.end());
  if (g.epsilon == 0.0 || worst <= floor) {
    r.status = worst <= floor ? CheckStatus::pass : CheckStatus::fail;
    r.note = "operators coincide";
    return r;
  }
  if (grids.size() < 2) {
    r.note = "slope needs at least two grids";
    return r;
  }
  const LogLogFit fit = fit_power_law(hs, diffs);
  r.metrics.emplace_back("slope", fit.exponent);
  r.metrics.emplace_back("expected_slope", g.slope);
  r.metrics.emplace_back("slope_tol", g.slope_tol);
  r.status = std::abs(fit.exponent - g.slope) <= g.slope_tol ? CheckStatus::pass : CheckStatus::fail;
  return r;
}

}  // namespace

std::string_view to_string(CheckStatus s) noexcept {
  switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::skipped: return "skipped";
  }
  return "skipped";
}

bool CheckSuite::passed() const {
  return std::none_of(checks.begin(), checks.end(),
                      [](const CheckResult& r) { return r.status == CheckStatus::fail; });
}

std::vector<EigenPair> compute_spectrum(const RunConfig& config) {
  const WaveguideScenario sc = config.make_scenario();
  const DiscreteOperator op = assemble(sc);
  auto res = solve_eigs_near(op, cplx(config.spectrum.target_re, config.spectrum.target_im),
                             config.spectrum.k, config.solver_options());
  if (config.spectrum.window) {
    const ComplexWindow w = to_window(*config.spectrum.window);
    std::erase_if(res.pairs, [&w](const EigenPair& p) { return !w.contains(p.lambda); });
  }
  return std::move(res.pairs);
}

BranchTrace compute_sweep(const RunConfig& config, std::ostream& log) {
  const auto& sw = config.sweep;
  const ComplexWindow window = to_window(sw.window);
  const TrackerOptions opts = config.tracker_options();
  const std::vector<double> grid = sw.grid();
  BranchTrace trace;
  PairProvider pairs;
  WaveguideScenario sc;
  if (sw.source == "synthetic_sqrt") {
    const SyntheticConfig syn = sw.synthetic;
    const SpectrumProvider provider = [syn](double p, const std::vector<cplx>&) {
      const auto [a, b] = synthetic_pair(syn, p);
      return std::vector<SpectrumSample>{{a, 0.0}, {b, 0.0}};
    };
    trace = trace_values(provider, grid, window, opts);
    pairs = [syn](double p, cplx) { return synthetic_pair(syn, p); };
  } else {
    sc = config.make_scenario();
    trace = trace_branches(sc, config.sweep_parameter(), grid, window, opts);
  }
  fmt::print(log, "traced {} branches, {} events\n", trace.branches.size(), trace.events.size());
  if (!sw.refine) return trace;
  for (auto& e : trace.events) {
    if (e.kind == EventKind::unresolved) continue;
    try {
      e = pairs ? refine_collision(pairs, e, opts.refine_tol, opts.max_refine_iterations)
                : refine_collision(sc, config.sweep_parameter(), e, opts);
      fmt::print(log, "{} refined to {:.12g}, lambda {:.12g}{:+.3g}i\n", to_string(e.kind),
                 e.param_star, e.lambda_star.real(), e.lambda_star.imag());
    } catch (const Error& ex) {
      fmt::print(log, "{} on [{:.6g}, {:.6g}] left unrefined: {}\n", to_string(e.kind),
                 e.bracket.first, e.bracket.second, ex.what());
    }
  }
  return trace;
}

PerturbRun compute_perturbation(const RunConfig& config, std::ostream& log) {
  const auto& pc = config.perturb;
  WaveguideScenario sc = config.make_scenario();
  PerturbRun run;
  double target = pc.target;
  ClusterOptions co = config.cluster_options();
  const SolverOptions so = config.solver_options();
  if (pc.refine_bracket) {
    const SweepParameter which =
        pc.refine_parameter == "coupling" ? SweepParameter::coupling : SweepParameter::perturbation;
    TrackerOptions to = config.tracker_options();
    to.refine_tol = pc.refine_tol;
    const CollisionEvent e = bracket_event(sc, which, *pc.refine_bracket, target, so);
    run.refined = refine_collision(sc, which, e, to);
    sc = at_parameter(sc, which, run.refined->param_star);
    target = run.refined->lambda_star.real();
    fmt::print(log, "refined {} = {:.15g}, gap {:.3g}\n", to_string(which),
               run.refined->param_star, run.refined->gap);
  }
  const DiscreteOperator op = assemble(sc);
  auto pairs = solve_eigs_near(op, cplx(target, 0.0), 2, so).pairs;
  if (pairs.size() < 2) {
    throw Error(ErrorCode::eigenvalues_not_found, "fewer than two eigenvalues near the target");
  }
  const cplx mid = 0.5 * (pairs[0].lambda + pairs[1].lambda);
  if (run.refined) co.radius_abs = std::max(co.radius_abs, 1.01 * std::abs(pairs[0].lambda - mid));
  const SpectralCluster cluster = classify_cluster(op, pairs, co);
  fmt::print(log, "cluster {} at {:.15g}{:+.3g}i\n", to_string(cluster.kind),
             cluster.center.real(), cluster.center.imag());

  std::vector<int> signs{1};
  if (pc.both_signs) signs.insert(signs.begin(), -1);
  for (int sign : signs) {
    SignedAsymptotics s;
    s.epsilon_sign = sign;
    s.report = perturbation_report(op, cluster, sc.beta, sign);
    std::vector<double> eps = pc.epsilons();
    for (double& e : eps) e *= sign;
    s.fit = verify_asymptotics(sc, cluster, sc.beta, eps, so);
    fmt::print(log, "eps sign {:+d}: exponent {:.4f} (predicted {:.2f}), prefactor {:.6g} "
                    "(predicted {:.6g}), {} misclassified\n",
               sign, s.fit.fitted_exponent, s.fit.predicted_exponent, s.fit.fitted_prefactor,
               s.fit.predicted_prefactor, s.fit.misclassified);
    run.runs.push_back(std::move(s));
  }
  return run;
}

CheckSuite compute_checks(const RunConfig& config) {
  CheckSuite suite;
  suite.checks.push_back(gauge_check(config));
  const WaveguideScenario sc = config.make_scenario();
  const DiscreteOperator op = assemble(sc);
  const auto pairs =
      solve_eigs_near(op, cplx(config.check.target, 0.0), config.check.k, config.solver_options())
          .pairs;
  if (config.check.kernel) suite.checks.push_back(kernel_check(config, op, sc, pairs));
  if (config.check.identity) suite.checks.push_back(identity_check(config, op, sc, pairs));
  if (config.check.pt_symmetry) suite.checks.push_back(pt_symmetry_check(config, pairs));
  return suite;
}

std::string check_report_json(const CheckSuite& suite) {
  nlohmann::ordered_json j;
  j["passed"] = suite.passed();
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& c : suite.checks) {
    nlohmann::ordered_json e;
    e["name"] = c.name;
    e["status"] = std::string(to_string(c.status));
    if (!c.note.empty()) e["note"] = c.note;
    for (const auto& [k, v] : c.metrics) e[k] = v;
    arr.push_back(std::move(e));
  }
  j["checks"] = std::move(arr);
  return j.dump(2) + "\n";
}

int guarded(const std::function<int()>& body, std::ostream& err) {
  try {
    return body();
  } catch (const ConfigError& e) {
    fmt::print(err, "config error: {}\n", e.what());
    return exit_config;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::grid_too_coarse) {
      fmt::print(err, "config error: {}\n", e.what());
      return exit_config;
    }
    fmt::print(err, "numerical failure ({}): {}\n", to_string(e.code()), e.what());
    return exit_numerical;
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return exit_numerical;
  }
}

int cmd_spectrum(const RunConfig& config, std::ostream& log, std::ostream& err) {
  return guarded(
      [&] {
        const auto pairs = compute_spectrum(config);
        if (config.outputs.csv) {
          write_file(out_path(config, "eigenvalues.csv"), eigenvalues_csv(pairs));
          if (config.spectrum.write_eigenvectors) {
            write_file(out_path(config, "eigenvectors.csv"),
                       eigenvectors_csv(config.make_scenario().geometry, pairs));
          }
        }
        for (const auto& p : pairs) {
          fmt::print(log, "{:.15g} {:+.3g}i  residual {:.2g}\n", p.lambda.real(), p.lambda.imag(),
                     p.residual);
        }
        return static_cast<int>(exit_ok);
      },
      err);
}

int cmd_sweep(const RunConfig& config, std::ostream& log, std::ostream& err) {
  return guarded(
      [&] {
        const BranchTrace trace = compute_sweep(config, log);
        if (config.outputs.csv) write_file(out_path(config, "trace.csv"), trace_csv(trace));
        if (config.outputs.json) write_file(out_path(config, "events.json"), events_json(trace.events));
        if (config.outputs.svg) {
          write_file(out_path(config, "trajectories.svg"),
                     trajectories_svg(trace, config.sweep.real_tol));
        }
        return static_cast<int>(exit_ok);
      },
      err);
}

int cmd_perturb(const RunConfig& config, std::ostream& log, std::ostream& err) {
  return guarded(
      [&] {
        const PerturbRun run = compute_perturbation(config, log);
        if (config.outputs.json) {
          write_file(out_path(config, "perturbation_report.json"), perturbation_report_json(run));
        }
        if (config.outputs.csv) {
          write_file(out_path(config, "asymptotics_fit.csv"), asymptotics_fit_csv(run));
        }
        return static_cast<int>(exit_ok);
      },
      err);
}

int cmd_check(const RunConfig& config, std::ostream& log, std::ostream& err) {
  return guarded(
      [&] {
        const CheckSuite suite = compute_checks(config);
        if (config.outputs.json) write_file(out_path(config, "check_report.json"), check_report_json(suite));
        for (const auto& c : suite.checks) {
          fmt::print(log, "{:<18} {}{}\n", c.name, to_string(c.status),
                     c.note.empty() ? "" : " (" + c.note + ")");
        }
        return static_cast<int>(suite.passed() ? exit_ok : exit_check_failed);
      },
      err);
}

}  // namespace ptwg::cli
