// One PASS/FAIL line per acceptance criterion; exit status 1 if any criterion fails.

#include "ptwg/cli/commands.hpp"
#include "ptwg/error.hpp"
#include "ptwg/perturbation.hpp"
#include "ptwg/solvability.hpp"

#include "fixtures.hpp"

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace ptwg;
using namespace ptwg::cli;
namespace fs = std::filesystem;

namespace {

const double kPi = std::acos(-1.0);
const cplx kI(0.0, 1.0);

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Clock {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// Scenario fixtures and the target each one is analysed at.
struct ScenarioFixture {
  const char* name;
  double target;
};

std::vector<ScenarioFixture> scenario_fixtures() {
  std::vector<ScenarioFixture> out;
  for (const char* name : {"baseline", "jordan_sweep", "jordan_perturb", "semisimple_perturb",
                           "check_gauge", "check_kernel_wide", "check_kernel_narrow",
                           "passthrough_sweep"}) {
    const auto c = testing::fixture(name);
    const std::string n = name;
    double target = c.spectrum.target_re;
    if (n.rfind("check_", 0) == 0) target = c.check.target;
    if (n.find("perturb") != std::string::npos) target = c.perturb.target;
    if (n.find("sweep") != std::string::npos) {
      target = 0.5 * (c.sweep.window.re_min + c.sweep.window.re_max);
    }
    out.push_back({name, target});
  }
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome baseline_spectrum() {
  const Clock clock;
  const auto g = StripGeometry::make(1.0, 1.0, 8, 200);
  const auto op = assemble_operator(g, BoundaryProfile::constant(g, 0.5));
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(transverse_block(op, g.n1 / 2));
  std::vector<double> re;
  for (const auto& z : es.eigenvalues()) re.push_back(z.real());
  std::sort(re.begin(), re.end());
  const double e0 = std::abs(re[0] - 0.25);
  const double e1 = std::abs(re[1] - kPi * kPi / 4.0);
  const double t = clock.seconds();
  return {e0 <= 1e-3 && e1 <= 1e-3 && t < 10.0,
          fmt::format("|mu0 - 0.25| = {:.3e}, |mu1 - pi^2/4| = {:.3e}, {:.1f} s", e0, e1, t)};
}

Outcome gauge_invariance() {
  const Clock clock;
  const auto suite = compute_checks(testing::fixture("check_gauge"));
  for (const auto& c : suite.checks) {
    if (c.name != "gauge_invariance") continue;
    double slope = NAN;
    for (const auto& [k, v] : c.metrics) {
      if (k == "slope") slope = v;
    }
    const double t = clock.seconds();
    return {c.status == CheckStatus::pass && std::abs(slope - 2.0) <= 0.3 && t < 120.0,
            fmt::format("log-log slope {:.4f} over three grids, {:.1f} s", slope, t)};
  }
  return {false, "gauge check missing"};
}

struct FixtureSpectrum {
  std::string name;
  DiscreteOperator op;
  WaveguideScenario scenario;
  std::vector<EigenPair> pairs;
  double tol;
};

std::vector<FixtureSpectrum> fixture_spectra() {
  std::vector<FixtureSpectrum> out;
  for (const auto& f : scenario_fixtures()) {
    const auto c = testing::fixture(f.name);
    const auto sc = c.make_scenario();
    auto op = assemble_operator(sc.geometry, sc.effective_profile());
    auto pairs = solve_eigs_near(op, f.target, 8, c.solver_options()).pairs;
    out.push_back({f.name, std::move(op), sc, std::move(pairs), c.solver.tol});
  }
  return out;
}

Outcome pt_symmetry(const std::vector<FixtureSpectrum>& spectra,
                    const std::vector<ScenarioFixture>& fixtures) {
  bool ok = true;
  double worst = 0.0;
  for (std::size_t k = 0; k < spectra.size(); ++k) {
    const auto& s = spectra[k];
    std::vector<cplx> values;
    double scale = 1.0;
    for (const auto& p : s.pairs) {
      values.push_back(p.lambda);
      scale = std::max(scale, std::abs(p.lambda));
    }
    const double tol = 10.0 * s.tol * scale;
    const double defect = conjugation_defect(values, fixtures[k].target, tol);
    worst = std::max(worst, defect / tol);
    ok = ok && defect <= tol;
  }
  return {ok, fmt::format("{} fixtures, worst defect / (10 tol scale) = {:.3e}", spectra.size(), worst)};
}

Outcome boundary_identity(const std::vector<FixtureSpectrum>& spectra) {
  double worst = 0.0;
  int tested = 0;
  for (const auto& s : spectra) {
    const BoundaryProfile beta = s.scenario.beta.is_zero()
                                     ? BoundaryProfile::constant(s.scenario.geometry, 1.0)
                                     : s.scenario.beta;
    for (const auto& p : s.pairs) {
      if (std::abs(p.lambda.imag()) > 1e-8 * (1.0 + std::abs(p.lambda))) continue;
      const auto n = pt_normalize(s.op, p.psi);
      const auto id = boundary_identity_check(s.op, n.psi, beta);
      worst = std::max(worst, id.gap / id.scale);
      ++tested;
    }
  }
  return {tested > 0 && worst <= 1e-12,
          fmt::format("{} PT-fixed eigenfunctions, worst gap / scale = {:.3e}", tested, worst)};
}

Outcome kernel_criterion_fixtures() {
  const Clock clock;
  bool ok = true;
  std::string detail;
  for (const auto& [name, lambda] : {std::pair{"check_kernel_wide", testing::kWideWellLambda},
                                     std::pair{"check_kernel_narrow", testing::kNarrowWellLambda}}) {
    const auto sc = testing::fixture_scenario(name);
    const auto alpha = sc.effective_profile();
    const auto op = assemble_operator(sc.geometry, alpha);
    const auto res = solve_eigs_near(op, lambda, 1);
    const auto psi = pt_normalize(op, res.pairs.front().psi).psi;
    CriterionOptions co;
    co.pt_tol = 1e-3;
    const auto r = kernel_criterion(op, psi, alpha, co);
    ok = ok && r.decay_ok && r.rel_gap <= 1e-3;
    detail += fmt::format("{}: lambda {:.6f} rel gap {:.2e}; ", name, res.pairs.front().lambda.real(),
                          r.rel_gap);
  }
  const double t = clock.seconds();
  return {ok && t < 60.0, detail + fmt::format("{:.1f} s", t)};
}

Outcome jordan_half_power() {
  const Clock clock;
  std::ostringstream log;
  const auto run = compute_perturbation(testing::fixture("jordan_perturb"), log);
  bool ok = run.refined.has_value() && run.runs.size() == 2;
  std::string detail;
  for (const auto& s : run.runs) {
    const double pre = s.fit.predicted_prefactor;
    const double rel = std::abs(s.fit.fitted_prefactor - pre) / pre;
    ok = ok && s.report.kind == ClusterKind::jordan_block &&
         std::abs(s.fit.fitted_exponent - 0.5) <= 0.05 && rel <= 0.1 && s.fit.misclassified == 0 &&
         s.fit.epsilons.size() >= 5;
    detail += fmt::format("eps sign {:+d}: exponent {:.4f}, prefactor {:.4f} vs 2|J|^(1/2) = {:.4f}, "
                          "{} misclassified; ",
                          s.epsilon_sign, s.fit.fitted_exponent, s.fit.fitted_prefactor, pre,
                          s.fit.misclassified);
  }
  const double t = clock.seconds();
  return {ok && t < 300.0, detail + fmt::format("{:.1f} s", t)};
}

double two_by_two_semisimple_error() {
  const cplx b11(0.3, 0.1), b22(-0.2, 0.05), b12(0.15, -0.4);
  Eigen::Matrix2cd b;
  b << b11, b12, b12, b22;
  const auto s = semisimple_first_order(b11, b22, b12);
  Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(b);
  const cplx e0 = es.eigenvalues()[0], e1 = es.eigenvalues()[1];
  return std::max(std::min(std::abs(s.lambda1_plus - e0), std::abs(s.lambda1_plus - e1)),
                  std::min(std::abs(s.lambda1_minus - e0), std::abs(s.lambda1_minus - e1)));
}

Outcome semisimple_first_order_law() {
  std::ostringstream log;
  const auto run = compute_perturbation(testing::fixture("semisimple_perturb"), log);
  bool ok = !run.runs.empty();
  std::string detail;
  for (const auto& s : run.runs) {
    const auto& f = s.fit;
    const double rp = std::abs(f.fitted_prefactor - f.predicted_prefactor) / f.predicted_prefactor;
    const double rm =
        std::abs(f.fitted_prefactor_minus - f.predicted_prefactor_minus) / f.predicted_prefactor_minus;
    ok = ok && s.report.kind == ClusterKind::semisimple_double &&
         std::abs(f.fitted_exponent - 1.0) <= 0.05 && std::abs(f.fitted_exponent_minus - 1.0) <= 0.05 &&
         rp <= 0.1 && rm <= 0.1;
    detail += fmt::format("eps sign {:+d}: exponents {:.4f}/{:.4f}, prefactor errors {:.1e}/{:.1e}; ",
                          s.epsilon_sign, f.fitted_exponent, f.fitted_exponent_minus, rp, rm);
  }
  const double model = two_by_two_semisimple_error();
  ok = ok && model <= 1e-12;
  return {ok, detail + fmt::format("2x2 model error {:.1e}", model)};
}

Outcome jordan_chain_oracle() {
  Eigen::MatrixXcd a(2, 2);
  a << kI, 1.0, 1.0, -kI;
  const auto op = DiscreteOperator::from_dense(a);
  GridFunction psi0(2);
  psi0 << 1.0, -kI;
  const auto res = solve_eigs_near(op, 0.0, 1);
  // the computed kernel vector is a multiple of (1, -i)
  const GridFunction& v = res.pairs.front().psi;
  const double kernel_dir = std::abs(v[1] + kI * v[0]) / v.norm();
  const double t_norm = std::abs(op.t_inner(psi0, psi0));
  const auto chain = solve_jordan_chain(op, 0.0, psi0);
  const GridFunction raw = chain.phi0 / chain.scale;
  const double phi_err = std::max(std::abs(raw[0] + 0.5 * kI), std::abs(raw[1] - 0.5));
  const double eq = (op.apply(chain.phi0) - chain.psi0).norm();
  const double pairing = std::abs(op.t_inner(chain.phi0, chain.psi0) - 1.0);
  const double herm = std::abs(op.hermitian_inner(chain.phi0, chain.psi0));
  const double worst = std::max({t_norm, phi_err, eq, pairing, herm});
  return {worst <= 1e-12 && kernel_dir <= 1e-6,
          fmt::format("<psi0,psi0>_T {:.1e}, phi0 error {:.1e}, chain residual {:.1e}, pairing {:.1e}, "
                      "Hermitian {:.1e}, solver kernel direction {:.1e}",
                      t_norm, phi_err, eq, pairing, herm, kernel_dir)};
}

Outcome sweep_determinism() {
  bool ok = true;
  std::string detail;
  const fs::path root = fs::temp_directory_path() / "ptwg_acceptance";
  for (const char* name : {"synthetic_sweep", "passthrough_sweep", "jordan_sweep"}) {
    auto c = testing::fixture(name);
    std::vector<fs::path> dirs;
    for (const char* run : {"a", "b"}) {
      const fs::path dir = root / name / run;
      fs::remove_all(dir);
      c.outputs.dir = dir.string();
      std::ostringstream log, err;
      if (cmd_sweep(c, log, err) != exit_ok) {
        ok = false;
        detail += fmt::format("{} failed: {}; ", name, err.str());
      }
      dirs.push_back(dir);
    }
    int files = 0;
    for (const char* f : {"trace.csv", "events.json", "trajectories.svg"}) {
      const auto x = slurp(dirs[0] / f);
      const bool same = !x.empty() && x == slurp(dirs[1] / f);
      ok = ok && same;
      files += same ? 1 : 0;
    }
    detail += fmt::format("{}: {}/3 identical; ", name, files);
  }
  fs::remove_all(root);
  return {ok, detail};
}

Outcome guarded_outcome(const std::function<Outcome()>& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    return {false, std::string("exception: ") + e.what()};
  }
}

}  // namespace

int main() {
  const auto fixtures = scenario_fixtures();
  std::vector<FixtureSpectrum> spectra;
  std::string spectra_error;
  try {
    spectra = fixture_spectra();
  } catch (const std::exception& e) {
    spectra_error = e.what();
  }
  auto with_spectra = [&](const std::function<Outcome()>& f) {
    return [&spectra_error, f]() -> Outcome {
      if (!spectra_error.empty()) return {false, "fixture spectra: " + spectra_error};
      return f();
    };
  };

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"baseline_spectrum", baseline_spectrum},
      {"gauge_invariance", gauge_invariance},
      {"pt_spectral_symmetry", with_spectra([&] { return pt_symmetry(spectra, fixtures); })},
      {"boundary_identity", with_spectra([&] { return boundary_identity(spectra); })},
      {"kernel_criterion", kernel_criterion_fixtures},
      {"jordan_half_power_law", jordan_half_power},
      {"semisimple_first_order_law", semisimple_first_order_law},
      {"jordan_chain_oracle", jordan_chain_oracle},
      {"sweep_determinism", sweep_determinism},
  };

  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const Outcome o = guarded_outcome(criteria[k].second);
    failures += o.pass ? 0 : 1;
    std::cout << fmt::format("{} {} {}: {}", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first, o.detail)
              << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
