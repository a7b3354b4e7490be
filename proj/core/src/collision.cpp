#include "ptwg/collision.hpp"

#include "ptwg/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <tuple>

namespace ptwg {

namespace {

bool is_real(cplx z, double tol) { return std::abs(z.imag()) <= tol * (1.0 + std::abs(z)); }

bool conjugates(cplx a, cplx b, double tol) {
  return std::abs(a - std::conj(b)) <= tol * (1.0 + std::abs(a));
}

bool value_order(cplx a, cplx b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

struct Candidate {
  cplx lambda;
  double residual;
};

void add_event(BranchTrace& trace, EventKind kind, int a, int b, std::size_t step, cplx lambda) {
  CollisionEvent e;
  e.kind = kind;
  e.branches = {std::min(a, b), std::max(a, b)};
  e.bracket = {trace.param_grid[step - 1], trace.param_grid[step]};
  e.param_star = 0.5 * (e.bracket.first + e.bracket.second);
  e.lambda_star = lambda;
  trace.events.push_back(e);
}

void detect_events(BranchTrace& trace, std::size_t s, const TrackerOptions& opts) {
  const double conj_tol = 1e-6;
  const auto& br = trace.branches;
  for (std::size_t ia = 0; ia < br.size(); ++ia) {
    for (std::size_t ib = ia + 1; ib < br.size(); ++ib) {
      const auto& A = br[ia].values;
      const auto& B = br[ib].values;
      if (!A[s] || !B[s] || !A[s - 1] || !B[s - 1]) continue;
      const cplx a0 = *A[s - 1], b0 = *B[s - 1], a1 = *A[s], b1 = *B[s];
      const bool ra0 = is_real(a0, opts.real_tol), rb0 = is_real(b0, opts.real_tol);
      const bool ra1 = is_real(a1, opts.real_tol), rb1 = is_real(b1, opts.real_tol);
      const cplx mid = 0.5 * (a1 + b1);
      const int ida = br[ia].id, idb = br[ib].id;
      if (ra0 && rb0 && !ra1 && !rb1 && conjugates(a1, b1, conj_tol)) {
        add_event(trace, EventKind::real_to_complex, ida, idb, s, mid);
      } else if (!ra0 && !rb0 && conjugates(a0, b0, conj_tol) && ra1 && rb1) {
        add_event(trace, EventKind::complex_to_real, ida, idb, s, mid);
      } else if (ra0 && rb0 && ra1 && rb1 &&
                 ((a0.real() - b0.real()) * (a1.real() - b1.real()) < 0.0)) {
        add_event(trace, EventKind::pass_through, ida, idb, s, mid);
      } else if (std::abs(a1 - b1) < opts.collision_tol &&
                 std::abs(a0 - b0) >= opts.collision_tol) {
        add_event(trace, EventKind::unresolved, ida, idb, s, mid);
      }
    }
  }
}

double golden_minimize(const std::function<double(double)>& f, double lo, double hi, double tol,
                       int max_iterations, double& fmin) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = hi - g * (hi - lo);
  double d = lo + g * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  const double flo = f(lo);
  const double fhi = f(hi);
  if (std::min(fc, fd) >= std::min(flo, fhi)) {
    throw Error(ErrorCode::non_bracketing, "branch gap has no interior minimum in the bracket");
  }
  for (int it = 0; it < max_iterations && hi - lo > tol; ++it) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - g * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + g * (hi - lo);
      fd = f(d);
    }
  }
  fmin = std::min(fc, fd);
  return fc < fd ? c : d;
}

}  // namespace

std::string_view to_string(SweepParameter p) noexcept {
  return p == SweepParameter::coupling ? "coupling" : "perturbation";
}

std::string_view to_string(EventKind k) noexcept {
  switch (k) {
    case EventKind::pass_through: return "PassThrough";
    case EventKind::real_to_complex: return "RealToComplex";
    case EventKind::complex_to_real: return "ComplexToReal";
    case EventKind::unresolved: return "Unresolved";
  }
  return "Unresolved";
}

WaveguideScenario at_parameter(const WaveguideScenario& base, SweepParameter which, double value) {
  WaveguideScenario s = base;
  if (which == SweepParameter::coupling) {
    s.t = value;
  } else {
    s.epsilon = value;
  }
  return s;
}

BranchTrace trace_values(const SpectrumProvider& provider, const std::vector<double>& param_grid,
                         const ComplexWindow& window, const TrackerOptions& opts) {
  if (param_grid.empty()) throw Error(ErrorCode::invalid_argument, "empty parameter grid");
  for (std::size_t i = 1; i < param_grid.size(); ++i) {
    if (!(param_grid[i] > param_grid[i - 1])) {
      throw Error(ErrorCode::invalid_argument, "parameter grid must be strictly increasing");
    }
  }
  BranchTrace trace;
  trace.param_grid = param_grid;
  const std::size_t steps = param_grid.size();
  int next_id = 0;

  for (std::size_t s = 0; s < steps; ++s) {
    // continuation targets
    std::vector<std::size_t> active;
    std::vector<cplx> predicted;
    std::vector<double> bound;
    for (std::size_t b = 0; b < trace.branches.size(); ++b) {
      const auto& br = trace.branches[b];
      if (br.terminated || s == 0 || !br.values[s - 1]) continue;
      const cplx last = *br.values[s - 1];
      cplx pred = last;
      double step = 0.0;
      if (s >= 2 && br.values[s - 2]) {
        const double r = (param_grid[s] - param_grid[s - 1]) / (param_grid[s - 1] - param_grid[s - 2]);
        const cplx delta = last - *br.values[s - 2];
        pred = last + r * delta;
        step = std::abs(r * delta);
      }
      active.push_back(b);
      predicted.push_back(pred);
      bound.push_back(std::max(opts.jump_factor * step, opts.min_jump));
    }

    std::vector<Candidate> cands;
    for (const auto& smp : provider(param_grid[s], predicted)) {
      if (window.contains(smp.lambda)) cands.push_back({smp.lambda, smp.residual});
    }
    std::sort(cands.begin(), cands.end(),
              [](const Candidate& a, const Candidate& b) { return value_order(a.lambda, b.lambda); });

    for (auto& br : trace.branches) {
      br.values.emplace_back();
      br.residuals.push_back(0.0);
    }

    // greedy nearest assignment
    std::vector<std::tuple<double, std::size_t, std::size_t>> dist;
    for (std::size_t a = 0; a < active.size(); ++a) {
      for (std::size_t c = 0; c < cands.size(); ++c) {
        dist.emplace_back(std::abs(predicted[a] - cands[c].lambda), a, c);
      }
    }
    std::sort(dist.begin(), dist.end());
    std::vector<bool> branch_used(active.size(), false);
    std::vector<bool> cand_used(cands.size(), false);
    for (const auto& [d, a, c] : dist) {
      if (branch_used[a] || cand_used[c] || d > bound[a]) continue;
      const auto& prev = trace.branches[active[a]].values[s - 1];
      const bool was_complex = prev && !is_real(*prev, opts.real_tol);
      for (std::size_t c2 = 0; c2 < cands.size(); ++c2) {
        if (c2 == c || cand_used[c2]) continue;
        const double d2 = std::abs(predicted[a] - cands[c2].lambda);
        // a conjugate pair landing on the real axis is equidistant from both real
        // eigenvalues it turns into; either assignment is right
        const bool landing = was_complex && is_real(cands[c].lambda, opts.real_tol) &&
                             is_real(cands[c2].lambda, opts.real_tol);
        if (std::abs(d2 - d) <= opts.tie_tol * std::max(d, 1e-300) && !landing &&
            !conjugates(cands[c].lambda, cands[c2].lambda, 1e-6)) {
          if (s > 0) {
            CollisionEvent e;
            e.kind = EventKind::unresolved;
            e.branches = {trace.branches[active[a]].id, -1};
            e.bracket = {param_grid[s - 1], param_grid[s]};
            e.param_star = param_grid[s];
            e.lambda_star = cands[c].lambda;
            trace.events.push_back(e);
          }
          break;
        }
      }
      branch_used[a] = true;
      cand_used[c] = true;
      auto& br = trace.branches[active[a]];
      br.values[s] = cands[c].lambda;
      br.residuals[s] = cands[c].residual;
    }
    for (std::size_t a = 0; a < active.size(); ++a) {
      if (!branch_used[a]) trace.branches[active[a]].terminated = true;
    }
    for (std::size_t c = 0; c < cands.size(); ++c) {
      if (cand_used[c]) continue;
      Branch br;
      br.id = next_id++;
      br.values.assign(s + 1, std::nullopt);
      br.residuals.assign(s + 1, 0.0);
      br.values[s] = cands[c].lambda;
      br.residuals[s] = cands[c].residual;
      trace.branches.push_back(std::move(br));
    }
    if (s > 0) detect_events(trace, s, opts);
  }
  std::stable_sort(trace.events.begin(), trace.events.end(),
                   [](const CollisionEvent& a, const CollisionEvent& b) {
                     return std::tie(a.bracket.first, a.branches) < std::tie(b.bracket.first, b.branches);
                   });
  return trace;
}

SpectrumProvider scenario_provider(const WaveguideScenario& base, SweepParameter which,
                                   const ComplexWindow& window, const TrackerOptions& opts) {
  return [base, which, window, opts](double param, const std::vector<cplx>& predicted) {
    const WaveguideScenario sc = at_parameter(base, which, param);
    const BoundaryProfile prof = sc.effective_profile();
    const DiscreteOperator op = assemble_operator(sc.geometry, prof);

    std::vector<cplx> targets;
    const int ns = std::max(opts.discovery_shifts, 0);
    const double width = window.re_max - window.re_min;
    for (int i = 0; i < ns; ++i) {
      targets.emplace_back(window.re_min + (i + 0.5) * width / ns, window.center().imag());
    }
    targets.insert(targets.end(), predicted.begin(), predicted.end());
    if (targets.empty()) targets.push_back(window.center());

    // each eigenvalue is taken from the solve whose target is nearest to it, so no
    // tolerance-based deduplication is needed
    auto nearest_target = [&targets](cplx z) {
      std::size_t best = 0;
      for (std::size_t j = 1; j < targets.size(); ++j) {
        if (std::abs(z - targets[j]) < std::abs(z - targets[best])) best = j;
      }
      return best;
    };
    std::vector<SpectrumSample> out;
    for (std::size_t j = 0; j < targets.size(); ++j) {
      const auto res = solve_eigs_near(op, targets[j], opts.eigs_per_shift, opts.solver);
      for (const auto& p : res.pairs) {
        if (nearest_target(p.lambda) == j && window.contains(p.lambda)) {
          out.push_back({p.lambda, p.residual});
        }
      }
    }
    if (opts.filter != EssentialFilter::none) {
      const double threshold = essential_threshold(sc.geometry, prof.asymptote());
      std::erase_if(out, [threshold](const SpectrumSample& s) { return s.lambda.real() >= threshold; });
    }
    if (opts.filter == EssentialFilter::threshold_and_l_stability && !out.empty()) {
      const WaveguideScenario ext = sc.extended(opts.l_factor);
      const DiscreteOperator op_ext = assemble_operator(ext.geometry, ext.effective_profile());
      std::erase_if(out, [&](const SpectrumSample& s) {
        const auto r = solve_eigs_near(op_ext, s.lambda, 1, opts.solver);
        return std::abs(r.pairs.front().lambda - s.lambda) > opts.l_stability_tol * (1.0 + std::abs(s.lambda));
      });
    }
    std::sort(out.begin(), out.end(), [](const SpectrumSample& a, const SpectrumSample& b) {
      return value_order(a.lambda, b.lambda);
    });
    return out;
  };
}

BranchTrace trace_branches(const WaveguideScenario& scenario, SweepParameter which,
                           const std::vector<double>& param_grid, const ComplexWindow& window,
                           const TrackerOptions& opts) {
  return trace_values(scenario_provider(scenario, which, window, opts), param_grid, window, opts);
}

CollisionEvent refine_collision(const PairProvider& pair, const CollisionEvent& event, double tol,
                                int max_iterations) {
  double lo = event.bracket.first;
  double hi = event.bracket.second;
  if (!(hi > lo)) throw Error(ErrorCode::non_bracketing, "event has an empty bracket");
  if (!(tol > 0.0)) throw Error(ErrorCode::invalid_argument, "refinement tolerance must be positive");
  CollisionEvent out = event;
  cplx hint = event.lambda_star;
  auto eval = [&](double p) {
    const auto [a, b] = pair(p, hint);
    return std::make_pair(a, b);
  };

  if (event.kind == EventKind::real_to_complex || event.kind == EventKind::complex_to_real) {
    auto D = [&](double p) {
      const auto [a, b] = eval(p);
      return ((a - b) * (a - b)).real();
    };
    double flo = D(lo);
    double fhi = D(hi);
    if (flo == 0.0 || fhi == 0.0) {
      // the collision sits on a grid point
      lo = hi = flo == 0.0 ? lo : hi;
      flo = fhi = 0.0;
    } else if (!(flo * fhi < 0.0)) {
      std::ostringstream msg;
      msg << "discriminant does not change sign on [" << lo << ", " << hi << "]";
      throw Error(ErrorCode::non_bracketing, msg.str());
    }
    int side = 0;
    for (int it = 0; it < max_iterations && hi - lo > tol; ++it) {
      const double width = hi - lo;
      double p = (lo * fhi - hi * flo) / (fhi - flo);
      if (!(p > lo && p < hi)) p = 0.5 * (lo + hi);
      const double fp = D(p);
      if (fp == 0.0) {
        lo = hi = p;
        break;
      }
      if (fp * flo < 0.0) {
        hi = p;
        fhi = fp;
        if (side == -1) flo *= 0.5;
        side = -1;
      } else {
        lo = p;
        flo = fp;
        if (side == 1) fhi *= 0.5;
        side = 1;
      }
      if (hi - lo > 0.5 * width) {
        // regula falsi stalled: bisect
        const double m = 0.5 * (lo + hi);
        const double fm = D(m);
        if (fm * flo < 0.0) {
          hi = m;
          fhi = fm;
        } else {
          lo = m;
          flo = fm;
        }
        side = 0;
      }
    }
    out.param_star = 0.5 * (lo + hi);
  } else {
    auto gap = [&](double p) {
      const auto [a, b] = eval(p);
      return std::abs(a - b);
    };
    double gmin = 0.0;
    out.param_star = golden_minimize(gap, lo, hi, tol, max_iterations, gmin);
  }
  const auto [a, b] = eval(out.param_star);
  out.lambda_star = 0.5 * (a + b);
  out.gap = std::abs(a - b);
  out.bracket = {lo, hi};
  out.refined = true;
  return out;
}

std::vector<EigenPair> colliding_pairs(const WaveguideScenario& scenario, SweepParameter which,
                                       double param, cplx hint, const SolverOptions& opts) {
  const WaveguideScenario sc = at_parameter(scenario, which, param);
  const DiscreteOperator op = assemble_operator(sc.geometry, sc.effective_profile());
  auto res = solve_eigs_near(op, hint, 2, opts);
  if (res.pairs.size() < 2) {
    throw Error(ErrorCode::eigenvalues_not_found, "fewer than two eigenvalues near the collision");
  }
  res.pairs.resize(2);
  return std::move(res.pairs);
}

CollisionEvent refine_collision(const WaveguideScenario& scenario, SweepParameter which,
                                const CollisionEvent& event, const TrackerOptions& opts) {
  const PairProvider provider = [&](double p, cplx hint) {
    const auto pairs = colliding_pairs(scenario, which, p, cplx(hint.real(), 0.0), opts.solver);
    return std::make_pair(pairs[0].lambda, pairs[1].lambda);
  };
  CollisionEvent out =
      refine_collision(provider, event, opts.refine_tol, opts.max_refine_iterations);

  const WaveguideScenario sc = at_parameter(scenario, which, out.param_star);
  const DiscreteOperator op = assemble_operator(sc.geometry, sc.effective_profile());
  auto pairs = colliding_pairs(scenario, which, out.param_star,
                               cplx(out.lambda_star.real(), 0.0), opts.solver);
  // self-orthogonality of the common direction of the pair
  GridFunction v1 = pairs[0].psi / op.norm(pairs[0].psi);
  GridFunction v2 = pairs[1].psi / op.norm(pairs[1].psi);
  const cplx c = op.hermitian_inner(v2, v1);
  const cplx align = std::abs(c) > 0.0 ? std::conj(c) / std::abs(c) : cplx(1.0);
  const GridFunction dominant = v1 + align * v2;
  out.self_orthogonality = self_orthogonality(op, dominant);

  ClusterOptions co = opts.cluster;
  const cplx center = 0.5 * (pairs[0].lambda + pairs[1].lambda);
  co.radius_abs = std::max(co.radius_abs, 1.01 * std::abs(pairs[0].lambda - center));
  try {
    const SpectralCluster cl = classify_cluster(op, pairs, co);
    out.cluster_kind = cl.kind;
    if (cl.kind == ClusterKind::semisimple_double) {
      const BoundaryProfile& dir = which == SweepParameter::coupling ? sc.alpha : sc.beta;
      const auto b = semisimple_coefficients(op, cl.psi_plus, cl.psi_minus, dir);
      out.discriminant = (b.b11 - b.b22) * (b.b11 - b.b22) + 4.0 * b.b12 * b.b12;
    }
  } catch (const Error&) {
    out.cluster_kind.reset();
  }
  return out;
}

LogLogFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(ErrorCode::invalid_argument, "power-law fit needs matching samples");
  }
  const auto n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
      throw Error(ErrorCode::invalid_argument, "power-law fit needs positive samples");
    }
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  LogLogFit f;
  f.exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  f.prefactor = std::exp((sy - f.exponent * sx) / n);
  return f;
}

Prediction classify_pair(cplx a, cplx b) noexcept {
  const cplx d = a - b;
  return std::abs(d.imag()) > std::abs(d.real()) ? Prediction::complex_conjugate_pair
                                                  : Prediction::real;
}

AsymptoticsFit verify_asymptotics(const WaveguideScenario& scenario, const SpectralCluster& cluster,
                                  const BoundaryProfile& beta, const std::vector<double>& epsilons,
                                  const SolverOptions& opts) {
  if (epsilons.size() < 5) throw Error(ErrorCode::invalid_argument, "need at least 5 epsilons");
  const bool positive = epsilons.front() > 0.0;
  double emin = INFINITY, emax = 0.0;
  for (double e : epsilons) {
    if (!(e != 0.0) || (e > 0.0) != positive || !std::isfinite(e)) {
      throw Error(ErrorCode::invalid_argument, "epsilons must be finite, nonzero and of one sign");
    }
    emin = std::min(emin, std::abs(e));
    emax = std::max(emax, std::abs(e));
  }
  if (emax < 100.0 * emin) throw Error(ErrorCode::invalid_argument, "epsilons must span 2 decades");
  const int sign = positive ? 1 : -1;

  const BoundaryProfile base = scenario.effective_profile();
  const DiscreteOperator op0 = assemble_operator(scenario.geometry, base);
  const cplx lambda0 = cluster.center;

  AsymptoticsFit fit;
  cplx l1p = 0.0, l1m = 0.0;
  Prediction prediction = Prediction::real;
  if (cluster.kind == ClusterKind::jordan_block) {
    const auto h = jordan_halfpower(op0, cluster.psi0, beta, sign, 1e-10, 1e-3);
    fit.predicted_exponent = 0.5;
    fit.predicted_prefactor = 2.0 * std::sqrt(std::abs(h.J));
    fit.predicted_prefactor_minus = fit.predicted_prefactor;
    prediction = h.prediction;
  } else if (cluster.kind == ClusterKind::semisimple_double) {
    const auto b = semisimple_coefficients(op0, cluster.psi_plus, cluster.psi_minus, beta);
    const auto s = semisimple_first_order(b.b11, b.b22, b.b12);
    l1p = s.lambda1_plus;
    l1m = s.lambda1_minus;
    fit.predicted_exponent = 1.0;
    fit.predicted_prefactor = std::abs(l1p);
    fit.predicted_prefactor_minus = std::abs(l1m);
    prediction = classify_pair(l1p, l1m);
  } else {
    throw Error(ErrorCode::invalid_argument, "asymptotics need a double eigenvalue");
  }

  std::vector<double> failed;
  for (double eps : epsilons) {
    const DiscreteOperator op = assemble_operator(scenario.geometry, base.combined(1.0, beta, eps));
    const cplx target = cluster.kind == ClusterKind::semisimple_double
                            ? lambda0 + 0.5 * eps * (l1p + l1m)
                            : lambda0;
    std::vector<EigenPair> pairs;
    try {
      pairs = solve_eigs_near(op, target, 4, opts).pairs;
    } catch (const Error&) {
      failed.push_back(eps);
      continue;
    }
    if (pairs.size() < 2) {
      failed.push_back(eps);
      continue;
    }
    cplx a = pairs[0].lambda;
    cplx b = pairs[1].lambda;
    const double expected = cluster.kind == ClusterKind::jordan_block
                                ? fit.predicted_prefactor * std::sqrt(std::abs(eps))
                                : std::max(fit.predicted_prefactor, fit.predicted_prefactor_minus) *
                                      std::abs(eps);
    if (std::abs(a - lambda0) > 10.0 * expected + 1e-8 || std::abs(b - lambda0) > 10.0 * expected + 1e-8) {
      failed.push_back(eps);
      continue;
    }
    double gp = 0.0, gm = 0.0;
    if (cluster.kind == ClusterKind::jordan_block) {
      if (a.imag() < b.imag() || (a.imag() == b.imag() && a.real() < b.real())) std::swap(a, b);
      gp = gm = 0.5 * std::abs(a - b);
    } else {
      const cplx pp = lambda0 + eps * l1p;
      const cplx pm = lambda0 + eps * l1m;
      if (std::abs(a - pp) + std::abs(b - pm) > std::abs(b - pp) + std::abs(a - pm)) std::swap(a, b);
      gp = std::abs(a - lambda0);
      gm = std::abs(b - lambda0);
    }
    fit.epsilons.push_back(eps);
    fit.lambda_plus.push_back(a);
    fit.lambda_minus.push_back(b);
    fit.gaps.push_back(gp);
    fit.gaps_minus.push_back(gm);
    const Prediction obs = classify_pair(a, b);
    fit.observed.push_back(obs);
    fit.predicted.push_back(prediction);
    if (obs != prediction) ++fit.misclassified;
  }
  if (!failed.empty()) {
    std::ostringstream msg;
    msg << "perturbed eigenvalues not found for epsilon =";
    for (double e : failed) msg << ' ' << e;
    throw Error(ErrorCode::eigenvalues_not_found, msg.str());
  }
  std::vector<double> ae;
  for (double e : fit.epsilons) ae.push_back(std::abs(e));
  const auto fp = fit_power_law(ae, fit.gaps);
  const auto fm = fit_power_law(ae, fit.gaps_minus);
  fit.fitted_exponent = fp.exponent;
  fit.fitted_prefactor = fp.prefactor;
  fit.fitted_exponent_minus = fm.exponent;
  fit.fitted_prefactor_minus = fm.prefactor;
  return fit;
}

}  // namespace ptwg
