#include "ptwg/cli/emit.hpp"

#include "json.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace ptwg::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string prediction_name(Prediction p) { return std::string(to_string(p)); }

void put_complex(ordered_json& j, const std::string& key, cplx z) {
  j[key + "_re"] = z.real();
  j[key + "_im"] = z.imag();
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

bool real_value(cplx z, double tol) { return std::abs(z.imag()) <= tol * (1.0 + std::abs(z)); }

constexpr std::array<const char*, 8> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                                 "#ff7f0e", "#17becf", "#8c564b", "#e377c2"};

const char* event_color(EventKind k) {
  switch (k) {
    case EventKind::real_to_complex: return "#d62728";
    case EventKind::complex_to_real: return "#1f77b4";
    case EventKind::pass_through: return "#2ca02c";
    case EventKind::unresolved: return "#7f7f7f";
  }
  return "#7f7f7f";
}

struct Frame {
  double re_min, re_max, im_min, im_max;
  double width = 640.0, height = 480.0, margin = 60.0;

  double px(double re) const {
    return margin + (re - re_min) / (re_max - re_min) * (width - 2.0 * margin);
  }
  double py(double im) const {
    return height - margin - (im - im_min) / (im_max - im_min) * (height - 2.0 * margin);
  }
};

Frame frame_of(const BranchTrace& trace) {
  double r0 = INFINITY, r1 = -INFINITY, i0 = INFINITY, i1 = -INFINITY;
  auto take = [&](cplx z) {
    r0 = std::min(r0, z.real());
    r1 = std::max(r1, z.real());
    i0 = std::min(i0, z.imag());
    i1 = std::max(i1, z.imag());
  };
  for (const auto& b : trace.branches) {
    for (const auto& v : b.values) {
      if (v) take(*v);
    }
  }
  for (const auto& e : trace.events) take(e.lambda_star);
  if (!std::isfinite(r0)) {
    r0 = 0.0;
    r1 = 1.0;
    i0 = -1.0;
    i1 = 1.0;
  }
  auto pad = [](double& lo, double& hi) {
    double span = hi - lo;
    if (span <= 1e-12 * std::max(1.0, std::abs(lo))) span = std::max(1e-3, 1e-2 * std::abs(lo));
    lo -= 0.05 * span;
    hi += 0.05 * span;
    if (hi - lo < span) {
      lo -= 0.5 * span;
      hi += 0.5 * span;
    }
  };
  pad(r0, r1);
  pad(i0, i1);
  return {r0, r1, i0, i1};
}

}  // namespace

std::string format_real(double v) { return fmt::format("{:.17g}", v); }

void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string eigenvalues_csv(const std::vector<EigenPair>& pairs) {
  std::string s = "index,re_lambda,im_lambda,residual,re_t_norm,im_t_norm\n";
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto& p = pairs[k];
    s += fmt::format("{},{},{},{},{},{}\n", k, format_real(p.lambda.real()),
                     format_real(p.lambda.imag()), format_real(p.residual),
                     format_real(p.t_norm.real()), format_real(p.t_norm.imag()));
  }
  return s;
}

std::string eigenvectors_csv(const StripGeometry& geom, const std::vector<EigenPair>& pairs) {
  std::string s = "mode,i,j,x1,x2,re_psi,im_psi\n";
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto& psi = pairs[k].psi;
    for (int i = 0; i <= geom.n1; ++i) {
      for (int j = 0; j <= geom.n2; ++j) {
        const cplx v = psi[geom.node(i, j)];
        s += fmt::format("{},{},{},{},{},{},{}\n", k, i, j, format_real(geom.x1(i)),
                         format_real(geom.x2(j)), format_real(v.real()), format_real(v.imag()));
      }
    }
  }
  return s;
}

std::string trace_csv(const BranchTrace& trace) {
  std::vector<const Branch*> order;
  for (const auto& b : trace.branches) order.push_back(&b);
  std::sort(order.begin(), order.end(), [](const Branch* a, const Branch* b) { return a->id < b->id; });
  std::string s = "param,branch_id,re_lambda,im_lambda,residual\n";
  for (std::size_t g = 0; g < trace.param_grid.size(); ++g) {
    for (const Branch* b : order) {
      if (g >= b->values.size() || !b->values[g]) continue;
      const cplx z = *b->values[g];
      const double r = g < b->residuals.size() ? b->residuals[g] : 0.0;
      s += fmt::format("{},{},{},{},{}\n", format_real(trace.param_grid[g]), b->id,
                       format_real(z.real()), format_real(z.imag()), format_real(r));
    }
  }
  return s;
}

std::string events_json(const std::vector<CollisionEvent>& events) {
  ordered_json arr = ordered_json::array();
  for (const auto& e : events) {
    ordered_json j;
    j["kind"] = std::string(to_string(e.kind));
    j["param_star"] = e.param_star;
    put_complex(j, "lambda_star", e.lambda_star);
    j["bracket_lo"] = e.bracket.first;
    j["bracket_hi"] = e.bracket.second;
    j["branch_a"] = e.branches.first;
    j["branch_b"] = e.branches.second;
    j["refined"] = e.refined;
    j["gap"] = e.gap;
    j["self_orthogonality"] = e.self_orthogonality;
    if (e.cluster_kind) {
      j["cluster_kind"] = std::string(to_string(*e.cluster_kind));
    } else {
      j["cluster_kind"] = nullptr;
    }
    if (e.discriminant) {
      put_complex(j, "discriminant", *e.discriminant);
    } else {
      j["discriminant_re"] = nullptr;
      j["discriminant_im"] = nullptr;
    }
    arr.push_back(std::move(j));
  }
  return dump(arr);
}

std::string trajectories_svg(const BranchTrace& trace, double real_tol) {
  const Frame f = frame_of(trace);
  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{:.0f}\" "
      "height=\"{:.0f}\" viewBox=\"0 0 {:.0f} {:.0f}\">\n",
      f.width, f.height, f.width, f.height);
  s += "<rect x=\"0\" y=\"0\" width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // axes box, ticks and the real axis
  const double x0 = f.margin, x1 = f.width - f.margin;
  const double y0 = f.margin, y1 = f.height - f.margin;
  s += fmt::format(
      "<rect x=\"{:.3f}\" y=\"{:.3f}\" width=\"{:.3f}\" height=\"{:.3f}\" fill=\"none\" "
      "stroke=\"black\" stroke-width=\"1\"/>\n",
      x0, y0, x1 - x0, y1 - y0);
  for (int k = 0; k <= 4; ++k) {
    const double re = f.re_min + (f.re_max - f.re_min) * k / 4.0;
    const double im = f.im_min + (f.im_max - f.im_min) * k / 4.0;
    s += fmt::format(
        "<line x1=\"{0:.3f}\" y1=\"{1:.3f}\" x2=\"{0:.3f}\" y2=\"{2:.3f}\" stroke=\"black\"/>\n"
        "<text x=\"{0:.3f}\" y=\"{3:.3f}\" font-size=\"11\" text-anchor=\"middle\">{4:.5g}</text>\n",
        f.px(re), y1, y1 + 5.0, y1 + 18.0, re);
    s += fmt::format(
        "<line x1=\"{0:.3f}\" y1=\"{1:.3f}\" x2=\"{2:.3f}\" y2=\"{1:.3f}\" stroke=\"black\"/>\n"
        "<text x=\"{3:.3f}\" y=\"{4:.3f}\" font-size=\"11\" text-anchor=\"end\">{5:.5g}</text>\n",
        x0 - 5.0, f.py(im), x0, x0 - 8.0, f.py(im) + 4.0, im);
  }
  if (f.im_min < 0.0 && f.im_max > 0.0) {
    s += fmt::format(
        "<line x1=\"{:.3f}\" y1=\"{:.3f}\" x2=\"{:.3f}\" y2=\"{:.3f}\" stroke=\"#999999\" "
        "stroke-width=\"0.5\"/>\n",
        x0, f.py(0.0), x1, f.py(0.0));
  }
  s += fmt::format(
      "<text x=\"{:.3f}\" y=\"{:.3f}\" font-size=\"12\" text-anchor=\"middle\">Re lambda</text>\n",
      0.5 * (x0 + x1), f.height - 15.0);
  s += fmt::format(
      "<text x=\"15\" y=\"{:.3f}\" font-size=\"12\" text-anchor=\"middle\" "
      "transform=\"rotate(-90 15 {:.3f})\">Im lambda</text>\n",
      0.5 * (y0 + y1), 0.5 * (y0 + y1));

  // branches: maximal runs of consecutive segments with the same character
  for (const auto& b : trace.branches) {
    const char* color = kPalette[static_cast<std::size_t>(b.id) % kPalette.size()];
    std::string points;
    int run_real = -1;
    auto flush = [&]() {
      if (points.empty()) return;
      if (run_real == 1) {
        s += fmt::format(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"3\"/>\n", points,
            color);
      } else {
        s += fmt::format(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" "
            "stroke-dasharray=\"6,4\"/>\n",
            points, color);
      }
      points.clear();
    };
    for (std::size_t g = 1; g < b.values.size(); ++g) {
      if (!b.values[g - 1] || !b.values[g]) {
        flush();
        run_real = -1;
        continue;
      }
      const cplx a = *b.values[g - 1], c = *b.values[g];
      const int real_seg = real_value(a, real_tol) && real_value(c, real_tol) ? 1 : 0;
      if (real_seg != run_real) {
        flush();
        run_real = real_seg;
        points = fmt::format("{:.3f},{:.3f}", f.px(a.real()), f.py(a.imag()));
      }
      points += fmt::format(" {:.3f},{:.3f}", f.px(c.real()), f.py(c.imag()));
    }
    flush();
  }

  for (const auto& e : trace.events) {
    s += fmt::format(
        "<circle cx=\"{:.3f}\" cy=\"{:.3f}\" r=\"5\" fill=\"none\" stroke=\"{}\" "
        "stroke-width=\"2\"><title>{} at {:.10g}</title></circle>\n",
        f.px(e.lambda_star.real()), f.py(e.lambda_star.imag()), event_color(e.kind),
        to_string(e.kind), e.param_star);
  }
  s += "</svg>\n";
  return s;
}

std::string perturbation_report_json(const PerturbRun& run) {
  ordered_json arr = ordered_json::array();
  for (const auto& r : run.runs) {
    const auto& p = r.report;
    const auto& fit = r.fit;
    ordered_json j;
    j["epsilon_sign"] = r.epsilon_sign;
    j["kind"] = std::string(to_string(p.kind));
    put_complex(j, "lambda0", p.lambda0);
    if (run.refined) {
      j["param_star"] = run.refined->param_star;
      j["refine_gap"] = run.refined->gap;
    }
    if (p.kind == ClusterKind::semisimple_double) {
      put_complex(j, "b11", p.b11);
      put_complex(j, "b22", p.b22);
      put_complex(j, "b12", p.b12);
      put_complex(j, "lambda1_plus", p.lambda1_plus);
      put_complex(j, "lambda1_minus", p.lambda1_minus);
      put_complex(j, "discriminant", p.discriminant);
      j["normalization_defect"] = p.normalization_defect;
    } else {
      j["J"] = p.J;
      put_complex(j, "lambda_half_plus", p.lambda_half_plus);
      put_complex(j, "lambda_half_minus", p.lambda_half_minus);
      j["pt_residual"] = p.pt_residual;
      j["identity_gap"] = p.identity_gap;
      j["self_orthogonality"] = p.self_orthogonality;
    }
    j["prediction"] = prediction_name(p.prediction);
    j["predicted_exponent"] = fit.predicted_exponent;
    j["predicted_prefactor"] = fit.predicted_prefactor;
    j["predicted_prefactor_minus"] = fit.predicted_prefactor_minus;
    j["fitted_exponent"] = fit.fitted_exponent;
    j["fitted_prefactor"] = fit.fitted_prefactor;
    j["fitted_exponent_minus"] = fit.fitted_exponent_minus;
    j["fitted_prefactor_minus"] = fit.fitted_prefactor_minus;
    j["samples"] = fit.epsilons.size();
    j["misclassified"] = fit.misclassified;
    arr.push_back(std::move(j));
  }
  return dump(arr);
}

std::string asymptotics_fit_csv(const PerturbRun& run) {
  std::string s =
      "epsilon,re_lambda_plus,im_lambda_plus,re_lambda_minus,im_lambda_minus,gap_plus,gap_minus,"
      "observed,predicted\n";
  for (const auto& r : run.runs) {
    const auto& f = r.fit;
    for (std::size_t k = 0; k < f.epsilons.size(); ++k) {
      s += fmt::format("{},{},{},{},{},{},{},{},{}\n", format_real(f.epsilons[k]),
                       format_real(f.lambda_plus[k].real()), format_real(f.lambda_plus[k].imag()),
                       format_real(f.lambda_minus[k].real()), format_real(f.lambda_minus[k].imag()),
                       format_real(f.gaps[k]), format_real(f.gaps_minus[k]),
                       to_string(f.observed[k]), to_string(f.predicted[k]));
    }
  }
  return s;
}

}  // namespace ptwg::cli
