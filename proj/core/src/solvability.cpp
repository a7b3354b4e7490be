#include "ptwg/solvability.hpp"

#include "ptwg/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace ptwg {

double kernel_k(double x, double y) noexcept { return y > x ? -y : x; }

DecayReport check_decay(const StripGeometry& geom, const GridFunction& psi0) {
  if (psi0.size() != geom.nodes()) throw Error(ErrorCode::dimension_mismatch, "grid function size");
  DecayReport out;
  std::vector<double> scaled(static_cast<std::size_t>(geom.n1 + 1));
  for (int i = 0; i <= geom.n1; ++i) {
    double m = 0.0;
    for (int j = 0; j <= geom.n2; ++j) m = std::max(m, std::abs(psi0[geom.node(i, j)]));
    const double x = std::abs(geom.x1(i));
    scaled[static_cast<std::size_t>(i)] = m * (1.0 + x * x * x);
  }
  double outer = 0.0;
  for (int i = 0; i <= geom.n1; ++i) {
    const double v = scaled[static_cast<std::size_t>(i)];
    if (std::abs(geom.x1(i)) <= 0.5 * geom.L) {
      out.C_fit = std::max(out.C_fit, v);
    } else {
      outer = std::max(outer, v);
    }
  }
  out.worst_ratio = out.C_fit > 0.0 ? outer / out.C_fit : (outer > 0.0 ? INFINITY : 0.0);
  out.ok = out.C_fit > 0.0 && outer <= out.C_fit;
  return out;
}

double kernel_double_integral(const Eigen::VectorXd& x1, const Eigen::VectorXd& w,
                              const Eigen::VectorXd& alpha, const Eigen::VectorXd& re_trace,
                              const Eigen::VectorXd& im_trace) {
  const Eigen::Index n = x1.size();
  if (w.size() != n || alpha.size() != n || re_trace.size() != n || im_trace.size() != n) {
    throw Error(ErrorCode::dimension_mismatch, "kernel integral inputs differ in length");
  }
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double a = w[i] * re_trace[i];
    if (a == 0.0) continue;
    double row = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      row += w[k] * kernel_k(x1[i], x1[k]) * (alpha[i] - alpha[k]) * im_trace[k];
    }
    total += a * row;
  }
  return total;
}

CriterionReport kernel_criterion(const DiscreteOperator& op, const GridFunction& psi0,
                                 const BoundaryProfile& alpha, const CriterionOptions& opts) {
  const auto& g = op.grid();
  if (alpha.size() != g.n1 + 1) {
    throw Error(ErrorCode::dimension_mismatch, "alpha is not sampled on the operator grid");
  }
  const GridFunction pt = pt_reflect(g, psi0);
  const double pt_res = (pt - psi0).cwiseAbs().maxCoeff() / psi0.cwiseAbs().maxCoeff();
  if (pt_res > opts.pt_tol) {
    std::ostringstream msg;
    msg << "psi0 is not PT-fixed (residual " << pt_res << ")";
    throw Error(ErrorCode::not_pt_symmetric, msg.str());
  }
  CriterionReport r;
  const auto decay = check_decay(g, psi0);
  r.decay_ok = decay.ok;
  r.C_fit = decay.C_fit;
  r.tail_mass = tail_mass(op, psi0);

  Eigen::VectorXd x(g.n1 + 1);
  for (int i = 0; i <= g.n1; ++i) x[i] = g.x1(i);
  const Eigen::VectorXcd top = upper_trace(g, psi0);
  r.lhs = kernel_double_integral(x, boundary_weights(g), alpha.values(), top.real(), top.imag());

  const cplx tt = op.t_inner(psi0, psi0);
  r.rhs = -tt.real();
  const double nn = op.norm(psi0);
  r.self_orthogonality = std::abs(tt) / (nn * nn);
  r.gap = std::abs(r.lhs - r.rhs);
  r.rel_gap = r.gap / std::max({std::abs(r.lhs), std::abs(r.rhs), opts.relative_floor * nn * nn});
  r.solvable = r.self_orthogonality < opts.self_orthogonality_tol;
  return r;
}

}  // namespace ptwg
