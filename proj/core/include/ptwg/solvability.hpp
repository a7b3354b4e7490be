#pragma once

#include "ptwg/discrete_operator.hpp"

namespace ptwg {

/// x if y < x, -y if y > x, and x on the diagonal.
double kernel_k(double x, double y) noexcept;

struct DecayReport {
  bool ok = false;
  double C_fit = 0.0;       // smallest C with m(x1) <= C / (1 + |x1|^3) on |x1| <= L/2
  double worst_ratio = 0.0; // max over the outer half of m(x1) (1 + |x1|^3) / C_fit
};

/// m(x1) = max over x2 of |psi0|. The bound fitted on the inner half must keep holding on
/// the outer half of the truncated strip.
DecayReport check_decay(const StripGeometry& geom, const GridFunction& psi0);

struct CriterionOptions {
  double pt_tol = 1e-6;
  double self_orthogonality_tol = 1e-3;
  double relative_floor = 1e-14;
};

struct CriterionReport {
  double lhs = 0.0;  // double boundary integral of K (alpha(x) - alpha(y)) Re psi0(x, d) Im psi0(y, d)
  double rhs = 0.0;  // -<psi0, psi0>_T
  double gap = 0.0;
  double rel_gap = 0.0;
  bool decay_ok = false;
  double C_fit = 0.0;
  double tail_mass = 0.0;
  double self_orthogonality = 0.0;
  bool solvable = false;  // Jordan equation solvable iff psi0 is self-orthogonal
};

/// Direct O(n1^2) trapezoidal double sum over the upper boundary trace.
double kernel_double_integral(const Eigen::VectorXd& x1, const Eigen::VectorXd& w,
                              const Eigen::VectorXd& alpha, const Eigen::VectorXd& re_trace,
                              const Eigen::VectorXd& im_trace);

/// Requires psi0 PT-fixed within opts.pt_tol (not_pt_symmetric otherwise).
CriterionReport kernel_criterion(const DiscreteOperator& op, const GridFunction& psi0,
                                 const BoundaryProfile& alpha, const CriterionOptions& opts = {});

}  // namespace ptwg
