#include "ptwg/spectral_cluster.hpp"

#include "ptwg/error.hpp"

#include <Eigen/SVD>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ptwg {

namespace {

// sigma_max of the Hermitian Gram matrix over sigma_min of the T-Gram matrix: large when
// the span contains a direction that is (nearly) self-orthogonal.
double t_gram_condition(const DiscreteOperator& op, const GridFunction& a, const GridFunction& b) {
  Eigen::Matrix2cd g;
  g << op.t_inner(a, a), op.t_inner(a, b), op.t_inner(b, a), op.t_inner(b, b);
  Eigen::Matrix2cd h;
  h << op.hermitian_inner(a, a), op.hermitian_inner(a, b), op.hermitian_inner(b, a),
      op.hermitian_inner(b, b);
  const double gmin = Eigen::JacobiSVD<Eigen::Matrix2cd>(g).singularValues()[1];
  const double hmax = Eigen::JacobiSVD<Eigen::Matrix2cd>(h).singularValues()[0];
  return gmin > 0.0 ? hmax / gmin : std::numeric_limits<double>::infinity();
}

double hermitian_gram_ratio(const DiscreteOperator& op, const GridFunction& a,
                            const GridFunction& b) {
  Eigen::Matrix2cd g;
  g << op.hermitian_inner(a, a), op.hermitian_inner(a, b), op.hermitian_inner(b, a),
      op.hermitian_inner(b, b);
  Eigen::JacobiSVD<Eigen::Matrix2cd> svd(g);
  const auto s = svd.singularValues();
  return s[0] > 0.0 ? s[1] / s[0] : 0.0;
}

}  // namespace

std::string_view to_string(ClusterKind kind) noexcept {
  switch (kind) {
    case ClusterKind::simple: return "Simple";
    case ClusterKind::semisimple_double: return "SemisimpleDouble";
    case ClusterKind::jordan_block: return "JordanBlock";
  }
  return "Unknown";
}

double self_orthogonality(const DiscreteOperator& op, const GridFunction& psi) {
  const double n = op.norm(psi);
  if (n == 0.0) throw Error(ErrorCode::invalid_argument, "zero vector");
  return std::abs(op.t_inner(psi, psi)) / (n * n);
}

PtNormalized pt_normalize(const DiscreteOperator& op, const GridFunction& psi, double tol) {
  const auto& g = op.grid();
  const GridFunction pt = pt_reflect(g, psi);
  const double nn = op.norm(psi);
  if (nn == 0.0) throw Error(ErrorCode::invalid_argument, "zero vector");
  const cplx z = op.hermitian_inner(pt, psi);
  const double rel = std::abs(z) / (nn * nn);
  if (std::abs(rel - 1.0) > tol) {
    std::ostringstream msg;
    msg << "vector is not PT-related to itself: |(PT psi, psi)| / ||psi||^2 = " << rel;
    throw Error(ErrorCode::not_pt_symmetric, msg.str());
  }
  PtNormalized out;
  out.theta = std::arg(z);
  out.psi = std::polar(1.0, out.theta / 2.0) * psi;
  Eigen::Index imax = 0;
  out.psi.cwiseAbs().maxCoeff(&imax);
  // largest entries of a PT-fixed vector sit in mirrored pairs with conjugate values,
  // so their real parts agree and fix the sign deterministically
  Eigen::Index iref = imax;
  double best = -1.0;
  for (Eigen::Index i = 0; i < out.psi.size(); ++i) {
    const double re = std::abs(out.psi[i].real());
    if (re > best * (1.0 + 1e-9)) {
      best = re;
      iref = i;
    }
  }
  if (out.psi[iref].real() < 0.0) out.psi = -out.psi;
  const GridFunction mirrored = pt_reflect(g, out.psi);
  out.residual = (mirrored - out.psi).cwiseAbs().maxCoeff() / out.psi.cwiseAbs().maxCoeff();
  out.psi = 0.5 * (out.psi + mirrored);
  return out;
}

JordanChain solve_jordan_chain(const DiscreteOperator& op, cplx lambda0, const GridFunction& psi0,
                               double tol) {
  const double so = self_orthogonality(op, psi0);
  if (so >= tol) {
    std::ostringstream msg;
    msg << "eigenvector is not self-orthogonal (|<psi, psi>_T| / ||psi||^2 = " << so
        << "), the Jordan equation has no solution";
    throw Error(ErrorCode::unsolvable_chain, msg.str());
  }
  const Eigen::Index n = op.size();
  std::vector<Eigen::Triplet<cplx>> trips;
  trips.reserve(static_cast<std::size_t>(op.matrix().nonZeros() + 3 * n));
  const auto& a = op.matrix();
  for (int k = 0; k < a.outerSize(); ++k) {
    for (SparseMatrixC::InnerIterator it(a, k); it; ++it) {
      trips.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    }
  }
  const auto& w = op.weights();
  for (Eigen::Index i = 0; i < n; ++i) {
    const int ii = static_cast<int>(i);
    trips.emplace_back(ii, ii, -lambda0);
    trips.emplace_back(ii, static_cast<int>(n), std::conj(psi0[i]));
    trips.emplace_back(static_cast<int>(n), ii, w[i] * std::conj(psi0[i]));
  }
  SparseMatrixC bordered(n + 1, n + 1);
  bordered.setFromTriplets(trips.begin(), trips.end());
  bordered.makeCompressed();
  Eigen::SparseLU<SparseMatrixC, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(bordered);
  if (lu.info() != Eigen::Success) {
    throw Error(ErrorCode::degenerate_chain, "bordered Jordan system is singular");
  }
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n + 1);
  rhs.head(n) = psi0;
  const Eigen::VectorXcd sol = lu.solve(rhs);
  if (!sol.allFinite()) throw Error(ErrorCode::degenerate_chain, "bordered Jordan solve failed");

  JordanChain chain;
  GridFunction phi = sol.head(n);
  chain.border = sol[n];
  chain.raw_pairing = op.t_inner(phi, psi0);
  if (std::abs(chain.raw_pairing) <= 1e-12 * op.norm(phi) * op.norm(psi0)) {
    throw Error(ErrorCode::degenerate_chain, "pairing <phi, psi0>_T vanishes");
  }
  chain.scale = std::sqrt(1.0 / chain.raw_pairing);
  chain.psi0 = chain.scale * psi0;
  chain.phi0 = chain.scale * phi;
  const GridFunction r = op.apply(chain.phi0) - lambda0 * chain.phi0 - chain.psi0;
  chain.residual = op.norm(r) / op.norm(chain.psi0);
  chain.pairing_defect = std::abs(op.t_inner(chain.phi0, chain.psi0) - 1.0);
  chain.hermitian_defect = std::abs(op.hermitian_inner(chain.phi0, chain.psi0)) /
                           (op.norm(chain.phi0) * op.norm(chain.psi0));
  chain.pt_parity = chain.raw_pairing.real() < 0.0 ? -1 : 1;
  return chain;
}

std::pair<GridFunction, GridFunction> biorthogonalize_pair(const DiscreteOperator& op,
                                                           const GridFunction& v1,
                                                           const GridFunction& v2, double tol) {
  auto weak = [&](const GridFunction& v) {
    const double n = op.norm(v);
    return n == 0.0 || std::abs(op.t_inner(v, v)) <= tol * n * n;
  };
  GridFunction first = v1;
  GridFunction second = v2;
  if (weak(v1)) {
    if (!weak(v2)) {
      std::swap(first, second);
    } else {
      first = v1 + v2;
      second = v1;
    }
  }
  if (weak(first)) {
    throw Error(ErrorCode::singular_gram,
                "T-Gram matrix is singular: the eigenspace is self-orthogonal, use the Jordan chain");
  }
  GridFunction u1 = first / std::sqrt(op.t_inner(first, first));
  GridFunction w = second - op.t_inner(second, u1) * u1;
  if (weak(w)) {
    throw Error(ErrorCode::singular_gram,
                "T-Gram matrix is singular: the eigenspace contains a self-orthogonal direction");
  }
  GridFunction u2 = w / std::sqrt(op.t_inner(w, w));
  return {std::move(u1), std::move(u2)};
}

SpectralCluster classify_cluster(const DiscreteOperator& op, std::vector<EigenPair> pairs,
                                 const ClusterOptions& opts) {
  if (pairs.empty() || pairs.size() > 2) {
    throw Error(ErrorCode::invalid_argument, "a cluster holds one or two eigenpairs");
  }
  SpectralCluster out;
  cplx center = 0.0;
  for (const auto& p : pairs) center += p.lambda;
  center /= static_cast<double>(pairs.size());
  out.center = center;
  out.radius = opts.radius_rel * std::abs(center) + opts.radius_abs;
  for (auto& p : pairs) {
    if (std::abs(p.lambda - center) > out.radius) {
      std::ostringstream msg;
      msg << "eigenvalue " << p.lambda << " lies outside the cluster radius " << out.radius;
      throw Error(ErrorCode::invalid_argument, msg.str());
    }
    p.psi /= op.norm(p.psi);
  }
  const bool pt_available = op.geometry().has_value();

  auto make_jordan = [&](const GridFunction& dominant) {
    GridFunction psi = dominant;
    if (pt_available && std::abs(center.imag()) <= out.radius) {
      psi = pt_normalize(op, psi, opts.pt_tol).psi;
    }
    out.kind = ClusterKind::jordan_block;
    out.chain = solve_jordan_chain(op, center, psi, opts.self_orthogonality_tol);
    out.psi0 = out.chain->psi0;
    out.phi0 = out.chain->phi0;
  };

  if (pairs.size() == 1) {
    const GridFunction& v = pairs.front().psi;
    out.self_orthogonality = self_orthogonality(op, v);
    out.pairs = std::move(pairs);
    if (out.self_orthogonality < opts.self_orthogonality_tol) {
      make_jordan(out.pairs.front().psi);
    } else {
      out.kind = ClusterKind::simple;
      out.psi0 = out.pairs.front().psi;
    }
    return out;
  }

  const GridFunction& v1 = pairs[0].psi;
  const GridFunction& v2 = pairs[1].psi;
  out.t_gram_condition = t_gram_condition(op, v1, v2);
  // dominant direction: v1 + v2 with v2 phase-aligned to v1
  const cplx c = op.hermitian_inner(v2, v1);
  const cplx align = std::abs(c) > 0.0 ? std::conj(c) / std::abs(c) : cplx(1.0);
  GridFunction dominant = v1 + align * v2;
  dominant /= op.norm(dominant);
  out.self_orthogonality = self_orthogonality(op, dominant);

  if (out.t_gram_condition < 1.0 / opts.gram_tol) {
    out.kind = ClusterKind::semisimple_double;
    std::tie(out.psi_plus, out.psi_minus) = biorthogonalize_pair(op, v1, v2, opts.gram_tol);
    out.pairs = std::move(pairs);
    return out;
  }
  if (out.self_orthogonality < opts.self_orthogonality_tol) {
    out.pairs = std::move(pairs);
    make_jordan(dominant);
    return out;
  }
  ClusterDiagnostics diag;
  diag.hermitian_gram_ratio = hermitian_gram_ratio(op, v1, v2);
  diag.t_gram_condition = out.t_gram_condition;
  diag.self_orthogonality = out.self_orthogonality;
  std::ostringstream msg;
  msg << "cluster at " << center << " is indeterminate: cond(T-Gram) = " << diag.t_gram_condition
      << ", self-orthogonality = " << diag.self_orthogonality;
  throw ClusterError(msg.str(), diag);
}

double conjugation_defect(const std::vector<cplx>& values, cplx target, double ring_tol) {
  double outer = 0.0;
  for (const auto& v : values) outer = std::max(outer, std::abs(v - target));
  double defect = 0.0;
  for (const auto& v : values) {
    if (std::abs(v - target) >= outer - ring_tol) continue;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& w : values) best = std::min(best, std::abs(std::conj(v) - w));
    defect = std::max(defect, best);
  }
  return defect;
}

}  // namespace ptwg
