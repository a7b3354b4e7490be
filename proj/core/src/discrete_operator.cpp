#include "ptwg/discrete_operator.hpp"

#include "ptwg/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace ptwg {

namespace {

using Triplet = Eigen::Triplet<cplx>;
constexpr cplx kI{0.0, 1.0};

Eigen::VectorXd trapezoid_weights(const StripGeometry& g) {
  Eigen::VectorXd w(g.nodes());
  const double cell = g.h1() * g.h2();
  for (int i = 0; i <= g.n1; ++i) {
    const double ci = (i == 0 || i == g.n1) ? 0.5 : 1.0;
    for (int j = 0; j <= g.n2; ++j) {
      const double cj = (j == 0 || j == g.n2) ? 0.5 : 1.0;
      w[g.node(i, j)] = cell * ci * cj;
    }
  }
  return w;
}

void check_profile(const StripGeometry& geom, const BoundaryProfile& p, const char* name) {
  if (p.size() != geom.n1 + 1) {
    throw Error(ErrorCode::dimension_mismatch,
                std::string(name) + " is not sampled on the longitudinal grid");
  }
  if (!p.values().allFinite()) {
    throw Error(ErrorCode::non_finite, std::string(name) + " has non-finite samples");
  }
}

// Laplacian with the Robin condition through ghost points; interior x1 rows only.
void laplacian_triplets(const StripGeometry& g, const BoundaryProfile& alpha,
                        std::vector<Triplet>& out) {
  const double ih1 = 1.0 / (g.h1() * g.h1());
  const double ih2 = 1.0 / (g.h2() * g.h2());
  const double robin = 2.0 / g.h2();
  for (int i = 1; i < g.n1; ++i) {
    for (int j = 0; j <= g.n2; ++j) {
      const int k = g.node(i, j);
      cplx diag = 2.0 * ih1 + 2.0 * ih2;
      if (i > 1) out.emplace_back(k, g.node(i - 1, j), -ih1);
      if (i + 1 < g.n1) out.emplace_back(k, g.node(i + 1, j), -ih1);
      if (j == g.n2) {
        out.emplace_back(k, g.node(i, j - 1), -2.0 * ih2);
        diag += kI * robin * alpha[i];
      } else if (j == 0) {
        out.emplace_back(k, g.node(i, j + 1), -2.0 * ih2);
        diag -= kI * robin * alpha[i];
      } else {
        out.emplace_back(k, g.node(i, j - 1), -ih2);
        out.emplace_back(k, g.node(i, j + 1), -ih2);
      }
      out.emplace_back(k, k, diag);
    }
  }
}

DiscreteOperator finish(const StripGeometry& g, std::vector<Triplet>& trips) {
  const int n = g.nodes();
  SparseMatrixC interior(n, n);
  interior.setFromTriplets(trips.begin(), trips.end());
  Eigen::VectorXd rowsum = Eigen::VectorXd::Zero(n);
  for (int k = 0; k < interior.outerSize(); ++k) {
    for (SparseMatrixC::InnerIterator it(interior, k); it; ++it) {
      rowsum[it.row()] += std::abs(it.value());
    }
  }
  const double sentinel = std::ceil(rowsum.maxCoeff()) + 1.0;
  for (int i : {0, g.n1}) {
    for (int j = 0; j <= g.n2; ++j) trips.emplace_back(g.node(i, j), g.node(i, j), sentinel);
  }
  SparseMatrixC a(n, n);
  a.setFromTriplets(trips.begin(), trips.end());
  a.makeCompressed();
  return DiscreteOperator(std::move(a), trapezoid_weights(g), g);
}

}  // namespace

DiscreteOperator::DiscreteOperator(SparseMatrixC matrix, Eigen::VectorXd weights,
                                   std::optional<StripGeometry> geometry)
    : matrix_(std::move(matrix)), weights_(std::move(weights)), geometry_(std::move(geometry)) {
  if (matrix_.rows() != matrix_.cols() || matrix_.rows() != weights_.size()) {
    throw Error(ErrorCode::dimension_mismatch, "operator must be square with one weight per node");
  }
  if ((weights_.array() <= 0.0).any() || !weights_.allFinite()) {
    throw Error(ErrorCode::invalid_argument, "quadrature weights must be positive and finite");
  }
  if (geometry_ && geometry_->nodes() != matrix_.rows()) {
    throw Error(ErrorCode::dimension_mismatch, "operator size does not match its grid");
  }
  matrix_.makeCompressed();
  Eigen::VectorXd rowsum = Eigen::VectorXd::Zero(matrix_.rows());
  for (int k = 0; k < matrix_.outerSize(); ++k) {
    for (SparseMatrixC::InnerIterator it(matrix_, k); it; ++it) {
      rowsum[it.row()] += std::abs(it.value());
    }
  }
  norm_inf_ = rowsum.size() ? rowsum.maxCoeff() : 0.0;
}

DiscreteOperator DiscreteOperator::from_dense(const Eigen::MatrixXcd& matrix) {
  SparseMatrixC a = matrix.sparseView();
  return DiscreteOperator(std::move(a), Eigen::VectorXd::Ones(matrix.rows()));
}

const StripGeometry& DiscreteOperator::grid() const {
  if (!geometry_) throw Error(ErrorCode::invalid_argument, "operator carries no strip geometry");
  return *geometry_;
}

void DiscreteOperator::check_conforming(const GridFunction& u) const {
  if (u.size() != size()) {
    throw Error(ErrorCode::dimension_mismatch,
                "grid function of size " + std::to_string(u.size()) + " on operator of size " +
                    std::to_string(size()));
  }
}

cplx DiscreteOperator::t_inner(const GridFunction& u, const GridFunction& v) const {
  check_conforming(u);
  check_conforming(v);
  return (weights_.cast<cplx>().array() * u.array() * v.array()).sum();
}

cplx DiscreteOperator::hermitian_inner(const GridFunction& u, const GridFunction& v) const {
  check_conforming(u);
  check_conforming(v);
  return (weights_.cast<cplx>().array() * u.array() * v.array().conjugate()).sum();
}

double DiscreteOperator::norm(const GridFunction& u) const {
  check_conforming(u);
  return std::sqrt((weights_.array() * u.array().abs2()).sum());
}

GridFunction DiscreteOperator::apply(const GridFunction& u) const {
  check_conforming(u);
  return matrix_ * u;
}

double DiscreteOperator::weighted_symmetry_defect() const {
  SparseMatrixC wa = weights_.cast<cplx>().asDiagonal() * matrix_;
  SparseMatrixC wat = wa.transpose();
  SparseMatrixC diff = wa - wat;
  double defect = 0.0;
  for (int k = 0; k < diff.outerSize(); ++k) {
    for (SparseMatrixC::InnerIterator it(diff, k); it; ++it) {
      defect = std::max(defect, std::abs(it.value()));
    }
  }
  return defect;
}

DiscreteOperator assemble_operator(const StripGeometry& geom, const BoundaryProfile& profile) {
  geom.validate();
  check_profile(geom, profile, "boundary profile");
  std::vector<Triplet> trips;
  trips.reserve(static_cast<std::size_t>(geom.nodes()) * 5);
  laplacian_triplets(geom, profile, trips);
  return finish(geom, trips);
}

DiscreteOperator assemble_gauge_transformed(const StripGeometry& geom, const BoundaryProfile& alpha,
                                            const BoundaryProfile& beta, double epsilon) {
  geom.validate();
  if (!std::isfinite(epsilon)) throw Error(ErrorCode::non_finite, "epsilon must be finite");
  check_profile(geom, alpha, "alpha");
  std::vector<Triplet> trips;
  trips.reserve(static_cast<std::size_t>(geom.nodes()) * 9);
  laplacian_triplets(geom, alpha, trips);
  if (epsilon != 0.0) {
    check_profile(geom, beta, "beta");
    const auto& b = beta.values();
    const auto& b1 = beta.first_derivative();
    const auto& b2 = beta.second_derivative();
    const double inv2h1 = 1.0 / (2.0 * geom.h1());
    const double inv2h2 = 1.0 / (2.0 * geom.h2());
    for (int i = 1; i < geom.n1; ++i) {
      for (int j = 0; j <= geom.n2; ++j) {
        const int k = geom.node(i, j);
        const double x2 = geom.x2(j);
        // 2i eps beta' x2 d/dx1, centered
        const cplx c1 = 2.0 * kI * epsilon * b1[i] * x2 * inv2h1;
        if (i + 1 < geom.n1) trips.emplace_back(k, geom.node(i + 1, j), c1);
        if (i > 1) trips.emplace_back(k, geom.node(i - 1, j), -c1);
        cplx diag = kI * epsilon * b2[i] * x2 +
                    epsilon * epsilon * (b1[i] * b1[i] * x2 * x2 + b[i] * b[i]);
        if (j == 0 || j == geom.n2) {
          // boundary rows: du/dx2 = -i alpha u
          diag += 2.0 * epsilon * b[i] * alpha[i];
        } else {
          const cplx c2 = 2.0 * kI * epsilon * b[i] * inv2h2;
          trips.emplace_back(k, geom.node(i, j + 1), c2);
          trips.emplace_back(k, geom.node(i, j - 1), -c2);
        }
        trips.emplace_back(k, k, diag);
      }
    }
  }
  return finish(geom, trips);
}

cplx t_inner(const DiscreteOperator& op, const GridFunction& u, const GridFunction& v) {
  return op.t_inner(u, v);
}

GridFunction gauge_phase(const StripGeometry& geom, const BoundaryProfile& beta, double epsilon) {
  GridFunction phase(geom.nodes());
  for (int i = 0; i <= geom.n1; ++i) {
    for (int j = 0; j <= geom.n2; ++j) {
      phase[geom.node(i, j)] = std::exp(-kI * epsilon * beta[i] * geom.x2(j));
    }
  }
  return phase;
}

GridFunction parity_reflect(const StripGeometry& geom, const GridFunction& u) {
  if (u.size() != geom.nodes()) throw Error(ErrorCode::dimension_mismatch, "grid function size");
  GridFunction out(u.size());
  for (int i = 0; i <= geom.n1; ++i) {
    for (int j = 0; j <= geom.n2; ++j) out[geom.node(i, j)] = u[geom.node(i, geom.n2 - j)];
  }
  return out;
}

GridFunction pt_reflect(const StripGeometry& geom, const GridFunction& u) {
  return parity_reflect(geom, u).conjugate();
}

Eigen::VectorXcd upper_trace(const StripGeometry& geom, const GridFunction& u) {
  if (u.size() != geom.nodes()) throw Error(ErrorCode::dimension_mismatch, "grid function size");
  Eigen::VectorXcd t(geom.n1 + 1);
  for (int i = 0; i <= geom.n1; ++i) t[i] = u[geom.node(i, geom.n2)];
  return t;
}

Eigen::VectorXcd lower_trace(const StripGeometry& geom, const GridFunction& u) {
  if (u.size() != geom.nodes()) throw Error(ErrorCode::dimension_mismatch, "grid function size");
  Eigen::VectorXcd t(geom.n1 + 1);
  for (int i = 0; i <= geom.n1; ++i) t[i] = u[geom.node(i, 0)];
  return t;
}

Eigen::VectorXd boundary_weights(const StripGeometry& geom) {
  Eigen::VectorXd w = Eigen::VectorXd::Constant(geom.n1 + 1, geom.h1());
  w[0] *= 0.5;
  w[geom.n1] *= 0.5;
  return w;
}

Eigen::MatrixXcd transverse_operator(double d, int n2, double alpha_value) {
  if (n2 < 4) throw Error(ErrorCode::grid_too_coarse, "transverse grid needs n2 >= 4");
  if (!(d > 0.0)) throw Error(ErrorCode::invalid_argument, "d must be positive");
  const double h = 2.0 * d / n2;
  const double ih2 = 1.0 / (h * h);
  Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(n2 + 1, n2 + 1);
  for (int j = 0; j <= n2; ++j) {
    t(j, j) = 2.0 * ih2;
    if (j == n2) {
      t(j, j - 1) = -2.0 * ih2;
      t(j, j) += kI * 2.0 * alpha_value / h;
    } else if (j == 0) {
      t(j, j + 1) = -2.0 * ih2;
      t(j, j) -= kI * 2.0 * alpha_value / h;
    } else {
      t(j, j - 1) = -ih2;
      t(j, j + 1) = -ih2;
    }
  }
  return t;
}

Eigen::MatrixXcd transverse_block(const DiscreteOperator& op, int i) {
  const auto& g = op.grid();
  if (i <= 0 || i >= g.n1) throw Error(ErrorCode::invalid_argument, "column must be interior");
  Eigen::MatrixXcd block = Eigen::MatrixXcd::Zero(g.n2 + 1, g.n2 + 1);
  const auto& a = op.matrix();
  for (int jc = 0; jc <= g.n2; ++jc) {
    for (SparseMatrixC::InnerIterator it(a, g.node(i, jc)); it; ++it) {
      const auto r = static_cast<int>(it.row());
      if (r / (g.n2 + 1) == i) block(r % (g.n2 + 1), jc) = it.value();
    }
  }
  block.diagonal().array() -= 2.0 / (g.h1() * g.h1());
  return block;
}

double essential_threshold(const StripGeometry& geom, double alpha_infinity) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(transverse_operator(geom.d, geom.n2, alpha_infinity),
                                                 false);
  return es.eigenvalues().real().minCoeff();
}

double tail_mass(const DiscreteOperator& op, const GridFunction& u, double outer_fraction) {
  const auto& g = op.grid();
  const double total = op.norm(u);
  if (total == 0.0) return 0.0;
  double outer = 0.0;
  for (int i = 0; i <= g.n1; ++i) {
    if (std::abs(g.x1(i)) < (1.0 - outer_fraction) * g.L) continue;
    for (int j = 0; j <= g.n2; ++j) {
      const int k = g.node(i, j);
      outer += op.weights()[k] * std::norm(u[k]);
    }
  }
  return outer / (total * total);
}

}  // namespace ptwg
