#pragma once

#include "ptwg/strip.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <complex>
#include <optional>

namespace ptwg {

using cplx = std::complex<double>;
using SparseMatrixC = Eigen::SparseMatrix<cplx>;
using GridFunction = Eigen::VectorXcd;

/// A discretized operator together with the quadrature weights that define its
/// bilinear form <u, v>_T = sum W u v and Hermitian product (u, v) = sum W u conj(v).
///
/// Immutable after construction. Operators assembled on the strip carry their
/// geometry; bare matrices (model problems) do not.
class DiscreteOperator {
 public:
  DiscreteOperator(SparseMatrixC matrix, Eigen::VectorXd weights,
                   std::optional<StripGeometry> geometry = std::nullopt);

  /// Unit-weight operator from a dense matrix.
  static DiscreteOperator from_dense(const Eigen::MatrixXcd& matrix);

  const SparseMatrixC& matrix() const noexcept { return matrix_; }
  const Eigen::VectorXd& weights() const noexcept { return weights_; }
  const std::optional<StripGeometry>& geometry() const noexcept { return geometry_; }
  /// Geometry or invalid_argument if this operator is not a strip assembly.
  const StripGeometry& grid() const;
  Eigen::Index size() const noexcept { return matrix_.rows(); }

  cplx t_inner(const GridFunction& u, const GridFunction& v) const;
  cplx hermitian_inner(const GridFunction& u, const GridFunction& v) const;
  double norm(const GridFunction& u) const;
  GridFunction apply(const GridFunction& u) const;

  /// max |(W A) - (W A)^T| over all entries.
  double weighted_symmetry_defect() const;
  /// Maximum absolute row sum.
  double norm_inf() const noexcept { return norm_inf_; }

 private:
  void check_conforming(const GridFunction& u) const;

  SparseMatrixC matrix_;
  Eigen::VectorXd weights_;
  std::optional<StripGeometry> geometry_;
  double norm_inf_ = 0.0;
};

/// Five-point discretization of -Laplacian with (d/dx2 + i alpha) u = 0 on x2 = +-d
/// (ghost-point elimination) and Dirichlet rows at x1 = +-L.
///
/// Dirichlet nodes keep a decoupled row whose diagonal sits above the Gershgorin
/// bound of the interior block, so they never enter a shift-invert window.
DiscreteOperator assemble_operator(const StripGeometry& geom, const BoundaryProfile& profile);

/// Discretization of the conjugated operator e^{i eps beta x2} (-Laplacian) e^{-i eps beta x2}
/// with the unperturbed boundary condition for alpha:
///   -Laplacian + eps (2i beta' x2 d/dx1 + 2i beta d/dx2 + i beta'' x2)
///              + eps^2 (beta'^2 x2^2 + beta^2).
DiscreteOperator assemble_gauge_transformed(const StripGeometry& geom, const BoundaryProfile& alpha,
                                            const BoundaryProfile& beta, double epsilon);

cplx t_inner(const DiscreteOperator& op, const GridFunction& u, const GridFunction& v);

/// Diagonal of the gauge map U: e^{-i eps beta(x1) x2} at every node.
GridFunction gauge_phase(const StripGeometry& geom, const BoundaryProfile& beta, double epsilon);

/// (P u)(x1, x2) = u(x1, -x2).
GridFunction parity_reflect(const StripGeometry& geom, const GridFunction& u);
/// (PT u)(x1, x2) = conj(u(x1, -x2)).
GridFunction pt_reflect(const StripGeometry& geom, const GridFunction& u);

/// Values on the upper (x2 = +d) and lower (x2 = -d) boundary rows, i = 0..n1.
Eigen::VectorXcd upper_trace(const StripGeometry& geom, const GridFunction& u);
Eigen::VectorXcd lower_trace(const StripGeometry& geom, const GridFunction& u);
/// Trapezoidal weights along x1 (h1, halved at the ends).
Eigen::VectorXd boundary_weights(const StripGeometry& geom);

/// Transverse (x2) operator on one column for a constant boundary value.
Eigen::MatrixXcd transverse_operator(double d, int n2, double alpha_value);

/// The x2-coupling block of column i of an assembled operator, with the longitudinal
/// diagonal contribution 2/h1^2 removed.
Eigen::MatrixXcd transverse_block(const DiscreteOperator& op, int i);

/// Bottom of the continuous spectrum of the discrete problem with constant boundary
/// value alpha_infinity: lowest real part of the discrete transverse spectrum.
double essential_threshold(const StripGeometry& geom, double alpha_infinity);

/// Fraction of sum W |u|^2 carried by nodes with |x1| >= (1 - outer_fraction) L.
double tail_mass(const DiscreteOperator& op, const GridFunction& u, double outer_fraction = 0.1);

}  // namespace ptwg
