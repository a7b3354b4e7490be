#include "ptwg/eigensolver.hpp"

#include "ptwg/error.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <random>

namespace ptwg {

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using ApplyFn = std::function<VectorXcd(const VectorXcd&)>;

constexpr double kEps = std::numeric_limits<double>::epsilon();

VectorXcd random_vector(Eigen::Index n, std::mt19937_64& rng) {
  auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5; };
  VectorXcd v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double re = uniform();
    const double im = uniform();
    v[i] = cplx(re, im);
  }
  return v;
}

// Eigenvector of upper triangular T for diagonal entry j (entries past j are zero).
// Nearly equal diagonal entries with a negligible coupling are treated as a
// semisimple pair, so the two vectors stay independent.
VectorXcd triangular_eigvec(const MatrixXcd& T, Eigen::Index j) {
  const Eigen::Index n = T.rows();
  const double scale = std::max(T.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  VectorXcd y = VectorXcd::Zero(n);
  y[j] = 1.0;
  const cplx lam = T(j, j);
  for (Eigen::Index i = j - 1; i >= 0; --i) {
    cplx num = 0.0;
    for (Eigen::Index l = i + 1; l <= j; ++l) num += T(i, l) * y[l];
    cplx den = T(i, i) - lam;
    if (std::abs(den) <= 1e-10 * scale) {
      if (std::abs(num) <= 1e-8 * scale * y.head(j + 1).cwiseAbs().maxCoeff()) {
        y[i] = 0.0;
        continue;
      }
      if (std::abs(den) < kEps * scale) den = kEps * scale;
    }
    y[i] = -num / den;
  }
  return y / y.norm();
}

// Swap diagonal entries k and k+1 of the Schur form T = U^H H U.
void swap_adjacent(MatrixXcd& T, MatrixXcd& U, Eigen::Index k) {
  const cplx t11 = T(k, k);
  const cplx t22 = T(k + 1, k + 1);
  const cplx x1 = T(k, k + 1);
  const cplx x2 = t22 - t11;
  const double nx = std::hypot(std::abs(x1), std::abs(x2));
  if (nx == 0.0) return;
  Eigen::Matrix2cd Q;
  Q << x1 / nx, -std::conj(x2) / nx, x2 / nx, std::conj(x1) / nx;
  T.middleRows(k, 2) = Q.adjoint() * T.middleRows(k, 2);
  T.middleCols(k, 2) = T.middleCols(k, 2) * Q;
  U.middleCols(k, 2) = U.middleCols(k, 2) * Q;
  T(k + 1, k) = 0.0;
  T(k, k) = t22;
  T(k + 1, k + 1) = t11;
}

// Largest |theta| first; ties broken by real then imaginary part.
bool nearer(cplx a, cplx b) {
  const double aa = std::abs(a);
  const double ab = std::abs(b);
  if (aa != ab) return aa > ab;
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

void sort_schur(MatrixXcd& T, MatrixXcd& U) {
  const Eigen::Index n = T.rows();
  for (Eigen::Index p = 0; p < n; ++p) {
    Eigen::Index best = p;
    for (Eigen::Index i = p + 1; i < n; ++i) {
      if (nearer(T(i, i), T(best, best))) best = i;
    }
    for (Eigen::Index i = best; i > p; --i) swap_adjacent(T, U, i - 1);
  }
}

void orthogonalize(VectorXcd& w, const MatrixXcd* lock, const MatrixXcd& V, Eigen::Index cols,
                   VectorXcd* coeffs) {
  for (int pass = 0; pass < 2; ++pass) {
    if (lock && lock->cols() > 0) w -= *lock * (lock->adjoint() * w);
    if (cols > 0) {
      VectorXcd h = V.leftCols(cols).adjoint() * w;
      w -= V.leftCols(cols) * h;
      if (coeffs) coeffs->head(cols) += h;
    }
  }
}

struct KrylovSchurResult {
  MatrixXcd Q;  // orthonormal Schur vectors of the wanted part
  MatrixXcd T;  // their upper triangular Schur block
  std::vector<double> estimates;
  bool converged = false;
  int restarts = 0;
};

KrylovSchurResult krylov_schur(const ApplyFn& apply, Eigen::Index n, VectorXcd start, int nev,
                               int m, double tol, int max_restarts, const MatrixXcd* lock,
                               std::mt19937_64& rng) {
  MatrixXcd V = MatrixXcd::Zero(n, m + 1);
  MatrixXcd H = MatrixXcd::Zero(m + 1, m);
  orthogonalize(start, lock, V, 0, nullptr);
  V.col(0) = start / start.norm();
  Eigen::Index p = 0;
  KrylovSchurResult out;
  for (int restart = 0;; ++restart) {
    for (Eigen::Index j = p; j < m; ++j) {
      VectorXcd w = apply(V.col(j));
      VectorXcd h = VectorXcd::Zero(m + 1);
      orthogonalize(w, lock, V, j + 1, &h);
      H.col(j).head(j + 1) += h.head(j + 1);
      const double beta = w.norm();
      if (!std::isfinite(beta)) {
        throw Error(ErrorCode::non_finite, "shift-invert produced non-finite values");
      }
      if (beta <= 1e-13 * std::max(h.head(j + 1).norm(), 1e-300)) {
        // invariant subspace found: continue with a fresh orthogonal direction
        VectorXcd r = random_vector(n, rng);
        orthogonalize(r, lock, V, j + 1, nullptr);
        V.col(j + 1) = r / r.norm();
        H(j + 1, j) = 0.0;
      } else {
        V.col(j + 1) = w / beta;
        H(j + 1, j) = beta;
      }
    }
    Eigen::ComplexSchur<MatrixXcd> schur(H.topRows(m));
    MatrixXcd T = schur.matrixT();
    MatrixXcd U = schur.matrixU();
    sort_schur(T, U);
    const Eigen::RowVectorXcd b = H.row(m) * U;

    out.estimates.assign(static_cast<std::size_t>(nev), 0.0);
    bool converged = true;
    for (int i = 0; i < nev; ++i) {
      const VectorXcd y = triangular_eigvec(T, i);
      const double est = std::abs((b.head(i + 1) * y.head(i + 1)).value());
      out.estimates[static_cast<std::size_t>(i)] = est / std::max(std::abs(T(i, i)), 1e-300);
      if (est > tol * std::abs(T(i, i))) converged = false;
    }
    if (converged || restart >= max_restarts) {
      out.Q = V.leftCols(m) * U.leftCols(nev);
      out.T = T.topLeftCorner(nev, nev);
      out.converged = converged;
      out.restarts = restart;
      return out;
    }
    const Eigen::Index keep = std::min<Eigen::Index>(m - 1, nev + (m - nev) / 2);
    MatrixXcd kept = V.leftCols(m) * U.leftCols(keep);
    V.col(keep) = V.col(m);
    V.leftCols(keep) = kept;
    H.setZero();
    H.topLeftCorner(keep, keep) = T.topLeftCorner(keep, keep).triangularView<Eigen::Upper>();
    H.row(keep).head(keep) = b.head(keep);
    p = keep;
  }
}

class ShiftInvert {
 public:
  ShiftInvert(const SparseMatrixC& a, double norm_a, cplx target, std::mt19937_64& rng)
      : shift_(target) {
    const Eigen::Index n = a.rows();
    SparseMatrixC id(n, n);
    id.setIdentity();
    const VectorXcd probe = random_vector(n, rng);
    double delta = std::sqrt(kEps) * std::max(1.0, std::abs(target));
    for (int attempt = 0; attempt < 12; ++attempt) {
      SparseMatrixC shifted = a - shift_ * id;
      shifted.makeCompressed();
      lu_.analyzePattern(shifted);
      lu_.factorize(shifted);
      if (lu_.info() == Eigen::Success) {
        const VectorXcd y = lu_.solve(probe);
        // a shift within round-off of an eigenvalue is treated as singular
        if (y.allFinite() && 100.0 * kEps * std::max(norm_a, 1.0) * y.norm() < probe.norm()) return;
      }
      shift_ = target + delta;
      perturbed_ = true;
      delta *= 2.0;
    }
    throw Error(ErrorCode::no_convergence, "could not factorize the shifted operator");
  }

  VectorXcd apply(const VectorXcd& x) const { return lu_.solve(x); }
  cplx shift() const { return shift_; }
  bool perturbed() const { return perturbed_; }

 private:
  Eigen::SparseLU<SparseMatrixC, Eigen::COLAMDOrdering<int>> lu_;
  cplx shift_;
  bool perturbed_ = false;
};

void finish_pair(const DiscreteOperator& op, EigenPair& pair) {
  const double nrm = op.norm(pair.psi);
  pair.psi /= nrm;
  Eigen::Index imax = 0;
  pair.psi.cwiseAbs().maxCoeff(&imax);
  const cplx phase = pair.psi[imax] / std::abs(pair.psi[imax]);
  pair.psi /= phase;
  pair.residual = op.norm(op.apply(pair.psi) - pair.lambda * pair.psi);
  pair.t_norm = op.t_inner(pair.psi, pair.psi);
}

void sort_by_distance(std::vector<EigenPair>& pairs, cplx target) {
  std::stable_sort(pairs.begin(), pairs.end(), [target](const EigenPair& a, const EigenPair& b) {
    const double da = std::abs(a.lambda - target);
    const double db = std::abs(b.lambda - target);
    if (da != db) return da < db;
    if (a.lambda.real() != b.lambda.real()) return a.lambda.real() < b.lambda.real();
    return a.lambda.imag() < b.lambda.imag();
  });
}

void enforce_residuals(const DiscreteOperator& op, const std::vector<EigenPair>& pairs, double tol) {
  const double bound = tol * std::max(op.norm_inf(), 1.0);
  std::vector<double> res;
  bool ok = true;
  for (const auto& p : pairs) {
    res.push_back(p.residual);
    if (!(p.residual <= bound)) ok = false;
  }
  if (!ok) {
    throw ConvergenceError("eigenpair residuals exceed tol * ||A||", std::move(res));
  }
}

EigenSolveResult solve_dense(const DiscreteOperator& op, cplx target, int k, double tol) {
  const MatrixXcd a = MatrixXcd(op.matrix());
  Eigen::ComplexSchur<MatrixXcd> schur(a);
  const MatrixXcd& T = schur.matrixT();
  const MatrixXcd& U = schur.matrixU();
  std::vector<EigenPair> pairs;
  for (Eigen::Index j = 0; j < T.rows(); ++j) {
    EigenPair p;
    p.lambda = T(j, j);
    p.psi = U * triangular_eigvec(T, j);
    finish_pair(op, p);
    pairs.push_back(std::move(p));
  }
  sort_by_distance(pairs, target);
  if (static_cast<int>(pairs.size()) > k) pairs.resize(static_cast<std::size_t>(k));
  enforce_residuals(op, pairs, tol);
  EigenSolveResult out;
  out.pairs = std::move(pairs);
  out.shift = target;
  return out;
}

struct KrylovRun {
  std::vector<EigenPair> pairs;
  cplx shift;
  bool perturbed = false;
  int restarts = 0;
  double separation = 1.0;  // distance to the nearest Ritz value over `radius`
  double radius = 0.0;      // distance from the shift to the k-th Ritz value
};

// separation below which the shift counts as sitting on an eigenvalue
constexpr double kSeparationLimit = 1e-4;

KrylovRun krylov_pairs(const DiscreteOperator& op, cplx target, int k, const SolverOptions& opts,
                       std::mt19937_64& rng) {
  const Eigen::Index n = op.size();
  const ShiftInvert si(op.matrix(), op.norm_inf(), target, rng);
  const ApplyFn apply = [&si](const VectorXcd& x) { return si.apply(x); };

  const int nev = k;
  int m = opts.krylov_dim > 0 ? opts.krylov_dim : std::max(2 * k + 1, k + 20);
  m = static_cast<int>(std::min<Eigen::Index>(m, n - 1));
  if (m <= nev) throw Error(ErrorCode::invalid_argument, "krylov dimension must exceed k");

  KrylovSchurResult main =
      krylov_schur(apply, n, random_vector(n, rng), nev, m, opts.tol, opts.max_restarts, nullptr, rng);
  if (!main.converged) {
    throw ConvergenceError("Krylov-Schur did not converge after " +
                               std::to_string(opts.max_restarts) + " restarts",
                           main.estimates);
  }
  MatrixXcd basis = main.Q;
  const double kth = main.T.diagonal().cwiseAbs().minCoeff();
  for (int c = 0; c < opts.deflation_checks; ++c) {
    const Eigen::Index room = n - 1 - basis.cols();
    if (room < 4) break;
    const int m2 = static_cast<int>(std::min<Eigen::Index>(20, room));
    KrylovSchurResult extra = krylov_schur(apply, n, random_vector(n, rng), 1, m2, opts.tol,
                                           opts.max_restarts, &basis, rng);
    if (!extra.converged || std::abs(extra.T(0, 0)) < kth * (1.0 - 1e-8)) break;
    MatrixXcd grown(n, basis.cols() + 1);
    grown << basis, extra.Q;
    basis = std::move(grown);
  }

  // Rayleigh-Ritz with the shift-inverted operator on the collected basis.
  Eigen::HouseholderQR<MatrixXcd> qr(basis);
  const MatrixXcd B = qr.householderQ() * MatrixXcd::Identity(n, basis.cols());
  MatrixXcd OB(n, B.cols());
  for (Eigen::Index j = 0; j < B.cols(); ++j) OB.col(j) = apply(B.col(j));
  Eigen::ComplexSchur<MatrixXcd> schur(B.adjoint() * OB);
  MatrixXcd T = schur.matrixT();
  MatrixXcd U = schur.matrixU();
  sort_schur(T, U);

  std::vector<EigenPair> pairs;
  for (Eigen::Index j = 0; j < T.rows(); ++j) {
    EigenPair p;
    p.lambda = si.shift() + 1.0 / T(j, j);
    p.psi = B * (U * triangular_eigvec(T, j));
    finish_pair(op, p);
    pairs.push_back(std::move(p));
  }

  KrylovRun out;
  const double theta_max = T.diagonal().cwiseAbs().maxCoeff();
  out.separation = theta_max > 0.0 ? kth / theta_max : 1.0;
  out.radius = kth > 0.0 ? 1.0 / kth : 0.0;
  out.pairs = std::move(pairs);
  out.shift = si.shift();
  out.perturbed = si.perturbed();
  out.restarts = main.restarts;
  return out;
}

}  // namespace

EigenSolveResult solve_eigs_near(const DiscreteOperator& op, cplx target, int k,
                                 const SolverOptions& opts) {
  if (k < 1) throw Error(ErrorCode::invalid_argument, "k must be at least 1");
  if (!std::isfinite(target.real()) || !std::isfinite(target.imag())) {
    throw Error(ErrorCode::non_finite, "target must be finite");
  }
  if (!(opts.tol > 0.0)) throw Error(ErrorCode::invalid_argument, "tolerance must be positive");
  const Eigen::Index n = op.size();
  if (n <= opts.dense_threshold || n <= k + 2) return solve_dense(op, target, k, opts.tol);

  std::mt19937_64 rng(opts.seed);
  KrylovRun run = krylov_pairs(op, target, k, opts, rng);
  if (run.separation < kSeparationLimit) {
    // the shift sits almost on an eigenvalue: the others lose accuracy, so move it
    // by a small fraction of the search radius and take one vector more
    const cplx moved = run.shift + 1e-3 * run.radius;
    run = krylov_pairs(op, moved, k + 1, opts, rng);
    run.perturbed = true;
  }
  sort_by_distance(run.pairs, target);
  if (static_cast<int>(run.pairs.size()) > k) run.pairs.resize(static_cast<std::size_t>(k));
  enforce_residuals(op, run.pairs, opts.tol);

  EigenSolveResult out;
  out.pairs = std::move(run.pairs);
  out.shift = run.shift;
  out.shift_perturbed = run.perturbed;
  out.restarts = run.restarts;
  return out;
}

}  // namespace ptwg
