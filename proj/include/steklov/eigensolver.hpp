#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "steklov/errors.hpp"
#include "steklov/fem.hpp"

namespace steklov {

/// Stiffness/boundary-mass pair of a discrete Steklov problem.
struct Pencil {
  SymSparse stiffness;
  SymSparse boundary_mass;
};

/// Ascending eigenvalues with B-normalized eigenvectors stored column-wise.
struct EigenSolution {
  std::vector<double> eigenvalues;
  Eigen::MatrixXd eigenvectors;
  std::vector<double> residual_norms;
  int sweeps = 0;

  Eigen::VectorXd vector(int i) const { return eigenvectors.col(i); }
};

/// Sparse Cholesky factorization of an SPD matrix, kept for repeated solves.
class SpdSolver {
public:
  explicit SpdSolver(const SymSparse& a) : a_(&a.full) {
    llt_.compute(a.full);
    if (llt_.info() != Eigen::Success)
      throw NotPositiveDefinite("sparse Cholesky factorization failed: matrix is not positive definite");
  }

  template <typename Rhs>
  auto solve(const Rhs& b) const {
    return llt_.solve(b);
  }

  /// Solve with iterative refinement until ||Ax - b|| <= 1e-12 ||b|| (at most
  /// three correction steps).
  Eigen::VectorXd solve_refined(const Eigen::VectorXd& b) const {
    Eigen::VectorXd x = llt_.solve(b);
    const double target = 1e-12 * b.norm();
    for (int step = 0; step < 3; ++step) {
      const Eigen::VectorXd r = b - (*a_) * x;
      if (r.norm() <= target) break;
      x += llt_.solve(r);
    }
    return x;
  }

private:
  const Eigen::SparseMatrix<double>* a_;
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::AMDOrdering<int>> llt_;
};

inline Eigen::VectorXd solve_spd(const SymSparse& a, const Eigen::VectorXd& rhs) {
  return SpdSolver(a).solve_refined(rhs);
}

/// Normwise backward error regarded as converged regardless of tol.
inline constexpr double kWorkingPrecision = 64 * std::numeric_limits<double>::epsilon();

struct SolverOptions {
  double tol = 1e-10;
  std::uint64_t seed = 20240601;
  int max_sweeps = 500;
  /// Extra block vectors beyond the k requested.
  int guard_vectors = 3;
};

namespace detail {

inline std::vector<double> relative_residuals(const Pencil& p, const Eigen::MatrixXd& x,
                                              const std::vector<double>& lambda, int k) {
  std::vector<double> res(k);
  for (int i = 0; i < k; ++i) {
    const Eigen::VectorXd ax = p.stiffness.full * x.col(i);
    const Eigen::VectorXd bx = p.boundary_mass.full * x.col(i);
    const double denom = ax.norm();
    res[i] = denom > 0 ? (ax - lambda[i] * bx).norm() / denom : 0.0;
  }
  return res;
}

inline double norm1(const Eigen::SparseMatrix<double>& m) {
  double best = 0.0;
  for (Eigen::Index c = 0; c < m.outerSize(); ++c) {
    double s = 0.0;
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, c); it; ++it) s += std::abs(it.value());
    best = std::max(best, s);
  }
  return best;
}

/// B-orthonormal basis of span(Y) restricted to directions with a
/// non-negligible boundary trace.
inline Eigen::MatrixXd b_orthonormalize(const Eigen::MatrixXd& y, const Eigen::SparseMatrix<double>& b) {
  Eigen::MatrixXd gram = y.transpose() * (b * y);
  gram = 0.5 * (gram + gram.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  const auto& ev = es.eigenvalues();
  const double cutoff = 1e-14 * ev.cwiseAbs().maxCoeff();
  std::vector<int> keep;
  for (int i = 0; i < ev.size(); ++i)
    if (ev[i] > cutoff) keep.push_back(i);
  Eigen::MatrixXd q(y.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c)
    q.col(static_cast<Eigen::Index>(c)) = y * es.eigenvectors().col(keep[c]) / std::sqrt(ev[keep[c]]);
  return q;
}

} // namespace detail

/// k smallest finite eigenpairs of A u = lambda B u, with A SPD and B PSD.
///
/// Block inverse iteration on A^{-1} B with Rayleigh-Ritz extraction each
/// sweep. Every iterate lies in A^{-1} range(B), so the kernel of B (the
/// infinite eigenvalues) never enters the block.
inline EigenSolution solve_pencil(const Pencil& p, int k, const SolverOptions& opt = {}) {
  const Eigen::Index n = p.stiffness.dimension();
  if (p.boundary_mass.dimension() != n) throw Error("pencil matrices differ in dimension");
  if (k < 1) throw Error("k must be at least 1");
  if (!(opt.tol > 0.0 && opt.tol <= 1e-6)) throw Error("solver tolerance must lie in (0, 1e-6]");

  const Eigen::SparseMatrix<double>& a = p.stiffness.full;
  const Eigen::SparseMatrix<double>& b = p.boundary_mass.full;

  std::vector<Eigen::Index> support;
  for (Eigen::Index i = 0; i < n; ++i)
    if (b.coeff(i, i) != 0.0) support.push_back(i);
  if (static_cast<Eigen::Index>(support.size()) < k)
    throw Error("k = " + std::to_string(k) + " exceeds the number of boundary degrees of freedom");

  const SpdSolver factor(p.stiffness);
  const double a_norm = detail::norm1(a);
  const double b_norm = detail::norm1(b);
  const int block = static_cast<int>(std::min<Eigen::Index>(k + opt.guard_vectors, support.size()));

  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, block);
  for (int c = 0; c < block; ++c)
    for (Eigen::Index i : support) x(i, c) = normal(rng);

  std::vector<double> residuals(k, 1.0);
  for (int sweep = 1; sweep <= opt.max_sweeps; ++sweep) {
    const Eigen::MatrixXd y = factor.solve(Eigen::MatrixXd(b * x));
    const Eigen::MatrixXd q = detail::b_orthonormalize(y, b);
    if (q.cols() < k) throw Error("iteration block collapsed below k vectors");

    Eigen::MatrixXd reduced = q.transpose() * (a * q);
    reduced = 0.5 * (reduced + reduced.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> rr(reduced);
    x = q * rr.eigenvectors();

    std::vector<double> theta(rr.eigenvalues().data(), rr.eigenvalues().data() + rr.eigenvalues().size());
    residuals = detail::relative_residuals(p, x, theta, k);
    bool converged = true;
    for (int i = 0; i < k; ++i) {
      if (residuals[i] <= opt.tol) continue;
      // ||Au|| shrinks with h while the rounding in u does not, so on fine
      // meshes the relative residual floors above tol. Accept pairs whose
      // normwise backward error is already at working precision.
      const double backward = residuals[i] * (a * x.col(i)).norm() /
                              ((a_norm + std::abs(theta[i]) * b_norm) * x.col(i).norm());
      if (backward > kWorkingPrecision) converged = false;
    }
    if (converged) {
      EigenSolution sol;
      sol.eigenvalues.assign(theta.begin(), theta.begin() + k);
      sol.eigenvectors = x.leftCols(k);
      sol.residual_norms = residuals;
      sol.sweeps = sweep;
      return sol;
    }
  }
  throw ConvergenceFailure("eigensolver did not converge in " + std::to_string(opt.max_sweeps) + " sweeps",
                           residuals);
}

inline constexpr Eigen::Index kDenseOracleMaxDimension = 3000;

/// Dense reference solve: congruence by the Cholesky factor of A, then a full
/// symmetric eigensolve of L^{-1} B L^{-T}. Its eigenvalues are mu = 1/lambda,
/// with mu = 0 for the kernel of B.
inline EigenSolution dense_oracle(const Pencil& p, int k) {
  const Eigen::Index n = p.stiffness.dimension();
  if (n > kDenseOracleMaxDimension)
    throw DimensionTooLarge("dense oracle is limited to dimension " + std::to_string(kDenseOracleMaxDimension));
  const Eigen::MatrixXd a = Eigen::MatrixXd(p.stiffness.full);
  const Eigen::MatrixXd b = Eigen::MatrixXd(p.boundary_mass.full);
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite("dense Cholesky factorization failed");
  const auto l = llt.matrixL();
  Eigen::MatrixXd c = l.solve(b);
  c = l.solve(Eigen::MatrixXd(c.transpose()));
  c = 0.5 * (c + c.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c);

  const auto& mu = es.eigenvalues(); // ascending
  const double cutoff = 1e-13 * mu.cwiseAbs().maxCoeff();
  EigenSolution sol;
  sol.eigenvectors.resize(n, k);
  for (int i = 0; i < k; ++i) {
    const Eigen::Index idx = n - 1 - i;
    if (!(mu[idx] > cutoff)) throw Error("pencil has fewer than k finite eigenvalues");
    sol.eigenvalues.push_back(1.0 / mu[idx]);
    Eigen::VectorXd u = llt.matrixU().solve(es.eigenvectors().col(idx));
    sol.eigenvectors.col(i) = u / std::sqrt(mu[idx]);
  }
  sol.residual_norms = detail::relative_residuals(p, sol.eigenvectors, sol.eigenvalues, k);
  return sol;
}

/// Numerical rank of a symmetric matrix from its dense spectrum.
inline int dense_rank(const SymSparse& m, double rel_tol = 1e-10) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(m.full), Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  const double cutoff = rel_tol * ev.cwiseAbs().maxCoeff();
  return static_cast<int>((ev.array().abs() > cutoff).count());
}

} // namespace steklov
