#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <vector>

#include "mfch/types.hpp"

namespace mfch {

/// Symmetric banded matrix in LAPACK lower-band column-major storage.
class BandedSymmetric {
 public:
  BandedSymmetric(int n, int kd);

  int n() const { return n_; }
  int kd() const { return kd_; }

  double& at(int i, int j);        // requires j <= i <= j + kd
  double get(int i, int j) const;  // 0 outside the band
  void add(int i, int j, double v) { at(i, j) += v; }

  /// Largest k eigenvalues in ascending order (and vectors if requested).
  std::vector<double> top_eigenvalues(int k) const;

  /// All eigenvalues strictly above `cutoff`, ascending.
  std::vector<double> eigenvalues_above(double cutoff) const;

  int count_above(double cutoff) const;

  /// Eigenvector for an isolated eigenvalue via shifted inverse iteration.
  Eigen::VectorXd eigenvector(double lambda) const;

  /// y = A x.
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;

  const std::vector<double>& raw() const { return ab_; }

 private:
  int n_, kd_;
  std::vector<double> ab_;  // (kd+1) x n, column-major
};

/// Principal square root of a symmetric positive definite 2x2 matrix.
Mat2 spd_sqrt(const Mat2& M);

/// Two smallest singular values of a square sparse matrix, via inverse
/// power iteration on the normal equations.  Used as a kernel-dimension
/// diagnostic for phase-conditioned Jacobians.
std::pair<double, double> smallest_singular_values(
    const Eigen::SparseMatrix<double>& J, int iters = 60);

}  // namespace mfch
