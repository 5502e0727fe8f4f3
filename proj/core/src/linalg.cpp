#include "mfch/linalg.hpp"

#include <lapacke.h>

#include <Eigen/SparseLU>
#include <cmath>

namespace mfch {

BandedSymmetric::BandedSymmetric(int n, int kd)
    : n_(n), kd_(kd), ab_(static_cast<size_t>(kd + 1) * n, 0.0) {}

double& BandedSymmetric::at(int i, int j) {
  if (j > i) std::swap(i, j);
  return ab_[static_cast<size_t>(j) * (kd_ + 1) + (i - j)];
}

double BandedSymmetric::get(int i, int j) const {
  if (j > i) std::swap(i, j);
  if (i - j > kd_) return 0.0;
  return ab_[static_cast<size_t>(j) * (kd_ + 1) + (i - j)];
}

Eigen::VectorXd BandedSymmetric::apply(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n_);
  for (int j = 0; j < n_; ++j) {
    int imax = std::min(n_ - 1, j + kd_);
    for (int i = j; i <= imax; ++i) {
      double v = ab_[static_cast<size_t>(j) * (kd_ + 1) + (i - j)];
      y[i] += v * x[j];
      if (i != j) y[j] += v * x[i];
    }
  }
  return y;
}

namespace {

std::vector<double> sbevx_values(const BandedSymmetric& A, char range,
                                 double vl, double vu, int il, int iu) {
  int n = A.n();
  std::vector<double> ab = A.raw();  // dsbevx overwrites
  std::vector<double> w(n);
  std::vector<lapack_int> ifail(n);
  lapack_int m = 0;
  lapack_int info = LAPACKE_dsbevx(
      LAPACK_COL_MAJOR, 'N', range, 'L', n, A.kd(), ab.data(), A.kd() + 1,
      nullptr, 1, vl, vu, il, iu, 2 * LAPACKE_dlamch('S'), &m, w.data(),
      nullptr, 1, ifail.data());
  if (info != 0) throw Error("dsbevx failed, info=" + std::to_string(info));
  w.resize(m);
  return w;
}

}  // namespace

std::vector<double> BandedSymmetric::top_eigenvalues(int k) const {
  if (k <= 0) return {};
  k = std::min(k, n_);
  return sbevx_values(*this, 'I', 0, 0, n_ - k + 1, n_);
}

std::vector<double> BandedSymmetric::eigenvalues_above(double cutoff) const {
  // generous upper bound from Gershgorin
  double hi = -1e300;
  for (int j = 0; j < n_; ++j) {
    double c = get(j, j), r = 0;
    for (int d = 1; d <= kd_; ++d) {
      if (j + d < n_) r += std::abs(get(j + d, j));
      if (j - d >= 0) r += std::abs(get(j, j - d));
    }
    hi = std::max(hi, c + r);
  }
  return sbevx_values(*this, 'V', cutoff, hi + 1.0, 0, 0);
}

int BandedSymmetric::count_above(double cutoff) const {
  return static_cast<int>(eigenvalues_above(cutoff).size());
}

Eigen::VectorXd BandedSymmetric::eigenvector(double lambda) const {
  // shifted inverse iteration via a general banded LU
  int n = n_, kd = kd_;
  int ldab = 3 * kd + 1;
  std::vector<double> ab(static_cast<size_t>(ldab) * n, 0.0);
  double shift = lambda + 1e-11 * (1.0 + std::abs(lambda));
  for (int j = 0; j < n; ++j) {
    for (int i = std::max(0, j - kd); i <= std::min(n - 1, j + kd); ++i) {
      ab[static_cast<size_t>(j) * ldab + (2 * kd + i - j)] =
          get(i, j) - (i == j ? shift : 0.0);
    }
  }
  std::vector<lapack_int> ipiv(n);
  lapack_int info = LAPACKE_dgbtrf(LAPACK_COL_MAJOR, n, n, kd, kd, ab.data(),
                                   ldab, ipiv.data());
  if (info < 0) throw Error("dgbtrf failed, info=" + std::to_string(info));
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x[i] = std::sin(0.7 * (i + 1)) + 0.3;
  x.normalize();
  for (int it = 0; it < 4; ++it) {
    info = LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', n, kd, kd, 1, ab.data(), ldab,
                          ipiv.data(), x.data(), n);
    if (info != 0) throw Error("dgbtrs failed, info=" + std::to_string(info));
    x.normalize();
  }
  return x;
}

Mat2 spd_sqrt(const Mat2& M) {
  Eigen::SelfAdjointEigenSolver<Mat2> es(M);
  if (es.eigenvalues().minCoeff() <= 0)
    throw ParameterError("matrix square root requires positive definiteness");
  Vec2 s = es.eigenvalues().cwiseSqrt();
  return es.eigenvectors() * s.asDiagonal() * es.eigenvectors().transpose();
}

std::pair<double, double> smallest_singular_values(
    const Eigen::SparseMatrix<double>& J, int iters) {
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu, luT;
  Eigen::SparseMatrix<double> Jc = J;
  Eigen::SparseMatrix<double> JT = Eigen::SparseMatrix<double>(J.transpose());
  Jc.makeCompressed();
  JT.makeCompressed();
  lu.compute(Jc);
  if (lu.info() != Eigen::Success)
    return {0.0, 0.0};  // exactly singular to working precision
  luT.compute(JT);
  if (luT.info() != Eigen::Success) return {0.0, 0.0};

  int n = J.rows();
  Eigen::MatrixXd V(n, 2);
  for (int i = 0; i < n; ++i) {
    V(i, 0) = std::sin(0.37 * (i + 1)) + 0.11;
    V(i, 1) = std::cos(0.59 * (i + 1)) - 0.07;
  }
  // subspace iteration with (J^T J)^{-1}
  for (int it = 0; it < iters; ++it) {
    Eigen::MatrixXd W(n, 2);
    for (int c = 0; c < 2; ++c) {
      Eigen::VectorXd t = luT.solve(V.col(c));
      W.col(c) = lu.solve(t);
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(W);
    V = qr.householderQ() * Eigen::MatrixXd::Identity(n, 2);
  }
  // Rayleigh quotients of J^T J on the converged subspace
  Eigen::MatrixXd JV(n, 2);
  for (int c = 0; c < 2; ++c) JV.col(c) = Jc * V.col(c);
  Eigen::Matrix2d G = JV.transpose() * JV;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(G);
  double s0 = std::sqrt(std::max(0.0, es.eigenvalues()[0]));
  double s1 = std::sqrt(std::max(0.0, es.eigenvalues()[1]));
  return {s0, s1};
}

}  // namespace mfch
