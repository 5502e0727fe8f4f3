#include "mfch/fft.hpp"

#include <fftw3.h>

#include <cstring>

namespace mfch {

SpectralGrid::SpectralGrid(int nx, int ny, double Lx, double Ly)
    : nx_(nx), ny_(ny), Lx_(Lx), Ly_(Ly) {
  real_buf_.resize(static_cast<size_t>(nx_) * ny_);
  cplx_buf_.resize(spectral_size());
  // row-major field u[iy*nx+ix]: FFTW dims (ny, nx), last dim halved
  plan_fwd_ = fftw_plan_dft_r2c_2d(
      ny_, nx_, real_buf_.data(),
      reinterpret_cast<fftw_complex*>(cplx_buf_.data()), FFTW_ESTIMATE);
  plan_inv_ = fftw_plan_dft_c2r_2d(
      ny_, nx_, reinterpret_cast<fftw_complex*>(cplx_buf_.data()),
      real_buf_.data(), FFTW_ESTIMATE);
}

SpectralGrid::~SpectralGrid() {
  fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_inv_));
}

void SpectralGrid::forward(const std::vector<double>& in,
                           std::vector<std::complex<double>>& out) const {
  real_buf_ = in;
  fftw_execute_dft_r2c(static_cast<fftw_plan>(plan_fwd_), real_buf_.data(),
                       reinterpret_cast<fftw_complex*>(cplx_buf_.data()));
  out = cplx_buf_;
}

void SpectralGrid::inverse(const std::vector<std::complex<double>>& in,
                           std::vector<double>& out) const {
  cplx_buf_ = in;
  fftw_execute_dft_c2r(static_cast<fftw_plan>(plan_inv_),
                       reinterpret_cast<fftw_complex*>(cplx_buf_.data()),
                       real_buf_.data());
  out.resize(real_buf_.size());
  double norm = 1.0 / (static_cast<double>(nx_) * ny_);
  for (size_t i = 0; i < out.size(); ++i) out[i] = real_buf_[i] * norm;
}

void SpectralGrid::laplacian(const std::vector<double>& in,
                             std::vector<double>& out) const {
  std::vector<std::complex<double>> hat;
  forward(in, hat);
  for (int iy = 0; iy < ny_; ++iy)
    for (int ikx = 0; ikx < nkx(); ++ikx)
      hat[static_cast<size_t>(iy) * nkx() + ikx] *= -k2(ikx, iy);
  inverse(hat, out);
}

void SpectralGrid::gradient(const std::vector<double>& in,
                            std::vector<double>& outx,
                            std::vector<double>& outy) const {
  std::vector<std::complex<double>> hat, gx(spectral_size()), gy(spectral_size());
  forward(in, hat);
  const std::complex<double> I(0, 1);
  for (int iy = 0; iy < ny_; ++iy) {
    for (int ikx = 0; ikx < nkx(); ++ikx) {
      size_t idx = static_cast<size_t>(iy) * nkx() + ikx;
      gx[idx] = I * kx(ikx) * hat[idx];
      gy[idx] = I * ky(iy) * hat[idx];
    }
  }
  // Nyquist rows carry no usable sign information for odd derivatives
  if (nx_ % 2 == 0)
    for (int iy = 0; iy < ny_; ++iy)
      gx[static_cast<size_t>(iy) * nkx() + nx_ / 2] = 0;
  if (ny_ % 2 == 0)
    for (int ikx = 0; ikx < nkx(); ++ikx)
      gy[static_cast<size_t>(ny_ / 2) * nkx() + ikx] = 0;
  inverse(gx, outx);
  inverse(gy, outy);
}

void SpectralGrid::dealias(std::vector<std::complex<double>>& hat) const {
  int cx = nx_ / 3;  // keep |k index| <= n/3
  int cy = ny_ / 3;
  for (int iy = 0; iy < ny_; ++iy) {
    int kyi = iy <= ny_ / 2 ? iy : ny_ - iy;
    for (int ikx = 0; ikx < nkx(); ++ikx) {
      if (ikx > cx || kyi > cy) hat[static_cast<size_t>(iy) * nkx() + ikx] = 0;
    }
  }
}

}  // namespace mfch
