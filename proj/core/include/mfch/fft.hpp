#pragma once

#include <complex>
#include <vector>

#include "mfch/field.hpp"

namespace mfch {

/// Persistent FFTW r2c/c2r plans and spectral helpers for one grid size.
/// Transforms are unnormalized forward; inverse() divides by nx*ny.
class SpectralGrid {
 public:
  SpectralGrid(int nx, int ny, double Lx, double Ly);
  ~SpectralGrid();
  SpectralGrid(const SpectralGrid&) = delete;
  SpectralGrid& operator=(const SpectralGrid&) = delete;

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int nkx() const { return nx_ / 2 + 1; }
  size_t spectral_size() const { return static_cast<size_t>(nkx()) * ny_; }

  /// wavenumbers of spectral index (ikx, iky)
  double kx(int ikx) const { return 2 * kPi * ikx / Lx_; }
  double ky(int iky) const {
    int k = iky <= ny_ / 2 ? iky : iky - ny_;
    return 2 * kPi * k / Ly_;
  }
  double k2(int ikx, int iky) const {
    double a = kx(ikx), b = ky(iky);
    return a * a + b * b;
  }

  void forward(const std::vector<double>& in,
               std::vector<std::complex<double>>& out) const;
  void inverse(const std::vector<std::complex<double>>& in,
               std::vector<double>& out) const;

  /// out = Laplacian(in) via the spectral symbol -|k|^2.
  void laplacian(const std::vector<double>& in, std::vector<double>& out) const;

  /// Gradient components via i k.
  void gradient(const std::vector<double>& in, std::vector<double>& outx,
                std::vector<double>& outy) const;

  /// Zero all modes with |kx| > (2/3) kx_max or |ky| > (2/3) ky_max.
  void dealias(std::vector<std::complex<double>>& hat) const;

 private:
  int nx_, ny_;
  double Lx_, Ly_;
  void* plan_fwd_ = nullptr;
  void* plan_inv_ = nullptr;
  mutable std::vector<double> real_buf_;
  mutable std::vector<std::complex<double>> cplx_buf_;
};

}  // namespace mfch
