#pragma once

#include <string>
#include <vector>

#include "mfch/types.hpp"

namespace mfch {

/// Periodic 2-component field on a uniform 2-D grid over [0,Lx) x [0,Ly).
struct FieldState {
  int nx = 0, ny = 0;
  double Lx = 2 * kPi, Ly = 2 * kPi;
  ModelParams params;
  double time = 0;
  std::vector<double> u1, u2;  // row-major, index iy * nx + ix

  void resize(int nx_, int ny_) {
    nx = nx_;
    ny = ny_;
    u1.assign(static_cast<size_t>(nx) * ny, 0.0);
    u2.assign(static_cast<size_t>(nx) * ny, 0.0);
  }
  size_t cells() const { return static_cast<size_t>(nx) * ny; }
  double dx() const { return Lx / nx; }
  double dy() const { return Ly / ny; }
  double cell_area() const { return dx() * dy(); }
  double x(int ix) const { return ix * dx(); }
  double y(int iy) const { return iy * dy(); }

  bool finite() const;
  double max_abs() const;
  /// epsilon-scaled mass vector (1/eps) int u dx.
  Vec2 mass() const;
};

/// Raw binary format: magic "MFCH", u32 version, u32 N, u32 dims[2],
/// f64 domain lengths, then row-major little-endian f64 per component.
void write_mfch(const FieldState& f, const std::string& path);
FieldState read_mfch(const std::string& path);

/// 8-bit PGM snapshot of one component, min-max scaled.
void write_pgm(const FieldState& f, int component, const std::string& path);

}  // namespace mfch
