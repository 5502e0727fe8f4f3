#include "mfch/field.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace mfch {

bool FieldState::finite() const {
  for (double v : u1)
    if (!std::isfinite(v)) return false;
  for (double v : u2)
    if (!std::isfinite(v)) return false;
  return true;
}

double FieldState::max_abs() const {
  double m = 0;
  for (double v : u1) m = std::max(m, std::abs(v));
  for (double v : u2) m = std::max(m, std::abs(v));
  return m;
}

Vec2 FieldState::mass() const {
  double s1 = 0, s2 = 0;
  for (double v : u1) s1 += v;
  for (double v : u2) s2 += v;
  double w = cell_area() / params.epsilon;
  return Vec2(s1 * w, s2 * w);
}

namespace {

void put_u32(std::ofstream& f, uint32_t v) {
  f.write(reinterpret_cast<const char*>(&v), 4);
}
void put_f64(std::ofstream& f, double v) {
  f.write(reinterpret_cast<const char*>(&v), 8);
}
uint32_t get_u32(std::ifstream& f) {
  uint32_t v;
  f.read(reinterpret_cast<char*>(&v), 4);
  return v;
}
double get_f64(std::ifstream& f) {
  double v;
  f.read(reinterpret_cast<char*>(&v), 8);
  return v;
}

bool little_endian() {
  uint32_t x = 1;
  return *reinterpret_cast<unsigned char*>(&x) == 1;
}

}  // namespace

void write_mfch(const FieldState& f, const std::string& path) {
  if (!little_endian()) throw Error("MFCH writer requires a little-endian host");
  std::ofstream o(path, std::ios::binary);
  if (!o) throw Error("cannot open " + path);
  o.write("MFCH", 4);
  put_u32(o, 1);
  put_u32(o, 2);
  put_u32(o, static_cast<uint32_t>(f.nx));
  put_u32(o, static_cast<uint32_t>(f.ny));
  put_f64(o, f.Lx);
  put_f64(o, f.Ly);
  o.write(reinterpret_cast<const char*>(f.u1.data()), 8 * f.u1.size());
  o.write(reinterpret_cast<const char*>(f.u2.data()), 8 * f.u2.size());
}

FieldState read_mfch(const std::string& path) {
  if (!little_endian()) throw Error("MFCH reader requires a little-endian host");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (std::strncmp(magic, "MFCH", 4) != 0) throw Error("bad magic in " + path);
  uint32_t version = get_u32(in);
  if (version != 1) throw Error("unsupported MFCH version");
  uint32_t N = get_u32(in);
  if (N != 2) throw Error("only N = 2 fields are supported");
  FieldState f;
  uint32_t nx = get_u32(in), ny = get_u32(in);
  f.Lx = get_f64(in);
  f.Ly = get_f64(in);
  f.resize(static_cast<int>(nx), static_cast<int>(ny));
  in.read(reinterpret_cast<char*>(f.u1.data()), 8 * f.u1.size());
  in.read(reinterpret_cast<char*>(f.u2.data()), 8 * f.u2.size());
  if (!in) throw Error("truncated MFCH file " + path);
  return f;
}

void write_pgm(const FieldState& f, int component, const std::string& path) {
  const auto& u = component == 0 ? f.u1 : f.u2;
  double lo = *std::min_element(u.begin(), u.end());
  double hi = *std::max_element(u.begin(), u.end());
  double span = hi - lo > 1e-300 ? hi - lo : 1.0;
  std::ofstream o(path, std::ios::binary);
  o << "P5\n# min " << lo << " max " << hi << "\n"
    << f.nx << " " << f.ny << "\n255\n";
  std::vector<unsigned char> row(f.nx);
  for (int iy = 0; iy < f.ny; ++iy) {
    for (int ix = 0; ix < f.nx; ++ix) {
      double v = (u[static_cast<size_t>(iy) * f.nx + ix] - lo) / span;
      row[ix] = static_cast<unsigned char>(std::lround(255 * v));
    }
    o.write(reinterpret_cast<const char*>(row.data()), f.nx);
  }
}

}  // namespace mfch
