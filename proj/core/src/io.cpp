#include "mfch/io.hpp"

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace mfch {

void write_radial_csv(const RadialTrajectory& tr, const std::string& path) {
  std::ofstream f(path);
  f.precision(17);
  size_t m = 0;
  for (const auto& r : tr.radii) m = std::max(m, r.size());
  f << "tau";
  for (size_t i = 0; i < m; ++i) f << ",R" << (i + 1);
  f << "\n";
  for (size_t k = 0; k < tr.tau.size(); ++k) {
    f << tr.tau[k];
    for (size_t i = 0; i < m; ++i) {
      f << ',';
      if (i < tr.radii[k].size()) f << tr.radii[k][i];
    }
    f << '\n';
  }
}

void write_tau1_csv(const Tau1Trajectory& tr, const std::string& path) {
  std::ofstream f(path);
  f.precision(17);
  size_t m = tr.radii.empty() ? 0 : tr.radii[0].size();
  f << "tau,E,B1_1,B1_2";
  for (size_t i = 0; i < m; ++i) f << ",R" << (i + 1);
  f << "\n";
  for (size_t k = 0; k < tr.tau.size(); ++k) {
    f << tr.tau[k] << ',' << tr.E[k] << ',' << tr.B1[k][0] << ','
      << tr.B1[k][1];
    for (size_t i = 0; i < m; ++i) f << ',' << tr.radii[k][i];
    f << '\n';
  }
}

void write_curve_csv(const CurveFlowResult& res, const std::string& path) {
  std::ofstream f(path);
  f.precision(17);
  f << "tau,length\n";
  for (size_t k = 0; k < res.tau.size(); ++k)
    f << res.tau[k] << ',' << res.length[k] << '\n';
}

std::string fnv1a_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  uint64_t h = 1469598103934665603ull;
  char buf[4096];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ull;
    }
    if (!in) break;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

}  // namespace mfch
