#pragma once

#include <string>

#include "mfch/geoflow.hpp"

namespace mfch {

void write_radial_csv(const RadialTrajectory& tr, const std::string& path);
void write_tau1_csv(const Tau1Trajectory& tr, const std::string& path);
void write_curve_csv(const CurveFlowResult& res, const std::string& path);

/// FNV-1a 64-bit content hash as a hex string.
std::string fnv1a_file(const std::string& path);

}  // namespace mfch
