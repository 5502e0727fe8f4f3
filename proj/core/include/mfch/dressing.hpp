#pragma once

#include "mfch/field.hpp"
#include "mfch/geometry.hpp"
#include "mfch/homoclinic.hpp"
#include "mfch/potentials.hpp"

namespace mfch {

/// Smooth cutoff of the quasi-bilayer dressing: 1 for |r| <= 1, 0 for
/// |r| >= 3, quintic in between.
double dressing_cutoff(double r);

/// Dress the interface with the profile along the scaled signed distance:
///   u = Phi(z)                      for |eps z| <= l0,
///   u = (1-chi) Phi_inf + chi Phi   for l0 < |eps z| < 3 l0,
///   u = Phi_inf                     beyond.
/// z is positive outside the interface.
FieldState dress(const InterfaceGeometry& geom, const HomoclinicProfile& profile,
                 const ModelParams& params, int nx, int ny);

/// Full mFCH free energy of the field by spectral differentiation and
/// cell-sum quadrature.
double energy_full(const FieldState& state, const Potential& pot,
                   const Solenoidal& V);

/// Sharp-interface reduction eps^3 (M1/2) int [(H0 - a0)^2 - (eta1+eta2)] ds.
double energy_sharp(const InterfaceGeometry& geom, double a0, double M1,
                    const ModelParams& params);

/// Same quadrature from explicit curvature samples (uniform ds weights).
double energy_sharp_from_curvature(const Eigen::VectorXd& H0, double area,
                                   double a0, double M1,
                                   const ModelParams& params);

/// eps-scaled total mass of the field.
Vec2 mass_full(const FieldState& state);

/// Leading + first-order sharp-interface mass:
/// |Gamma| M + eps [ |Omega| B + |Gamma| int phi1 + (int H0 ds)(int z phi dz) ].
Vec2 mass_sharp(const InterfaceGeometry& geom, const HomoclinicProfile& profile,
                const CorrectorPair& corr, const ModelParams& params);

/// int H0 ds over the interface.
double total_curvature(const InterfaceGeometry& geom);

}  // namespace mfch
