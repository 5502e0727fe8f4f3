#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "mfch/billiard.hpp"
#include "mfch/potentials.hpp"
#include "mfch/types.hpp"

namespace mfch {

/// Uniform collocation grid on [-L, L].
struct Grid1D {
  double L = 16;
  int nodes = 8001;
  double h() const { return 2 * L / (nodes - 1); }
  double z(int i) const { return -L + i * h(); }
};

/// Default truncation half-length 20 / sqrt(lambda_min(hess W(0))).
double default_halflength(const Potential& pot);

using ProfileData = Eigen::Matrix<double, Eigen::Dynamic, 2>;

/// Gridded orbit homoclinic to the far-field equilibrium.
struct HomoclinicProfile {
  Grid1D grid;
  ProfileData u;   // nodes x 2
  ProfileData du;  // fourth-order centered derivative
  Vec2 far_field = Vec2::Zero();
  double melnikov_a = 0;
  double epsilon = 0;
  double delta = 0;  // smoothing width when billiard-based, else 0
  std::vector<double> collision_times;
  Vec2 M = Vec2::Zero();  // integral of u
  double M1 = 0;          // integral of |u'|^2
  double M2 = 0;          // integral of |u|^2
  Vec2 zM = Vec2::Zero(); // integral of z u(z) dz
  double residual_norm = 0;  // max |collocation residual| at convergence
  double defect2 = 0;  // second-order-stencil defect of the stored profile
  double sv_small[2] = {0, 0};  // two smallest singular values (diagnostic)
  bool degenerate_family = false;
  std::string potential_tag, mollifier_tag;

  Vec2 sample(double z) const;  // cubic interpolation, clamped tails
};

struct SolveOptions {
  double tol = 1e-10;
  int max_iter = 40;
  bool pin_rotation = false;  // second border removing an exact rotation kernel
  bool kernel_diagnostic = true;
  double nontrivial_floor = 1e-6;
};

/// Newton collocation for the leading-order profile: u'' = grad W(u) with
/// projection boundary conditions and an integral phase condition against
/// the guess.  The stencil is the compact Numerov weighting of the
/// second-order central scheme.
HomoclinicProfile solve_homoclinic(const Potential& pot, const Grid1D& grid,
                                   const ProfileData& guess,
                                   const SolveOptions& opts = {});

/// Melnikov coefficient a0 = -M1^{-1} int V(phi) . phi' dz.  The quadrature
/// uses trapezoid weights with centered differences, which reproduces the
/// polygon shoelace area identically for linear V.
double melnikov_a0(const HomoclinicProfile& profile, const Solenoidal& V);

/// Continue the profile to epsilon > 0 solving the whisker ODE
/// u'' + eps a u' - grad W(u) + eps V(u) = eps^2 E for (u, a), with the
/// far field shifted to the continued equilibrium.  Steps halve on Newton
/// divergence.
HomoclinicProfile continue_epsilon(const Potential& pot,
                                   const HomoclinicProfile& profile0,
                                   const Solenoidal& V, const Vec2& m,
                                   double epsilon,
                                   const SolveOptions& opts = {});

/// Far-field equilibrium of the whisker ODE at given epsilon.
Vec2 whisker_equilibrium(const Potential& pot, const Solenoidal& V,
                         const Vec2& m, double epsilon);

/// First-order correctors about an eps = 0 profile.
struct CorrectorPair {
  ProfileData zeta;  // L0 zeta = (eta2 - eta1) grad W(phi) + m, orthogonal
  Vec2 E = Vec2::Zero();   // far field -hessW(0)^{-1} m
  ProfileData phi1;        // -L0_perp^{-1} (V(phi) + a0 phi')
  Vec2 B = Vec2::Zero();   // hessW(0)^{-2} m
  Vec2 int_phi1 = Vec2::Zero();
  Vec2 int_z_phi = Vec2::Zero();
};

CorrectorPair correctors(const Potential& pot, const HomoclinicProfile& phi,
                         const Solenoidal& V, const Vec2& m, double eta1,
                         double eta2);

/// Mollified billiard-limit orbit sampled on the grid; the corner at each
/// collision is smeared over width max(delta, 4h).
ProfileData billiard_limit_guess(const BilliardSpec& spec,
                                 const BilliardHomoclinic& orbit,
                                 const Grid1D& grid, double delta);

/// Solve the regularized-billiard homoclinic by delta-continuation from
/// 0.4 delta0 down to the target width.
HomoclinicProfile solve_billiard_homoclinic(const BilliardSpec& spec,
                                            double delta,
                                            const BilliardHomoclinic& orbit,
                                            const Grid1D& grid,
                                            const Mollifier& mol,
                                            double tol = 1e-10);

/// Sweep the universal-billiard family over exit angles; returns converged
/// profiles along with the kernel diagnostic (two smallest singular values
/// of the single-bordered Jacobian).
struct FamilyMember {
  double theta;
  bool converged;
  double sv0, sv1;
  double collision_time;
};
std::vector<FamilyMember> family_sweep(const BilliardSpec& spec, double delta,
                                       double theta_min, double theta_max,
                                       int count, const Grid1D& grid,
                                       const Mollifier& mol);

/// Recompute moments, derivative, collision times and residual in place.
void finalize_profile(HomoclinicProfile& p, const Potential& pot,
                      double band_delta);

/// CSV (z, u1, u2, du1, du2) plus a JSON sidecar with moments and solver
/// metadata.
void write_profile(const HomoclinicProfile& p, const std::string& csv_path,
                   const std::string& json_path);

}  // namespace mfch
