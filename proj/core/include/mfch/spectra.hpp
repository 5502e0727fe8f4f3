#pragma once

#include <string>
#include <vector>

#include "mfch/billiard.hpp"
#include "mfch/homoclinic.hpp"
#include "mfch/linalg.hpp"
#include "mfch/potentials.hpp"

namespace mfch {

/// Second-order symmetric discretization of L = d^2/dz^2 - hess pot(psi(z))
/// on the profile grid, with the solver's boundary projections folded in
/// symmetrically.  Interleaved node-major layout, bandwidth 2.
BandedSymmetric assemble_linearization(const HomoclinicProfile& profile,
                                       const Potential& pot);

struct EigenPair {
  double lambda;
  Eigen::VectorXd vec;  // interleaved (u1, u2) per node
};

/// k largest eigenpairs; eigenvalues via banded bisection, vectors via
/// shifted inverse iteration.
std::vector<EigenPair> eigen_top(const BandedSymmetric& A, int k);

/// Rescaled operator of one collision in the delta -> 0 limit,
///   d^2/dzt^2 - (b+ + b-) h'(n(zt)) grad_rho(c) grad_rho(c)^T,
/// where n(zt) is the rescaled collision-layer trajectory solving
/// n'' = (b+ + b-) |grad_rho|^2 h(n) with incoming normal speed Z.  (The
/// linearized coordinate n ~ Z|zt| is kept as a reference; the layer
/// trajectory is what the collision eigenvalues actually converge to.)
struct LimitCollisionOperator {
  double Z = 0;
  double b_sum = 0.5;
  Vec2 grad_rho = Vec2::UnitX();
  Mollifier mol = Mollifier::polynomial();
  double T = 0;    // half-length of the truncated domain (default 10/|Z|)
  int nodes = 4001;

  static LimitCollisionOperator from_event(const CollisionEvent& ev,
                                           const BilliardSpec& spec,
                                           const Mollifier& m);

  /// Unique positive eigenvalue of the scalar operator acting on the
  /// normal component.
  double nu_scalar() const;

  /// Same eigenvalue from the full two-component operator.
  double nu_2d() const;

  /// Eigenvalue of the operator with the linearized coordinate h'(Z|zt|).
  double nu_linearized() const;

  /// Interior sign changes of the ground-state eigenvector (Sturm check).
  int ground_state_sign_changes() const;
};

struct CollisionInterval {
  double z_lo = 0, z_hi = 0;
  double z_collision = 0;
};

struct CollisionEigen {
  double lambda = 0;
  int interval = -1;           // paired collision interval
  double localization = 0;     // fraction of mass on K_j + delta collar
};

/// Spectral analysis of the linearization about a regularized-billiard
/// homoclinic.
struct SpectralReport {
  double delta = 0;
  double cutoff_c = 0;             // the c in "count eigenvalues above c/delta^2"
  double cutoff = 0;               // c / delta^2
  int expected_collisions = 0;
  std::vector<CollisionInterval> intervals;
  std::vector<CollisionEigen> collision_eigs;
  std::vector<double> nu_refs;
  std::vector<double> nu_linearized_refs;
  std::vector<double> eigenvalues_above_cutoff;
  double kernel_residual = 0;      // |L dz psi| / |dz psi|
  double ess_edge = 0;             // upper edge of the essential spectrum
  bool theorem_count_ok = false;   // #eigs above cutoff == n
  std::string mollifier_tag;
  std::string method = "banded-bisection+inverse-iteration";
};

/// Collision intervals, limit-operator references, eigenvalue counts and
/// localization fractions for the given profile.  cutoff_c <= 0 selects the
/// default 0.25 * min nu_i.
SpectralReport collision_analysis(const HomoclinicProfile& profile,
                                  const RegularizedBilliard& pot,
                                  const BilliardHomoclinic& orbit,
                                  double cutoff_c = 0);

/// Resonant Laplace-Beltrami modes for the pearling condition
/// lambda_j + eps^2 beta_k ~ 0.
struct PearlingMode {
  double lambda = 0;
  double k_star = 0;           // real resonance index
  std::vector<int> flagged;    // integers with |lambda + eps^2 beta_k| <= tol sqrt(eps)
};

struct PearlingGeometry {
  enum class Kind { Circle, FlatTorus } kind = Kind::Circle;
  double scale = 1.0;  // radius R or period length
  double beta(int k) const;
};

std::vector<PearlingMode> pearling_predictor(const std::vector<double>& lambdas,
                                             double epsilon,
                                             const PearlingGeometry& geom,
                                             double tol = 1.0);

void write_spectral_report(const SpectralReport& rep, const std::string& json_path);

}  // namespace mfch
