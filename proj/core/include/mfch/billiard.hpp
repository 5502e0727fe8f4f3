#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mfch/potentials.hpp"
#include "mfch/types.hpp"

namespace mfch {

/// Specular reflection of v off the wall with unit normal n.
/// Throws DegenerateCollisionError for tangential incidence.
Vec2 reflect(const Vec2& v_minus, const Vec2& n);

/// One collision of a billiard-limit trajectory with the collision curve.
struct CollisionEvent {
  double z = 0;      // collision time (z_1 = 0 by convention)
  Vec2 point;        // c_i
  Vec2 normal;       // unit normal of the curve at c_i
  Vec2 v_minus;      // incoming velocity
  Vec2 v_plus;       // outgoing velocity
  double Z = 0;      // v_i . grad rho(c_i), v_i = (v_plus - v_minus)/2
  Vec2 grad_rho;     // unnormalized level-set gradient at c_i
};

/// Piecewise trajectory of an n-collision homoclinic in the billiard limit.
struct BilliardHomoclinic {
  struct Segment {
    enum class Kind { RadialArc, Straight };
    Kind kind;
    Vec2 p0, p1;
    double z0, z1;
  };

  std::vector<Segment> segments;
  std::vector<CollisionEvent> collisions;
  double entry_angle = 0;  // exit ray angle at the origin (unstable side)
  double exit_angle = 0;   // return ray angle at the origin (stable side)
  double quad_clip_radius = 1e-8;

  int n_collisions() const { return static_cast<int>(collisions.size()); }

  /// Trajectory point at time z (the exponential quadrant tails are
  /// attached analytically below the clip radius).
  Vec2 at(double z, const BilliardSpec& spec) const;

  /// Hamiltonian defect |v|^2/2 - B(u) sampled along the orbit.
  double energy_defect(const BilliardSpec& spec, int samples = 200) const;
};

/// Outcome of tracing a single exit ray.
struct TraceResult {
  bool homoclinic = false;
  std::optional<BilliardHomoclinic> orbit;
  int collision_count = 0;
  double miss_distance = 0;  // closest approach of the final ray to 0
  std::string reason;
};

/// Trace the billiard-limit trajectory leaving the origin at `exit_angle`.
/// Speeds are fixed by the zero-energy condition H = 0.
TraceResult trace_homoclinic(const BilliardSpec& spec, double exit_angle,
                             int max_collisions = 8, double return_tol = 1e-9);

/// Construct a billiard spec whose unique homoclinic trajectory is the
/// triangle (origin, c1, c2): two circular arcs through c1 and c2 with
/// normals prescribed by the reflection law, blended into one smooth
/// level set.  The construction is verified by re-tracing.
BilliardSpec raytrace_collision_curve(const Vec2& c1, const Vec2& c2,
                                      double arc_halfwidth = 0.0);

/// Numerical transversality proxy: perturb the exit angle and fit the
/// scaling of the return-ray miss distance.
struct TransversalityReport {
  std::vector<double> etas;
  std::vector<double> misses;
  double fitted_exponent = 0;
  enum class Verdict { Transversal, DegenerateFamily, NonHomoclinic } verdict;
  std::string describe() const;
};

TransversalityReport verify_transversality_proxy(const BilliardHomoclinic& h,
                                                 const BilliardSpec& spec,
                                                 int perturbation_count = 2);

/// Serialize trajectory samples (z, u1, u2, v1, v2, segment_id) and the
/// collision table to CSV files.
void write_homoclinic_csv(const BilliardHomoclinic& h, const BilliardSpec& spec,
                          const std::string& traj_path,
                          const std::string& collision_path, int samples = 2000);

}  // namespace mfch
