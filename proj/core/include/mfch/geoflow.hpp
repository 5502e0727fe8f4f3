#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "mfch/geometry.hpp"
#include "mfch/types.hpp"

namespace mfch {

/// Adaptive Dormand-Prince 5(4) with a componentwise floor event.
struct OdeTrace {
  std::vector<double> t;
  std::vector<Eigen::VectorXd> y;
  bool event = false;
  int event_component = -1;
  double event_time = 0;
};

using OdeRhs = std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>;

OdeTrace integrate_dp54(const OdeRhs& f, double t0, double t1,
                        const Eigen::VectorXd& y0, double rtol = 1e-10,
                        double atol = 1e-12, double floor_value = -1e300,
                        int record_every = 1);

/// Radii of m well-separated spheres under the mass-preserving Willmore flow.
struct RadialSystem {
  std::vector<double> radii;
  int d = 3;
  double a0 = 1;
  double M1 = 1.2, M2 = 6.0;

  double conserved() const;  // sum R^{d-1}
  double Rbar() const;
  Eigen::VectorXd rhs(const Eigen::VectorXd& R) const;
};

struct RadialEvent {
  double tau;
  int sphere;     // index at the time of extinction (into the then-current list)
  double survivor_sum;  // conserved quantity after removal
};

struct RadialTrajectory {
  std::vector<double> tau;
  std::vector<std::vector<double>> radii;  // per record, surviving spheres
  std::vector<RadialEvent> events;
  double conserved_drift = 0;
};

/// Integrate with extinction events: a sphere reaching the floor radius is
/// removed and integration continues (coarsening).
RadialTrajectory radial_willmore(const RadialSystem& sys, double tau_end,
                                 double floor_rel = 1e-4, double rtol = 1e-11);

/// Stability indicator K = (d-1)(3-d)/Rbar + (d-2) a0 of the equi-radius
/// equilibrium.
struct StabilityVerdict {
  double K = 0;
  enum class Kind { Stable, Unstable, Neutral } verdict;
  std::string name() const;
};
StabilityVerdict stability_K(double Rbar, double a0, int d);

/// Quenched curvature-flow stage: radii plus the background vector B1,
/// with E = B1 . M decaying by interfacial growth.
struct Tau1State {
  std::vector<double> radii;
  int d = 2;
  Vec2 B1 = Vec2::Zero();
  Vec2 M = Vec2(6, 0);
  double M2 = 6.0;
  Mat2 hessW0 = Mat2::Identity();
  double omega = 4 * kPi * kPi;  // |Omega|

  double gamma0() const;                 // total interface area
  Vec2 mass_constant() const;            // M1 relation (e:M1)
  double E() const { return B1.dot(M); }
};

struct Tau1Trajectory {
  std::vector<double> tau;
  std::vector<double> E;
  std::vector<Vec2> B1;
  std::vector<std::vector<double>> radii;
  double mass_drift = 0;  // max |M1(t) - M1(0)| over the run
  bool extinct = false;
};

Tau1Trajectory tau1_flow(const Tau1State& init, double tau_end,
                         double rtol = 1e-11);

/// Curvature-weighted zero-mean projection of the Willmore force.
Eigen::VectorXd pi_gamma(const Eigen::VectorXd& f, const Eigen::VectorXd& H0);

struct CurveFlowResult {
  InterfaceGeometry geom;
  std::vector<double> tau;
  std::vector<double> length;
  std::vector<Eigen::Matrix<double, Eigen::Dynamic, 2>> snapshots;
  bool breakdown = false;
  double max_area_drift = 0;  // per-step |Gamma| drift before enforcement
  double max_projection_residual = 0;  // |int V H0 ds| over the run
};

/// Mass-preserving Willmore flow of a closed planar curve:
/// V = (M1/M2) Pi_Gamma[(Lap_s - H0(H0-a0)/2 - H1)(H0 - a0)], H1 = -H0^2.
/// dt is clamped to the explicit fourth-order stability bound.
CurveFlowResult curve_willmore(const InterfaceGeometry& geom, double a0,
                               double M1, double M2, double tau_end, double dt,
                               int snapshot_every = 0);

}  // namespace mfch
