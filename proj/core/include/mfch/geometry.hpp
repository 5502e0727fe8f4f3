#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "mfch/types.hpp"

namespace mfch {

/// Admissible co-dimension one interface: a closed planar curve, a circle
/// (closed form), or a family of well-separated spheres in d = 3.
struct InterfaceGeometry {
  enum class Kind { Circle, Curve, SphereFamily };
  Kind kind = Kind::Circle;

  Vec2 center = Vec2::Zero();
  double radius = 1;

  // closed polyline, uniform arclength after reparametrization
  Eigen::Matrix<double, Eigen::Dynamic, 2> nodes;

  std::vector<double> radii;  // sphere family
  int dim = 2;

  double l0 = 0.4;  // reach

  int node_count() const { return static_cast<int>(nodes.rows()); }

  /// |Gamma|: curve length (d = 2) or total sphere area (d = 3).
  double total_area() const;

  /// Position, outward normal and curvature at node i (curves).
  void frame(int i, Vec2& x, Vec2& n, double& k) const;

  /// Curvatures at all nodes via a periodic cubic spline.
  Eigen::VectorXd curvatures() const;

  /// Signed distance of p to the interface, positive outside.
  double signed_distance(const Vec2& p) const;
};

InterfaceGeometry make_circle(const Vec2& center, double R, int n_nodes,
                              double l0);
InterfaceGeometry make_ellipse(const Vec2& center, double a, double b,
                               int n_nodes, double l0);
/// Peanut-shaped curve r(t) = r0 + r1 cos 2t with a thin neck; the standard
/// inadmissibility example.
InterfaceGeometry make_dumbbell(const Vec2& center, double r0, double r1,
                                int n_nodes, double l0);
InterfaceGeometry make_spheres(const std::vector<double>& radii, double l0);
InterfaceGeometry make_curve(const Eigen::Matrix<double, Eigen::Dynamic, 2>& pts,
                             double l0);

struct AdmissibilityReport {
  bool pass = false;
  double curvature_bound = 0;  // max|k| * 3 l0, must be < 1
  std::vector<std::pair<int, int>> intersecting_whiskers;
  std::string reason;
};

/// Whisker disjointness for length 3 l0 plus the curvature bound
/// max|k| 3 l0 < 1.
AdmissibilityReport check_admissible(const InterfaceGeometry& geom,
                                     double epsilon, double l0);

/// Resample a closed polyline to uniform arclength with the same node count.
void reparametrize_uniform(Eigen::Matrix<double, Eigen::Dynamic, 2>& pts);

/// Periodic cubic-spline second derivatives of a cyclic sequence.
Eigen::VectorXd cyclic_spline_second_derivative(const Eigen::VectorXd& y,
                                                double h);

}  // namespace mfch
