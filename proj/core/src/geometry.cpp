#include "mfch/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace mfch {

namespace {

double sphere_area(double R, int d) {
  return d == 3 ? 4 * kPi * R * R : 2 * kPi * R;
}

// segment-segment intersection test
bool segments_intersect(const Vec2& a0, const Vec2& a1, const Vec2& b0,
                        const Vec2& b1) {
  auto cross = [](const Vec2& p, const Vec2& q) {
    return p[0] * q[1] - p[1] * q[0];
  };
  Vec2 r = a1 - a0, s = b1 - b0;
  double denom = cross(r, s);
  Vec2 qp = b0 - a0;
  if (std::abs(denom) < 1e-15) return false;  // parallel: treated as clear
  double t = cross(qp, s) / denom;
  double u = cross(qp, r) / denom;
  return t >= 0 && t <= 1 && u >= 0 && u <= 1;
}

}  // namespace

Eigen::VectorXd cyclic_spline_second_derivative(const Eigen::VectorXd& y,
                                                double h) {
  // solve the cyclic tridiagonal system of the periodic cubic spline:
  // m_{i-1} + 4 m_i + m_{i+1} = 6 (y_{i-1} - 2 y_i + y_{i+1}) / h^2
  const int n = static_cast<int>(y.size());
  Eigen::VectorXd rhs(n);
  for (int i = 0; i < n; ++i) {
    double ym = y[(i + n - 1) % n], yp = y[(i + 1) % n];
    rhs[i] = 6.0 * (ym - 2 * y[i] + yp) / (h * h);
  }
  // Sherman-Morrison split: C = A + u v^T with corner entries 1, gamma = -4
  const double gamma = -4.0;
  Eigen::VectorXd diag = Eigen::VectorXd::Constant(n, 4.0);
  diag[0] -= gamma;
  diag[n - 1] -= 1.0 / gamma;
  auto solve_tri = [&](const Eigen::VectorXd& d0) {
    Eigen::VectorXd c(n), d = d0, x(n);
    c[0] = 1.0 / diag[0];
    d[0] /= diag[0];
    for (int i = 1; i < n; ++i) {
      double m = diag[i] - c[i - 1];
      c[i] = 1.0 / m;
      d[i] = (d[i] - d[i - 1]) / m;
    }
    x[n - 1] = d[n - 1];
    for (int i = n - 2; i >= 0; --i) x[i] = d[i] - c[i] * x[i + 1];
    return x;
  };
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  u[0] = gamma;
  u[n - 1] = 1.0;
  Eigen::VectorXd x1 = solve_tri(rhs);
  Eigen::VectorXd x2 = solve_tri(u);
  double vx1 = x1[0] + x1[n - 1] / gamma;
  double vx2 = x2[0] + x2[n - 1] / gamma;
  return x1 - (vx1 / (1.0 + vx2)) * x2;
}

double InterfaceGeometry::total_area() const {
  switch (kind) {
    case Kind::Circle:
      return 2 * kPi * radius;
    case Kind::SphereFamily: {
      double s = 0;
      for (double R : radii) s += sphere_area(R, dim);
      return s;
    }
    case Kind::Curve: {
      double s = 0;
      int n = node_count();
      for (int i = 0; i < n; ++i)
        s += (Vec2(nodes.row((i + 1) % n)) - Vec2(nodes.row(i))).norm();
      return s;
    }
  }
  return 0;
}

Eigen::VectorXd InterfaceGeometry::curvatures() const {
  if (kind == Kind::Circle)
    return Eigen::VectorXd::Constant(std::max(node_count(), 1), 1.0 / radius);
  if (kind != Kind::Curve) throw ParameterError("curvatures: planar curves only");
  int n = node_count();
  double h = 1.0 / n;  // uniform parameter; arclength handled by the norms
  Eigen::VectorXd x = nodes.col(0), y = nodes.col(1);
  Eigen::VectorXd x2 = cyclic_spline_second_derivative(x, h);
  Eigen::VectorXd y2 = cyclic_spline_second_derivative(y, h);
  Eigen::VectorXd k(n);
  for (int i = 0; i < n; ++i) {
    int ip = (i + 1) % n, im = (i + n - 1) % n;
    double xd = (x[ip] - x[im]) / (2 * h);
    double yd = (y[ip] - y[im]) / (2 * h);
    double sp = std::sqrt(xd * xd + yd * yd);
    k[i] = (xd * y2[i] - yd * x2[i]) / (sp * sp * sp);
  }
  // sign convention: positive for a counterclockwise convex curve (circle
  // of radius R has k = +1/R with outward normal)
  return k;
}

void InterfaceGeometry::frame(int i, Vec2& xx, Vec2& nn, double& kk) const {
  if (kind == Kind::Circle) {
    double t = 2 * kPi * i / std::max(1, node_count());
    Vec2 e(std::cos(t), std::sin(t));
    xx = center + radius * e;
    nn = e;
    kk = 1.0 / radius;
    return;
  }
  if (kind != Kind::Curve) throw ParameterError("frame: planar geometry only");
  int n = node_count();
  int ip = (i + 1) % n, im = (i + n - 1) % n;
  xx = nodes.row(i);
  Vec2 t = (Vec2(nodes.row(ip)) - Vec2(nodes.row(im))).normalized();
  // outward normal of a counterclockwise curve
  nn = Vec2(t[1], -t[0]);
  kk = curvatures()[i];
}

double InterfaceGeometry::signed_distance(const Vec2& p) const {
  if (kind == Kind::Circle) return (p - center).norm() - radius;
  if (kind != Kind::Curve)
    throw ParameterError("signed_distance: planar geometry only");
  int n = node_count();
  double best = 1e300;
  int bi = 0;
  for (int i = 0; i < n; ++i) {
    double d = (p - Vec2(nodes.row(i))).squaredNorm();
    if (d < best) {
      best = d;
      bi = i;
    }
  }
  // refine along the two adjacent segments
  double dist2 = best;
  Vec2 closest = nodes.row(bi);
  for (int s = -1; s <= 0; ++s) {
    int i0 = (bi + s + n) % n, i1 = (i0 + 1) % n;
    Vec2 a = nodes.row(i0), b = nodes.row(i1);
    Vec2 ab = b - a;
    double t = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
    Vec2 q = a + t * ab;
    double d = (p - q).squaredNorm();
    if (d < dist2) {
      dist2 = d;
      closest = q;
    }
  }
  // sign by winding-free normal test at the closest node
  Vec2 xx, nn;
  double kk;
  frame(bi, xx, nn, kk);
  double sgn = (p - closest).dot(nn) >= 0 ? 1.0 : -1.0;
  return sgn * std::sqrt(dist2);
}

InterfaceGeometry make_circle(const Vec2& center, double R, int n_nodes,
                              double l0) {
  if (!(R > 0)) throw ParameterError("circle radius must be positive");
  InterfaceGeometry g;
  g.kind = InterfaceGeometry::Kind::Circle;
  g.center = center;
  g.radius = R;
  g.l0 = l0;
  g.dim = 2;
  g.nodes.resize(n_nodes, 2);
  for (int i = 0; i < n_nodes; ++i) {
    double t = 2 * kPi * i / n_nodes;
    g.nodes.row(i) = (center + R * Vec2(std::cos(t), std::sin(t))).transpose();
  }
  return g;
}

InterfaceGeometry make_ellipse(const Vec2& center, double a, double b,
                               int n_nodes, double l0) {
  Eigen::Matrix<double, Eigen::Dynamic, 2> pts(n_nodes, 2);
  for (int i = 0; i < n_nodes; ++i) {
    double t = 2 * kPi * i / n_nodes;
    pts.row(i) = (center + Vec2(a * std::cos(t), b * std::sin(t))).transpose();
  }
  auto g = make_curve(pts, l0);
  return g;
}

InterfaceGeometry make_dumbbell(const Vec2& center, double r0, double r1,
                                int n_nodes, double l0) {
  Eigen::Matrix<double, Eigen::Dynamic, 2> pts(n_nodes, 2);
  for (int i = 0; i < n_nodes; ++i) {
    double t = 2 * kPi * i / n_nodes;
    double r = r0 + r1 * std::cos(2 * t);
    pts.row(i) = (center + r * Vec2(std::cos(t), std::sin(t))).transpose();
  }
  return make_curve(pts, l0);
}

InterfaceGeometry make_spheres(const std::vector<double>& radii, double l0) {
  InterfaceGeometry g;
  g.kind = InterfaceGeometry::Kind::SphereFamily;
  g.radii = radii;
  g.dim = 3;
  g.l0 = l0;
  for (double R : radii)
    if (!(R > 0)) throw ParameterError("sphere radii must be positive");
  return g;
}

InterfaceGeometry make_curve(const Eigen::Matrix<double, Eigen::Dynamic, 2>& pts,
                             double l0) {
  if (pts.rows() < 8) throw ParameterError("curve needs at least 8 nodes");
  InterfaceGeometry g;
  g.kind = InterfaceGeometry::Kind::Curve;
  g.nodes = pts;
  g.l0 = l0;
  g.dim = 2;
  reparametrize_uniform(g.nodes);
  return g;
}

void reparametrize_uniform(Eigen::Matrix<double, Eigen::Dynamic, 2>& pts) {
  // resample on the periodic cubic spline; resampling on the chord polygon
  // would shift nodes by O(h^2) and wreck curvature estimates
  const int n = static_cast<int>(pts.rows());
  Eigen::VectorXd s(n + 1);
  s[0] = 0;
  for (int i = 0; i < n; ++i) {
    Vec2 a = pts.row(i), b = pts.row((i + 1) % n);
    s[i + 1] = s[i] + (b - a).norm();
  }
  double L = s[n];
  Eigen::VectorXd x = pts.col(0), y = pts.col(1);
  double hp = 1.0;  // nominal parameter spacing of the original nodes
  Eigen::VectorXd mx = cyclic_spline_second_derivative(x, hp);
  Eigen::VectorXd my = cyclic_spline_second_derivative(y, hp);
  auto spline_at = [&](const Eigen::VectorXd& v, const Eigen::VectorXd& m,
                       int i, double f) {
    int ip = (i + 1) % n;
    double a = 1 - f, b = f;
    return a * v[i] + b * v[ip] +
           ((a * a * a - a) * m[i] + (b * b * b - b) * m[ip]) / 6.0;
  };
  Eigen::Matrix<double, Eigen::Dynamic, 2> out(n, 2);
  int seg = 0;
  for (int i = 0; i < n; ++i) {
    double target = L * i / n;
    while (seg + 1 <= n && s[seg + 1] < target) ++seg;
    double f = (target - s[seg]) / std::max(s[seg + 1] - s[seg], 1e-300);
    int k = seg % n;
    out(i, 0) = spline_at(x, mx, k, f);
    out(i, 1) = spline_at(y, my, k, f);
  }
  pts = out;
}

AdmissibilityReport check_admissible(const InterfaceGeometry& geom,
                                     double /*epsilon*/, double l0) {
  AdmissibilityReport rep;
  if (geom.kind == InterfaceGeometry::Kind::SphereFamily) {
    double kmax = 0;
    for (double R : geom.radii) kmax = std::max(kmax, (geom.dim - 1) / R);
    rep.curvature_bound = kmax * 3 * l0;
    rep.pass = rep.curvature_bound < 1;
    if (!rep.pass) rep.reason = "curvature bound violated";
    return rep;
  }
  int n = geom.node_count();
  if (n < 64) throw ParameterError("admissibility check needs >= 64 nodes");
  Eigen::VectorXd k =
      geom.kind == InterfaceGeometry::Kind::Circle
          ? Eigen::VectorXd::Constant(n, 1.0 / geom.radius)
          : geom.curvatures();
  rep.curvature_bound = k.cwiseAbs().maxCoeff() * 3 * l0;
  bool curv_ok = rep.curvature_bound < 1;

  // sampled whisker disjointness
  std::vector<Vec2> w0(n), w1(n);
  for (int i = 0; i < n; ++i) {
    Vec2 x, nn;
    double kk;
    geom.frame(i, x, nn, kk);
    w0[i] = x - 3 * l0 * nn;
    w1[i] = x + 3 * l0 * nn;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;  // cyclic neighbors
      if (segments_intersect(w0[i], w1[i], w0[j], w1[j])) {
        rep.intersecting_whiskers.emplace_back(i, j);
        if (rep.intersecting_whiskers.size() >= 16) break;
      }
    }
    if (rep.intersecting_whiskers.size() >= 16) break;
  }
  rep.pass = curv_ok && rep.intersecting_whiskers.empty();
  if (!curv_ok)
    rep.reason = "curvature bound max|k| 3 l0 >= 1";
  else if (!rep.intersecting_whiskers.empty())
    rep.reason = "whiskers intersect";
  return rep;
}

}  // namespace mfch
