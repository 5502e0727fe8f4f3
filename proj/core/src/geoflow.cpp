#include "mfch/geoflow.hpp"

#include <algorithm>
#include <cmath>

namespace mfch {

// ---------------------------------------------------------------------------
// Dormand-Prince 5(4)
// ---------------------------------------------------------------------------

OdeTrace integrate_dp54(const OdeRhs& f, double t0, double t1,
                        const Eigen::VectorXd& y0, double rtol, double atol,
                        double floor_value, int record_every) {
  static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static const double a21 = 1.0 / 5;
  static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                      a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                      a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                      a65 = -5103.0 / 18656;
  static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                      b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                      e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  OdeTrace out;
  Eigen::VectorXd y = y0;
  double t = t0;
  double h = (t1 - t0) * 1e-3;
  out.t.push_back(t);
  out.y.push_back(y);
  long accepted = 0;

  auto try_step = [&](double hh, Eigen::VectorXd& ynew, double& err) {
    Eigen::VectorXd k1 = f(t, y);
    Eigen::VectorXd k2 = f(t + c2 * hh, y + hh * a21 * k1);
    Eigen::VectorXd k3 = f(t + c3 * hh, y + hh * (a31 * k1 + a32 * k2));
    Eigen::VectorXd k4 = f(t + c4 * hh, y + hh * (a41 * k1 + a42 * k2 + a43 * k3));
    Eigen::VectorXd k5 =
        f(t + c5 * hh, y + hh * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    Eigen::VectorXd k6 = f(
        t + hh, y + hh * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    ynew = y + hh * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    Eigen::VectorXd k7 = f(t + hh, ynew);
    Eigen::VectorXd er =
        hh * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    err = 0;
    for (int i = 0; i < y.size(); ++i) {
      double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      err = std::max(err, std::abs(er[i]) / sc);
    }
  };

  int guard = 0;
  while (t < t1 - 1e-14 && guard++ < 2000000) {
    h = std::min(h, t1 - t);
    Eigen::VectorXd ynew;
    double err;
    try_step(h, ynew, err);
    if (err <= 1.0 || h < 1e-13 * (t1 - t0)) {
      // accepted; refine the crossing if a component fell through the floor
      if (ynew.minCoeff() <= floor_value) {
        double lo = 0, hi = h;
        Eigen::VectorXd yc = ynew;
        for (int it = 0; it < 60; ++it) {
          double mid = 0.5 * (lo + hi);
          Eigen::VectorXd ym;
          double e2;
          try_step(mid, ym, e2);
          if (ym.minCoeff() <= floor_value) {
            hi = mid;
            yc = ym;
          } else {
            lo = mid;
          }
        }
        t += hi;
        y = yc;
        out.event = true;
        int comp = 0;
        y.minCoeff(&comp);
        out.event_component = comp;
        out.event_time = t;
        out.t.push_back(t);
        out.y.push_back(y);
        return out;
      }
      t += h;
      y = ynew;
      if (++accepted % record_every == 0 || t >= t1 - 1e-14) {
        out.t.push_back(t);
        out.y.push_back(y);
      }
    }
    double fac = err > 1e-30 ? 0.9 * std::pow(err, -0.2) : 5.0;
    h *= std::clamp(fac, 0.2, 5.0);
  }
  return out;
}

// ---------------------------------------------------------------------------
// radial Willmore flow
// ---------------------------------------------------------------------------

double RadialSystem::conserved() const {
  double s = 0;
  for (double R : radii) s += std::pow(R, d - 1);
  return s;
}

double RadialSystem::Rbar() const {
  return std::pow(conserved() / radii.size(), 1.0 / (d - 1));
}

Eigen::VectorXd RadialSystem::rhs(const Eigen::VectorXd& R) const {
  const int m = static_cast<int>(R.size());
  double num = 0, den = 0;
  for (int j = 0; j < m; ++j) {
    double q = ((3 - d) / R[j] + a0) * ((d - 1) / R[j] - a0);
    double w = std::pow(R[j], d - 3);
    num += q * w;
    den += w;
  }
  double Rc2inv = num / den;
  Eigen::VectorXd dR(m);
  for (int i = 0; i < m; ++i) {
    double q = ((3 - d) / R[i] + a0) * ((d - 1) / R[i] - a0);
    dR[i] = (d - 1) * M1 / (2 * M2) / R[i] * (q - Rc2inv);
  }
  return dR;
}

RadialTrajectory radial_willmore(const RadialSystem& sys, double tau_end,
                                 double floor_rel, double rtol) {
  RadialTrajectory out;
  RadialSystem cur = sys;
  for (double R : cur.radii)
    if (!(R > 0)) throw ParameterError("radii must be positive");
  double c0 = cur.conserved();
  double floor_abs = floor_rel * cur.Rbar();
  double t = 0;
  while (t < tau_end - 1e-13 && cur.radii.size() >= 1) {
    Eigen::VectorXd y0 =
        Eigen::Map<const Eigen::VectorXd>(cur.radii.data(), cur.radii.size());
    if (cur.radii.size() == 1) {
      // a single sphere is stationary under the projected flow
      out.tau.push_back(tau_end);
      out.radii.push_back(cur.radii);
      break;
    }
    auto rhs = [&](double, const Eigen::VectorXd& y) { return cur.rhs(y); };
    auto tr = integrate_dp54(rhs, t, tau_end, y0, rtol, 1e-13, floor_abs, 4);
    for (size_t i = 0; i < tr.t.size(); ++i) {
      out.tau.push_back(tr.t[i]);
      out.radii.push_back(
          std::vector<double>(tr.y[i].data(), tr.y[i].data() + tr.y[i].size()));
      double c = 0;
      for (double R : out.radii.back()) c += std::pow(R, sys.d - 1);
      // conserved only between events
      if (out.events.empty())
        out.conserved_drift = std::max(out.conserved_drift, std::abs(c - c0));
    }
    if (!tr.event) break;
    // remove the extinguished sphere and continue
    t = tr.event_time;
    std::vector<double> next;
    const Eigen::VectorXd& ylast = tr.y.back();
    for (int i = 0; i < ylast.size(); ++i)
      if (i != tr.event_component) next.push_back(ylast[i]);
    RadialEvent ev;
    ev.tau = t;
    ev.sphere = tr.event_component;
    double c = 0;
    for (double R : next) c += std::pow(R, sys.d - 1);
    ev.survivor_sum = c;
    out.events.push_back(ev);
    cur.radii = next;
    c0 = c;
  }
  return out;
}

std::string StabilityVerdict::name() const {
  switch (verdict) {
    case Kind::Stable: return "stable";
    case Kind::Unstable: return "unstable";
    case Kind::Neutral: return "neutral";
  }
  return "?";
}

StabilityVerdict stability_K(double Rbar, double a0, int d) {
  if (!(Rbar > 0)) throw ParameterError("Rbar must be positive");
  StabilityVerdict v;
  v.K = (d - 1) * (3 - d) / Rbar + (d - 2) * a0;
  v.verdict = v.K > 0 ? StabilityVerdict::Kind::Stable
                      : (v.K < 0 ? StabilityVerdict::Kind::Unstable
                                 : StabilityVerdict::Kind::Neutral);
  return v;
}

// ---------------------------------------------------------------------------
// tau1 quenched flow
// ---------------------------------------------------------------------------

double Tau1State::gamma0() const {
  double s = 0;
  for (double R : radii) s += (d == 3) ? 4 * kPi * R * R : 2 * kPi * R;
  return s;
}

Vec2 Tau1State::mass_constant() const {
  Mat2 W2inv = (hessW0 * hessW0).inverse();
  return omega * (W2inv * B1) + gamma0() * M;
}

Tau1Trajectory tau1_flow(const Tau1State& init, double tau_end, double rtol) {
  const int m = static_cast<int>(init.radii.size());
  Tau1Trajectory out;
  Vec2 mass0 = init.mass_constant();
  Mat2 W2 = init.hessW0 * init.hessW0;

  Eigen::VectorXd y0(m + 2);
  for (int i = 0; i < m; ++i) y0[i] = init.radii[i];
  y0[m] = init.B1[0];
  y0[m + 1] = init.B1[1];

  auto rhs = [&](double, const Eigen::VectorXd& y) {
    Eigen::VectorXd dy(m + 2);
    Vec2 B1(y[m], y[m + 1]);
    double E = B1.dot(init.M);
    double H0sum = 0;  // int H0^2 ds
    for (int i = 0; i < m; ++i) {
      double R = y[i];
      double H0 = (init.d - 1) / R;
      double area = (init.d == 3) ? 4 * kPi * R * R : 2 * kPi * R;
      dy[i] = (E / init.M2) * H0;
      H0sum += area * H0 * H0;
    }
    double dgamma = (E / init.M2) * H0sum;
    Vec2 dB1 = -(W2 * init.M) * (dgamma / init.omega);
    dy[m] = dB1[0];
    dy[m + 1] = dB1[1];
    return dy;
  };

  double floor_abs = 1e-4 * (*std::max_element(init.radii.begin(), init.radii.end()));
  auto tr = integrate_dp54(rhs, 0, tau_end, y0, rtol, 1e-13, floor_abs, 4);
  out.extinct = tr.event;
  for (size_t k = 0; k < tr.t.size(); ++k) {
    const auto& y = tr.y[k];
    out.tau.push_back(tr.t[k]);
    Vec2 B1(y[m], y[m + 1]);
    out.B1.push_back(B1);
    out.E.push_back(B1.dot(init.M));
    std::vector<double> Rs(y.data(), y.data() + m);
    out.radii.push_back(Rs);
    Tau1State cur = init;
    cur.radii = Rs;
    cur.B1 = B1;
    out.mass_drift =
        std::max(out.mass_drift, (cur.mass_constant() - mass0).norm());
  }
  return out;
}

// ---------------------------------------------------------------------------
// planar curve Willmore flow
// ---------------------------------------------------------------------------

Eigen::VectorXd pi_gamma(const Eigen::VectorXd& f, const Eigen::VectorXd& H0) {
  double num = f.dot(H0);
  double den = H0.dot(H0);
  if (den < 1e-300) return f;
  return f - (num / den) * H0;
}

CurveFlowResult curve_willmore(const InterfaceGeometry& geom, double a0,
                               double M1, double M2, double tau_end, double dt,
                               int snapshot_every) {
  if (geom.kind != InterfaceGeometry::Kind::Curve &&
      geom.kind != InterfaceGeometry::Kind::Circle)
    throw ParameterError("curve flow requires a planar curve");
  CurveFlowResult out;
  out.geom = geom;
  if (geom.kind == InterfaceGeometry::Kind::Circle) {
    // circles are stationary; keep the polyline representation
    out.geom.kind = InterfaceGeometry::Kind::Curve;
  }
  auto& pts = out.geom.nodes;
  const int n = static_cast<int>(pts.rows());
  if (n < 128) throw ParameterError("curve flow needs >= 128 nodes");

  double L0 = out.geom.total_area();
  out.length.push_back(L0);
  out.tau.push_back(0);

  // the stiff -(M1/M2) d^4/ds^4 part of the motion is handled implicitly
  // in Fourier space along the uniform-arclength parametrization
  const double cstiff = M1 / M2;
  Eigen::VectorXcd xh(n), yh(n);
  std::vector<std::complex<double>> fbuf(n);
  fftw_plan pf = fftw_plan_dft_1d(
      n, reinterpret_cast<fftw_complex*>(fbuf.data()),
      reinterpret_cast<fftw_complex*>(fbuf.data()), FFTW_FORWARD, FFTW_ESTIMATE);
  fftw_plan pb = fftw_plan_dft_1d(
      n, reinterpret_cast<fftw_complex*>(fbuf.data()),
      reinterpret_cast<fftw_complex*>(fbuf.data()), FFTW_BACKWARD, FFTW_ESTIMATE);
  auto dft = [&](const Eigen::VectorXd& v, Eigen::VectorXcd& vh) {
    for (int j = 0; j < n; ++j) fbuf[j] = v[j];
    fftw_execute(pf);
    for (int j = 0; j < n; ++j) vh[j] = fbuf[j] / double(n);
  };
  auto idft = [&](const Eigen::VectorXcd& vh, Eigen::VectorXd& v) {
    for (int j = 0; j < n; ++j) fbuf[j] = vh[j];
    fftw_execute(pb);
    for (int j = 0; j < n; ++j) v[j] = fbuf[j].real();
  };
  struct PlanGuard {
    fftw_plan a, b;
    ~PlanGuard() {
      fftw_destroy_plan(a);
      fftw_destroy_plan(b);
    }
  } guard{pf, pb};

  long steps = static_cast<long>(std::ceil(tau_end / dt));
  for (long s = 1; s <= steps; ++s) {
    double L = out.geom.total_area();
    double hs = L / n;
    Eigen::VectorXd k = out.geom.curvatures();
    Eigen::VectorXd w = k.array() - a0;
    Eigen::VectorXd lap_w = cyclic_spline_second_derivative(w, hs);
    Eigen::VectorXd f(n);
    for (int i = 0; i < n; ++i) {
      double H1 = -k[i] * k[i];
      f[i] = lap_w[i] - (0.5 * k[i] * (k[i] - a0) + H1) * w[i];
    }
    Eigen::VectorXd Vn = (M1 / M2) * pi_gamma(f, k);
    out.max_projection_residual = std::max(
        out.max_projection_residual,
        std::abs(Vn.dot(k)) * hs / (1.0 + Vn.norm() * k.norm() * hs));
    Eigen::Matrix<double, Eigen::Dynamic, 2> normals(n, 2);
    for (int i = 0; i < n; ++i) {
      int ip = (i + 1) % n, im = (i + n - 1) % n;
      Vec2 t = (Vec2(pts.row(ip)) - Vec2(pts.row(im))).normalized();
      normals.row(i) = Vec2(t[1], -t[0]).transpose();  // outward for ccw
    }
    Eigen::VectorXd xs = pts.col(0), ys = pts.col(1);
    Eigen::VectorXd bx(n), by(n);
    for (int i = 0; i < n; ++i) {
      bx[i] = xs[i] + dt * Vn[i] * normals(i, 0);
      by[i] = ys[i] + dt * Vn[i] * normals(i, 1);
    }
    Eigen::VectorXcd bxh(n), byh(n);
    dft(bx, bxh);
    dft(by, byh);
    dft(xs, xh);
    dft(ys, yh);
    for (int k2 = 0; k2 < n; ++k2) {
      int kk = k2 <= n / 2 ? k2 : k2 - n;
      double q = 2 * kPi * kk / L;
      double sym = dt * cstiff * q * q * q * q;
      bxh[k2] = (bxh[k2] + sym * xh[k2]) / (1.0 + sym);
      byh[k2] = (byh[k2] + sym * yh[k2]) / (1.0 + sym);
    }
    idft(bxh, bx);
    idft(byh, by);
    pts.col(0) = bx;
    pts.col(1) = by;
    reparametrize_uniform(pts);
    // the splitting leaks a little length each step; remove it along the
    // H0 normal direction, the exact complement of Pi_Gamma
    double Lnew = out.geom.total_area();
    out.max_area_drift =
        std::max(out.max_area_drift, std::abs(Lnew - L0) / L0);
    Eigen::VectorXd kn = out.geom.curvatures();
    double hs2 = Lnew / n;
    double c0 = -(Lnew - L0) / std::max(kn.squaredNorm() * hs2, 1e-300);
    for (int i = 0; i < n; ++i) {
      int ip = (i + 1) % n, im = (i + n - 1) % n;
      Vec2 t = (Vec2(pts.row(ip)) - Vec2(pts.row(im))).normalized();
      pts.row(i) += c0 * kn[i] * Vec2(t[1], -t[0]).transpose();
    }
    out.tau.push_back(s * dt);
    out.length.push_back(out.geom.total_area());
    if (snapshot_every > 0 && s % snapshot_every == 0)
      out.snapshots.push_back(pts);
    if (s % 25 == 0) {
      auto rep = check_admissible(out.geom, 0.1, out.geom.l0);
      if (!rep.intersecting_whiskers.empty() && rep.curvature_bound < 1) {
        out.breakdown = true;
        break;
      }
    }
  }
  return out;
}

}  // namespace mfch
