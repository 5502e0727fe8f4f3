#include "mfch/dressing.hpp"

#include <cmath>

#include "mfch/fft.hpp"
#include "mfch/quintic.hpp"

namespace mfch {

double dressing_cutoff(double r) {
  r = std::abs(r);
  if (r <= 1) return 1;
  if (r >= 3) return 0;
  static const QuinticHermite q(1, 3, 1, 0, 0, 0, 0, 0);
  return q.value(r);
}

FieldState dress(const InterfaceGeometry& geom, const HomoclinicProfile& profile,
                 const ModelParams& params, int nx, int ny) {
  params.validate();
  FieldState f;
  f.params = params;
  f.Lx = params.domain_size[0];
  f.Ly = params.domain_size.size() > 1 ? params.domain_size[1] : f.Lx;
  f.resize(nx, ny);
  const double eps = params.epsilon;
  const double l0 = geom.l0;
  if (std::min(f.dx(), f.dy()) > eps / 8 + 1e-15)
    throw ResolutionError("grid too coarse: fewer than 8 cells across the profile core");
  if (profile.grid.L < 3 * l0 / eps)
    throw ResolutionError("profile truncation does not cover |z| <= 3 l0/eps");

  const Vec2 uinf = profile.far_field;
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      Vec2 x(f.x(ix), f.y(iy));
      double d = geom.signed_distance(x);
      double z = d / eps;
      Vec2 val;
      double r = std::abs(d) / l0;
      if (r <= 1) {
        val = profile.sample(z);
      } else if (r < 3) {
        double chi = dressing_cutoff(r);
        val = (1 - chi) * uinf + chi * profile.sample(z);
      } else {
        val = uinf;
      }
      size_t idx = static_cast<size_t>(iy) * nx + ix;
      f.u1[idx] = val[0];
      f.u2[idx] = val[1];
    }
  }
  return f;
}

double energy_full(const FieldState& state, const Potential& pot,
                   const Solenoidal& V) {
  if (!state.finite()) throw InvalidStateError("field contains non-finite values");
  const double eps = state.params.epsilon;
  const double eta1 = state.params.eta1, eta2 = state.params.eta2;
  SpectralGrid sg(state.nx, state.ny, state.Lx, state.Ly);
  std::vector<double> lap1, lap2, g1x, g1y, g2x, g2y;
  sg.laplacian(state.u1, lap1);
  sg.laplacian(state.u2, lap2);
  sg.gradient(state.u1, g1x, g1y);
  sg.gradient(state.u2, g2x, g2y);

  double sum = 0;
  for (size_t i = 0; i < state.cells(); ++i) {
    Vec2 u(state.u1[i], state.u2[i]);
    EvalResult w = pot.eval_extended(u, 1);
    Vec2 vv = V.value(u);
    double G1 = eps * eps * lap1[i] - w.grad[0] + eps * vv[0];
    double G2 = eps * eps * lap2[i] - w.grad[1] + eps * vv[1];
    double gradsq = g1x[i] * g1x[i] + g1y[i] * g1y[i] + g2x[i] * g2x[i] +
                    g2y[i] * g2y[i];
    sum += 0.5 * (G1 * G1 + G2 * G2) -
           eps * eps * (eps * eps * 0.5 * eta1 * gradsq + eta2 * w.value);
  }
  return sum * state.cell_area();
}

double energy_sharp_from_curvature(const Eigen::VectorXd& H0, double area,
                                   double a0, double M1,
                                   const ModelParams& params) {
  const int n = static_cast<int>(H0.size());
  double acc = 0;
  for (int i = 0; i < n; ++i) {
    double q = H0[i] - a0;
    acc += q * q - (params.eta1 + params.eta2);
  }
  acc *= area / n;
  double e3 = params.epsilon * params.epsilon * params.epsilon;
  return e3 * 0.5 * M1 * acc;
}

double energy_sharp(const InterfaceGeometry& geom, double a0, double M1,
                    const ModelParams& params) {
  if (geom.kind == InterfaceGeometry::Kind::SphereFamily) {
    double acc = 0;
    for (double R : geom.radii) {
      double H0 = (geom.dim - 1) / R;
      double q = H0 - a0;
      double area = geom.dim == 3 ? 4 * kPi * R * R : 2 * kPi * R;
      acc += area * (q * q - (params.eta1 + params.eta2));
    }
    double e3 = std::pow(params.epsilon, 3);
    return e3 * 0.5 * M1 * acc;
  }
  Eigen::VectorXd H0;
  if (geom.kind == InterfaceGeometry::Kind::Circle) {
    H0 = Eigen::VectorXd::Constant(std::max(geom.node_count(), 64),
                                   1.0 / geom.radius);
  } else {
    H0 = geom.curvatures();
  }
  return energy_sharp_from_curvature(H0, geom.total_area(), a0, M1, params);
}

Vec2 mass_full(const FieldState& state) { return state.mass(); }

double total_curvature(const InterfaceGeometry& geom) {
  switch (geom.kind) {
    case InterfaceGeometry::Kind::Circle:
      return 2 * kPi;  // (1/R) * 2 pi R
    case InterfaceGeometry::Kind::SphereFamily: {
      double s = 0;
      for (double R : geom.radii) {
        double area = geom.dim == 3 ? 4 * kPi * R * R : 2 * kPi * R;
        s += area * (geom.dim - 1) / R;
      }
      return s;
    }
    case InterfaceGeometry::Kind::Curve: {
      Eigen::VectorXd k = geom.curvatures();
      return k.sum() * geom.total_area() / k.size();
    }
  }
  return 0;
}

Vec2 mass_sharp(const InterfaceGeometry& geom, const HomoclinicProfile& profile,
                const CorrectorPair& corr, const ModelParams& params) {
  double area = geom.total_area();
  double omega = 1;
  for (double L : params.domain_size) omega *= L;
  Vec2 lead = area * profile.M;
  Vec2 first = omega * corr.B + area * corr.int_phi1 +
               total_curvature(geom) * profile.zM;
  return lead + params.epsilon * first;
}

}  // namespace mfch
