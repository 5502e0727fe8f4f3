#include "mfch/potentials.hpp"

#include <cmath>

namespace mfch {

std::string region_name(Region r) {
  switch (r) {
    case Region::Quadrant: return "quadrant";
    case Region::Plateau: return "plateau";
    case Region::Well: return "well";
    case Region::Band: return "band";
  }
  return "?";
}

namespace {

void require_order(int order) {
  if (order < 0 || order > 2)
    throw CapabilityError("evaluation order must be in {0,1,2}");
}

}  // namespace

EvalResult DecoupledCubic::eval(const Vec2& u, int order) const {
  require_order(order);
  EvalResult r;
  r.value = 0.5 * u[0] * u[0] - u[0] * u[0] * u[0] / 3.0 + u[1] * u[1];
  if (order >= 1) r.grad = Vec2(u[0] - u[0] * u[0], 2 * u[1]);
  if (order >= 2) {
    r.hess.setZero();
    r.hess(0, 0) = 1 - 2 * u[0];
    r.hess(1, 1) = 2;
  }
  return r;
}

EvalResult QuadraticWell::eval(const Vec2& u, int order) const {
  require_order(order);
  EvalResult r;
  r.value = u.squaredNorm();
  if (order >= 1) r.grad = 2 * u;
  if (order >= 2) r.hess = 2 * Mat2::Identity();
  return r;
}

// ---------------------------------------------------------------------------
// universal billiard level set
//
// rho(u) = chat(m) - |u| with m the angular distance to the diagonal.
// chat is the cap constant c on [0, m_cap], the confocal parabola
// c_p/(1 + sin m) beyond m_par, and quintic blends in between and toward a
// constant for angles far outside the physical quadrant.
// ---------------------------------------------------------------------------

namespace {

class UniversalLevelSet final : public LevelSet {
 public:
  explicit UniversalLevelSet(double c) : c_(c) {
    cp_ = c * (1.0 + std::sin(kUniversalParabAngle));
    blend_ = QuinticHermite(kUniversalCapAngle, kUniversalParabAngle, c_, 0, 0,
                            par(kUniversalParabAngle), par_d(kUniversalParabAngle),
                            par_dd(kUniversalParabAngle));
    double K = par(far0_) + 0.3 * par_d(far0_);
    far_ = QuinticHermite(far0_, far1_, par(far0_), par_d(far0_), par_dd(far0_),
                          K, 0, 0);
    far_const_ = K;
  }

  double chat(double m) const {
    if (m <= kUniversalCapAngle) return c_;
    if (m <= kUniversalParabAngle) return blend_.value(m);
    if (m <= far0_) return par(m);
    if (m <= far1_) return far_.value(m);
    return far_const_;
  }
  double chat_d(double m) const {
    if (m <= kUniversalCapAngle) return 0;
    if (m <= kUniversalParabAngle) return blend_.deriv(m);
    if (m <= far0_) return par_d(m);
    if (m <= far1_) return far_.deriv(m);
    return 0;
  }
  double chat_dd(double m) const {
    if (m <= kUniversalCapAngle) return 0;
    if (m <= kUniversalParabAngle) return blend_.deriv2(m);
    if (m <= far0_) return par_dd(m);
    if (m <= far1_) return far_.deriv2(m);
    return 0;
  }

  double value(const Vec2& u) const override {
    double r = u.norm();
    if (r < 1e-300) return c_;
    return chat(angdist(u)) - r;
  }

  Vec2 grad(const Vec2& u) const override {
    double r = u.norm();
    Vec2 uhat = u / r;
    Vec2 ealpha(-uhat[1], uhat[0]);
    double m, s;
    angdist_signed(u, m, s);
    return chat_d(m) * s * ealpha / r - uhat;
  }

  Mat2 hess(const Vec2& u) const override {
    double r = u.norm();
    Vec2 uhat = u / r;
    Vec2 ealpha(-uhat[1], uhat[0]);
    double m, s;
    angdist_signed(u, m, s);
    Mat2 hess_alpha;
    double r4 = r * r * r * r;
    hess_alpha << 2 * u[0] * u[1], u[1] * u[1] - u[0] * u[0],
        u[1] * u[1] - u[0] * u[0], -2 * u[0] * u[1];
    hess_alpha /= r4;
    Mat2 gm_outer = (ealpha / r) * (ealpha / r).transpose();
    Mat2 h = chat_dd(m) * gm_outer + chat_d(m) * s * hess_alpha;
    h -= (Mat2::Identity() - uhat * uhat.transpose()) / r;
    return h;
  }

 private:
  double par(double m) const { return cp_ / (1.0 + std::sin(m)); }
  double par_d(double m) const {
    double q = 1.0 + std::sin(m);
    return -cp_ * std::cos(m) / (q * q);
  }
  double par_dd(double m) const {
    double sm = std::sin(m), cm = std::cos(m);
    double q = 1.0 + sm;
    return cp_ * (sm * q + 2 * cm * cm) / (q * q * q);
  }

  static double angdist(const Vec2& u) {
    double m, s;
    angdist_signed(u, m, s);
    return m;
  }
  static void angdist_signed(const Vec2& u, double& m, double& s) {
    double a = std::atan2(u[1], u[0]) - kPi / 4;
    while (a > kPi) a -= 2 * kPi;
    while (a < -kPi) a += 2 * kPi;
    m = std::abs(a);
    s = a >= 0 ? 1.0 : -1.0;
  }

  double c_, cp_;
  QuinticHermite blend_, far_;
  double far0_ = 2.0, far1_ = 2.6;
  double far_const_ = 0;
};

}  // namespace

// ---------------------------------------------------------------------------
// BilliardSpec
// ---------------------------------------------------------------------------

void BilliardSpec::init_blend() const {
  if (blend_ready_) return;
  blend_ = QuinticHermite(r_quad, R0, r_quad * r_quad, 2 * r_quad, 2.0, b_plus,
                          0, 0);
  blend_ready_ = true;
}

double BilliardSpec::radial(double r) const {
  if (r <= r_quad) return r * r;
  init_blend();
  if (r >= R0) return b_plus;
  return blend_.value(r);
}

double BilliardSpec::radial_d(double r) const {
  if (r <= r_quad) return 2 * r;
  init_blend();
  if (r >= R0) return 0;
  return blend_.deriv(r);
}

double BilliardSpec::radial_dd(double r) const {
  if (r <= r_quad) return 2;
  init_blend();
  if (r >= R0) return 0;
  return blend_.deriv2(r);
}

Region BilliardSpec::classify(const Vec2& u, double delta) const {
  double r = u.norm();
  if (r < R0) return Region::Quadrant;
  double p = rho->value(u);
  if (std::abs(p) <= delta) return Region::Band;
  return p > 0 ? Region::Plateau : Region::Well;
}

EvalResult BilliardSpec::eval(const Vec2& u, int order) const {
  if (order < 0 || order > 2)
    throw CapabilityError("evaluation order must be in {0,1,2}");
  if (!inside_domain(u))
    throw DomainError("point outside the physical domain of the billiard");
  EvalResult res;
  double r = u.norm();
  if (r < R0) {
    res.value = radial(r);
    if (order >= 1) res.grad = (r > 0) ? Vec2(radial_d(r) * u / r) : Vec2::Zero();
    if (order >= 2) {
      if (r < 1e-14) {
        res.hess = 2 * Mat2::Identity();
      } else {
        Vec2 uhat = u / r;
        Mat2 P = uhat * uhat.transpose();
        res.hess = radial_dd(r) * P + (radial_d(r) / r) * (Mat2::Identity() - P);
      }
    }
    return res;
  }
  double p = rho->value(u);
  if (p == 0 && order >= 1)
    throw CapabilityError("billiard potential is non-smooth on the collision curve");
  res.value = p >= 0 ? b_plus : -b_minus;
  // constant regions: gradient and Hessian vanish
  return res;
}

void BilliardSpec::validate() const {
  if (!(R0 > 0) || !(R0 < 1)) throw ParameterError("R0 must be in (0,1)");
  if (!(b_plus > 0) || !(b_minus > 0))
    throw ParameterError("b_plus and b_minus must be positive");
  if (!(r_quad >= R0 / 3 - 1e-15) || !(r_quad < R0))
    throw ParameterError("r_quad must lie in [R0/3, R0)");
  if (!rho) throw ParameterError("billiard spec requires a level-set function");
  // strict monotonicity of the radial profile, sampled
  double prev = radial(0.0);
  for (int i = 1; i <= 400; ++i) {
    double r = R0 * i / 400.0;
    double b = radial(r);
    if (!(b > prev - 1e-15))
      throw SpecInconsistencyError("radial profile is not strictly increasing");
    prev = b;
  }
}

BilliardSpec universal_billiard(double c) {
  if (!(c > 0) || !(c > 1e-12) || c > 7.0 / 8.0 + 1e-15)
    throw ParameterError("universal billiard requires c in (0, 7/8]");
  BilliardSpec spec;
  spec.R0 = 0.25;
  spec.b_plus = 0.25;
  spec.b_minus = 0.25;
  spec.r_quad = 0.15;
  spec.rho = std::make_shared<UniversalLevelSet>(c);
  spec.tag = "universal(c=" + std::to_string(c) + ")";
  // delta0: the band may not touch the quadrant and must stay inside the
  // neighborhood where rho has a healthy gradient.  The level set is
  // radial-monotone so the binding distance is attained on |u| = R0.
  double dmin = 1e9;
  for (int i = 0; i <= 720; ++i) {
    double a = (kPi / 2) * i / 720.0;
    Vec2 u(spec.R0 * std::cos(a), spec.R0 * std::sin(a));
    dmin = std::min(dmin, std::abs(spec.rho->value(u)));
  }
  spec.delta0 = 0.95 * dmin;
  spec.validate();
  return spec;
}

// ---------------------------------------------------------------------------
// smoothed jump and the regularized billiard
// ---------------------------------------------------------------------------

std::pair<double, double> smooth_jump(double delta, double rho, double b_plus,
                                      double b_minus, const Mollifier& mol) {
  if (!(delta > 0)) throw ParameterError("smooth_jump requires delta > 0");
  double t = rho / delta;
  double value = -b_minus + (b_plus + b_minus) * mol.primitive(t);
  double deriv = (b_plus + b_minus) * mol.value(t) / delta;
  return {value, deriv};
}

RegularizedBilliard::RegularizedBilliard(BilliardSpec spec, double delta,
                                         Mollifier mol)
    : spec_(std::move(spec)), delta_(delta), mol_(std::move(mol)) {
  if (!(delta_ > 0)) throw ParameterError("smoothing width delta must be > 0");
  if (delta_ > spec_.delta0 + 1e-12)
    throw ParameterError("delta exceeds delta0 = " +
                         std::to_string(spec_.delta0) + " of spec " + spec_.tag);
}

double RegularizedBilliard::jump_deriv2(double rho) const {
  return (spec_.b_plus + spec_.b_minus) * mol_.deriv(rho / delta_) /
         (delta_ * delta_);
}

EvalResult RegularizedBilliard::eval_global(const Vec2& u, int order) const {
  if (order < 0 || order > 2)
    throw CapabilityError("evaluation order must be in {0,1,2}");
  EvalResult res;
  double r = u.norm();
  if (r < spec_.R0) {
    res.value = spec_.radial(r);
    if (order >= 1)
      res.grad = (r > 0) ? Vec2(spec_.radial_d(r) * u / r) : Vec2::Zero();
    if (order >= 2) {
      if (r < 1e-14) {
        res.hess = 2 * Mat2::Identity();
      } else {
        Vec2 uhat = u / r;
        Mat2 P = uhat * uhat.transpose();
        res.hess =
            spec_.radial_dd(r) * P + (spec_.radial_d(r) / r) * (Mat2::Identity() - P);
      }
    }
    return res;
  }
  double p = spec_.rho->value(u);
  if (std::abs(p) > delta_) {
    res.value = p > 0 ? spec_.b_plus : -spec_.b_minus;
    return res;
  }
  auto [val, dchi] = smooth_jump(delta_, p, spec_.b_plus, spec_.b_minus, mol_);
  res.value = val;
  if (order >= 1) {
    Vec2 gr = spec_.rho->grad(u);
    res.grad = dchi * gr;
    if (order >= 2) {
      double ddchi = jump_deriv2(p);
      res.hess = ddchi * gr * gr.transpose() + dchi * spec_.rho->hess(u);
    }
  }
  return res;
}

EvalResult RegularizedBilliard::eval(const Vec2& u, int order) const {
  if (!spec_.inside_domain(u))
    throw DomainError("point outside the physical domain of the billiard");
  return eval_global(u, order);
}

// ---------------------------------------------------------------------------
// finite-difference checks
// ---------------------------------------------------------------------------

double finite_difference_gradient_check(const Potential& pot, const Vec2& u,
                                        double h) {
  if (!(h > 0)) throw ParameterError("finite-difference step must be > 0");
  if (!pot.smooth_near(u, 4 * h))
    throw CapabilityError("potential is not smooth near the requested point");
  Vec2 g = pot.grad(u);
  double worst = 0;
  for (int i = 0; i < 2; ++i) {
    Vec2 e = Vec2::Zero();
    e[i] = h;
    double fd = (pot.value(u + e) - pot.value(u - e)) / (2 * h);
    worst = std::max(worst, std::abs(fd - g[i]) / (1 + std::abs(g[i])));
  }
  return worst;
}

double finite_difference_hessian_check(const Potential& pot, const Vec2& u,
                                       double h) {
  if (!(h > 0)) throw ParameterError("finite-difference step must be > 0");
  Mat2 H = pot.hess(u);
  double f0 = pot.value(u);
  double worst = 0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      Vec2 ei = Vec2::Zero(), ej = Vec2::Zero();
      ei[i] = h;
      ej[j] = h;
      double fd;
      if (i == j) {
        fd = (pot.value(u + ei) - 2 * f0 + pot.value(u - ei)) / (h * h);
      } else {
        fd = (pot.value(u + ei + ej) - pot.value(u + ei - ej) -
              pot.value(u - ei + ej) + pot.value(u - ei - ej)) /
             (4 * h * h);
      }
      worst = std::max(worst, std::abs(fd - H(i, j)) / (1 + std::abs(H(i, j))));
    }
  }
  return worst;
}

}  // namespace mfch
