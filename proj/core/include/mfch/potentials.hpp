#pragma once

#include <memory>
#include <string>
#include <utility>

#include "mfch/mollifier.hpp"
#include "mfch/quintic.hpp"
#include "mfch/types.hpp"

namespace mfch {

/// Classification of a point relative to a billiard potential.
enum class Region { Quadrant, Plateau, Well, Band };

std::string region_name(Region r);

/// Value / gradient / Hessian bundle; higher entries valid up to the
/// evaluation order requested.
struct EvalResult {
  double value = 0;
  Vec2 grad = Vec2::Zero();
  Mat2 hess = Mat2::Zero();
};

/// A mixing potential W : R^2 -> R with derivatives up to second order.
class Potential {
 public:
  virtual ~Potential() = default;

  /// Evaluate at u up to `order` in {0,1,2}.  Throws CapabilityError for
  /// order > 2 and DomainError outside the potential's physical domain.
  virtual EvalResult eval(const Vec2& u, int order) const = 0;

  virtual std::string name() const = 0;

  /// Evaluation bypassing the physical-domain check; potentials whose
  /// formulas extend smoothly override this so that solvers and the
  /// gradient flow remain defined during transient excursions.
  virtual EvalResult eval_extended(const Vec2& u, int order) const {
    return eval(u, order);
  }

  /// False near known non-smooth sets; finite-difference checks use this.
  virtual bool smooth_near(const Vec2& /*u*/, double /*radius*/) const {
    return true;
  }

  double value(const Vec2& u) const { return eval(u, 0).value; }
  Vec2 grad(const Vec2& u) const { return eval(u, 1).grad; }
  Mat2 hess(const Vec2& u) const { return eval(u, 2).hess; }
  /// Hessian at the origin (the solvent state).
  Mat2 hess0() const { return hess(Vec2::Zero()); }
};

/// W(u) = (u1^2/2 - u1^3/3) + u2^2.  The first component carries the
/// classical solitary profile (3/2) sech^2(z/2); the second is quadratic.
class DecoupledCubic final : public Potential {
 public:
  EvalResult eval(const Vec2& u, int order) const override;
  std::string name() const override { return "decoupled-cubic"; }
};

/// W(u) = |u|^2, smooth everywhere; handy for exactness checks.
class QuadraticWell final : public Potential {
 public:
  EvalResult eval(const Vec2& u, int order) const override;
  std::string name() const override { return "quadratic-well"; }
};

/// Solenoidal perturbation V : R^2 -> R^2 with V(0) = 0.
class Solenoidal {
 public:
  virtual ~Solenoidal() = default;
  virtual Vec2 value(const Vec2& u) const = 0;
  virtual Mat2 jacobian(const Vec2& u) const = 0;
  virtual std::string name() const = 0;
  /// curl of V at u (scalar in 2-D).
  double curl(const Vec2& u) const {
    Mat2 J = jacobian(u);
    return J(1, 0) - J(0, 1);
  }
};

/// V(u) = (-u2, u1); curl = 2 everywhere.
class RotationalV final : public Solenoidal {
 public:
  Vec2 value(const Vec2& u) const override { return Vec2(-u[1], u[0]); }
  Mat2 jacobian(const Vec2&) const override {
    Mat2 J;
    J << 0, -1, 1, 0;
    return J;
  }
  std::string name() const override { return "rotational"; }
};

class ZeroV final : public Solenoidal {
 public:
  Vec2 value(const Vec2&) const override { return Vec2::Zero(); }
  Mat2 jacobian(const Vec2&) const override { return Mat2::Zero(); }
  std::string name() const override { return "zero"; }
};

/// Level-set description of a collision curve: rho = 0 on the curve,
/// rho > 0 on the plateau side, with analytic gradient and Hessian.
class LevelSet {
 public:
  virtual ~LevelSet() = default;
  virtual double value(const Vec2& u) const = 0;
  virtual Vec2 grad(const Vec2& u) const = 0;
  virtual Mat2 hess(const Vec2& u) const = 0;
};

/// Birkhoff-billiard potential: radial quadrant, constant plateau b+,
/// constant well -b-, separated by the collision curve {rho = 0}.
struct BilliardSpec {
  double R0 = 0.25;       // quadrant radius
  double b_plus = 0.25;   // plateau value
  double b_minus = 0.25;  // well depth (potential is -b_minus)
  double r_quad = 0.15;   // b(r) = r^2 exactly on [0, r_quad]
  int ell = 2;            // smoothness order of the blends
  std::shared_ptr<const LevelSet> rho;
  double delta0 = 0;  // largest admissible smoothing width
  std::string tag;

  /// Radial profile b(r) on [0, R0] and derivatives.
  double radial(double r) const;
  double radial_d(double r) const;
  double radial_dd(double r) const;

  /// Region of u for smoothing width delta (delta = 0: the raw billiard,
  /// where Band degenerates to the collision curve itself).
  Region classify(const Vec2& u, double delta) const;

  /// The physical domain (the closed first quadrant of composition space).
  bool inside_domain(const Vec2& u) const {
    return u[0] >= -1e-12 && u[1] >= -1e-12;
  }

  /// Raw (unregularized) billiard evaluation.  Non-smooth on the
  /// collision curve; order >= 1 there is refused.
  EvalResult eval(const Vec2& u, int order) const;

  void validate() const;

 private:
  void init_blend() const;
  mutable QuinticHermite blend_;  // radial blend, built lazily
  mutable bool blend_ready_ = false;
};

/// The universal billiard of shape parameter c in (0, 7/8]: a circular
/// cap of radius c spanning +-12 degrees about the diagonal, joined C^2 to
/// the two confocal parabola arcs r (1 + sin m) = c_p; every ray within
/// the cap window is a one-collision head-on homoclinic and rays striking
/// the arcs return to the origin after two collisions.
BilliardSpec universal_billiard(double c);

/// Angular half-widths of the universal cap and of the start of the
/// parabola arcs (radians).
constexpr double kUniversalCapAngle = 0.20943951023931953;   // 12 deg
constexpr double kUniversalParabAngle = 0.26179938779914941; // 15 deg

/// Smoothed jump of width delta across rho = 0:
///   value  = -b_minus + (b_plus + b_minus) * H(rho/delta)
///   deriv  = (b_plus + b_minus) * h(rho/delta) / delta
std::pair<double, double> smooth_jump(double delta, double rho, double b_plus,
                                      double b_minus, const Mollifier& mol);

/// Billiard potential with the jump across the collision curve replaced
/// by a mollified transition of width delta.  Immutable; evaluation is
/// pure and thread-safe.
class RegularizedBilliard final : public Potential {
 public:
  RegularizedBilliard(BilliardSpec spec, double delta,
                      Mollifier mol = Mollifier::polynomial());

  const BilliardSpec& spec() const { return spec_; }
  double delta() const { return delta_; }
  const Mollifier& mollifier() const { return mol_; }

  Region classify(const Vec2& u) const { return spec_.classify(u, delta_); }

  EvalResult eval(const Vec2& u, int order) const override;

  /// Evaluation without the domain check; the formulas extend smoothly to
  /// the whole plane, which keeps the gradient flow defined during
  /// transient excursions.
  EvalResult eval_global(const Vec2& u, int order) const;
  EvalResult eval_extended(const Vec2& u, int order) const override {
    return eval_global(u, order);
  }

  std::string name() const override { return "regularized(" + spec_.tag + ")"; }

  bool smooth_near(const Vec2&, double) const override { return true; }

  /// chi_delta''(rho); needed by the linearization assembly.
  double jump_deriv2(double rho) const;

 private:
  BilliardSpec spec_;
  double delta_;
  Mollifier mol_;
};

/// Max over components of |analytic - central difference| / (1 + |analytic|)
/// for the gradient of pot at u with step h.
double finite_difference_gradient_check(const Potential& pot, const Vec2& u,
                                        double h);

/// Same discrepancy measure for the Hessian against second differences of
/// the value.
double finite_difference_hessian_check(const Potential& pot, const Vec2& u,
                                       double h);

}  // namespace mfch
