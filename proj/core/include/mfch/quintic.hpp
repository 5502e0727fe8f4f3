#pragma once

namespace mfch {

/// Quintic Hermite interpolant on [x0, x1] matching value and two
/// derivatives at both ends.  Used for radial blends, level-set blends and
/// the dressing cutoff.
struct QuinticHermite {
  double x0 = 0, x1 = 1;
  double c[6] = {0, 0, 0, 0, 0, 0};  // coefficients in t = (x - x0)/(x1 - x0)

  QuinticHermite() = default;
  QuinticHermite(double x0_, double x1_, double f0, double d0, double s0,
                 double f1, double d1, double s1);

  double value(double x) const;
  double deriv(double x) const;
  double deriv2(double x) const;
};

/// Smoothstep with two vanishing derivatives at both ends:
/// 0 for s <= -1, 1 for s >= 1.
double smoothstep5(double s);
double smoothstep5_d(double s);
double smoothstep5_dd(double s);

}  // namespace mfch
