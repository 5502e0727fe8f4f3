#include "mfch/quintic.hpp"

namespace mfch {

QuinticHermite::QuinticHermite(double x0_, double x1_, double f0, double d0,
                               double s0, double f1, double d1, double s1)
    : x0(x0_), x1(x1_) {
  double w = x1 - x0;
  double D0 = d0 * w, S0 = s0 * w * w;
  double D1 = d1 * w, S1 = s1 * w * w;
  c[0] = f0;
  c[1] = D0;
  c[2] = S0 / 2;
  c[3] = 10 * (f1 - f0) - 6 * D0 - 4 * D1 - 1.5 * S0 + 0.5 * S1;
  c[4] = -15 * (f1 - f0) + 8 * D0 + 7 * D1 + 1.5 * S0 - S1;
  c[5] = 6 * (f1 - f0) - 3 * D0 - 3 * D1 - 0.5 * S0 + 0.5 * S1;
}

double QuinticHermite::value(double x) const {
  double t = (x - x0) / (x1 - x0);
  return c[0] + t * (c[1] + t * (c[2] + t * (c[3] + t * (c[4] + t * c[5]))));
}

double QuinticHermite::deriv(double x) const {
  double w = x1 - x0;
  double t = (x - x0) / w;
  double d =
      c[1] + t * (2 * c[2] + t * (3 * c[3] + t * (4 * c[4] + t * 5 * c[5])));
  return d / w;
}

double QuinticHermite::deriv2(double x) const {
  double w = x1 - x0;
  double t = (x - x0) / w;
  double d = 2 * c[2] + t * (6 * c[3] + t * (12 * c[4] + t * 20 * c[5]));
  return d / (w * w);
}

double smoothstep5(double s) {
  if (s <= -1) return 0;
  if (s >= 1) return 1;
  double t = 0.5 * (s + 1);
  return t * t * t * (10 + t * (-15 + 6 * t));
}

double smoothstep5_d(double s) {
  if (s <= -1 || s >= 1) return 0;
  double t = 0.5 * (s + 1);
  return 0.5 * 30 * t * t * (1 - t) * (1 - t);
}

double smoothstep5_dd(double s) {
  if (s <= -1 || s >= 1) return 0;
  double t = 0.5 * (s + 1);
  return 0.25 * 60 * t * (1 - t) * (1 - 2 * t);
}

}  // namespace mfch
