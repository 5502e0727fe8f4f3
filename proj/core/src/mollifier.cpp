#include "mfch/mollifier.hpp"

#include <cmath>
#include <stdexcept>

namespace mfch {

namespace {

double exp_bump_raw(double t) {
  if (std::abs(t) >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - t * t));
}

// adaptive Simpson, sufficient for the one-off normalization integral
double simpson(double (*f)(double), double a, double b, int n) {
  double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; i += 2) s += 4 * f(a + i * h);
  for (int i = 2; i < n; i += 2) s += 2 * f(a + i * h);
  return s * h / 3.0;
}

constexpr int kTableSize = 8193;

}  // namespace

Mollifier::Mollifier(Kind kind) : kind_(kind) {
  if (kind_ == Kind::PolynomialBump) {
    name_ = "polynomial-bump";
    norm_ = 15.0 / 16.0;
  } else {
    name_ = "standard-bump";
    norm_ = 1.0 / simpson(&exp_bump_raw, -1.0, 1.0, 1 << 16);
    // cumulative primitive on a uniform grid over [-1, 1]
    table_.resize(kTableSize, 0.0);
    const double h = 2.0 / (kTableSize - 1);
    double acc = 0.0;
    table_[0] = 0.0;
    for (int i = 1; i < kTableSize; ++i) {
      double a = -1.0 + (i - 1) * h;
      double b = -1.0 + i * h;
      double m = 0.5 * (a + b);
      acc += (h / 6.0) *
             (exp_bump_raw(a) + 4 * exp_bump_raw(m) + exp_bump_raw(b));
      table_[i] = acc;
    }
    for (auto& v : table_) v *= norm_;
  }
}

Mollifier Mollifier::polynomial() { return Mollifier(Kind::PolynomialBump); }
Mollifier Mollifier::standard() { return Mollifier(Kind::StandardBump); }

Mollifier Mollifier::from_name(const std::string& name) {
  if (name == "polynomial-bump" || name == "polynomial") return polynomial();
  if (name == "standard-bump" || name == "standard") return standard();
  throw std::invalid_argument("unknown mollifier kind: " + name);
}

double Mollifier::value(double t) const {
  if (std::abs(t) >= 1.0) return 0.0;
  if (kind_ == Kind::PolynomialBump) {
    double q = 1.0 - t * t;
    return norm_ * q * q;
  }
  return norm_ * exp_bump_raw(t);
}

double Mollifier::deriv(double t) const {
  if (std::abs(t) >= 1.0) return 0.0;
  if (kind_ == Kind::PolynomialBump) {
    double q = 1.0 - t * t;
    return norm_ * 2.0 * q * (-2.0 * t);
  }
  double q = 1.0 - t * t;
  return norm_ * exp_bump_raw(t) * (-2.0 * t / (q * q));
}

double Mollifier::primitive(double t) const {
  if (t <= -1.0) return 0.0;
  if (t >= 1.0) return 1.0;
  if (kind_ == Kind::PolynomialBump) {
    // integral of (15/16)(1 - s^2)^2 from -1 to t
    return norm_ * (t - 2.0 * t * t * t / 3.0 + std::pow(t, 5) / 5.0) + 0.5;
  }
  double x = (t + 1.0) / 2.0 * (kTableSize - 1);
  int i = static_cast<int>(x);
  if (i >= kTableSize - 1) i = kTableSize - 2;
  double f = x - i;
  // cubic Hermite: the primitive's slope is the density itself
  const double cell = 2.0 / (kTableSize - 1);
  double t0 = -1.0 + i * cell;
  double d0 = norm_ * exp_bump_raw(t0) * cell;
  double d1 = norm_ * exp_bump_raw(t0 + cell) * cell;
  double y0 = table_[i], y1 = table_[i + 1];
  double f2 = f * f, f3 = f2 * f;
  return (2 * f3 - 3 * f2 + 1) * y0 + (f3 - 2 * f2 + f) * d0 +
         (-2 * f3 + 3 * f2) * y1 + (f3 - f2) * d1;
}

}  // namespace mfch
