#pragma once

#include <string>
#include <vector>

namespace mfch {

/// Even, nonnegative, unit-mass bump supported on [-1, 1].
///
/// The polynomial bump h(t) = (15/16)(1 - t^2)^2 is the default: its
/// primitive is closed-form, so smoothed-jump values and collision
/// eigenvalues are reproducible bit-for-bit.  The classical exponential
/// bump exp(-1/(1-t^2)) is available behind a flag; its normalization and
/// primitive are computed numerically at construction.
class Mollifier {
 public:
  enum class Kind { PolynomialBump, StandardBump };

  static Mollifier polynomial();
  static Mollifier standard();
  static Mollifier from_name(const std::string& name);

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }

  /// h(t); zero for |t| >= 1.
  double value(double t) const;
  /// h'(t).
  double deriv(double t) const;
  /// H(t) = integral of h over [-1, t]; clamps to 0 / 1 outside support.
  double primitive(double t) const;

  double normalization() const { return norm_; }

 private:
  explicit Mollifier(Kind kind);

  Kind kind_;
  std::string name_;
  double norm_ = 1.0;
  // dense table of the primitive for the standard bump
  std::vector<double> table_;
};

}  // namespace mfch
