#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace mfch {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid user-supplied parameter (maps to CLI exit code 2).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Point outside the physical domain of a potential.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Requested derivative order or feature not available.
class CapabilityError : public Error {
 public:
  using Error::Error;
};

/// Iterative solver failed to converge.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Tangential billiard collision; the reflection law degenerates.
class DegenerateCollisionError : public Error {
 public:
  using Error::Error;
};

/// A constructed billiard spec violates its own assumptions.
class SpecInconsistencyError : public Error {
 public:
  using Error::Error;
};

/// Geometric construction cannot satisfy the reflection law.
class ConstructionError : public Error {
 public:
  using Error::Error;
};

/// Grid too coarse to resolve the requested structure.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// Field state contains non-finite values.
class InvalidStateError : public Error {
 public:
  using Error::Error;
};

/// Time stepper produced NaN/Inf.
class BlowupError : public Error {
 public:
  using Error::Error;
};

/// Parameters of the mFCH model shared across modules.
struct ModelParams {
  double epsilon = 0.1;   // interface width ratio
  double eta1 = 1.0;      // hydrophilicity strength
  double eta2 = 1.0;      // potential tilt strength
  Vec2 m = Vec2::Zero();  // Lagrange multiplier vector
  int N = 2;              // species count (the library implements N = 2)
  int d = 2;              // spatial dimension
  std::vector<double> domain_size = {2 * 3.14159265358979323846,
                                     2 * 3.14159265358979323846};

  void validate() const {
    if (!(epsilon > 0)) throw ParameterError("epsilon must be > 0");
    if (!(eta1 > 0)) throw ParameterError("eta1 must be > 0");
    if (N != 2) throw ParameterError("only N = 2 species are supported");
    if (d != 2 && d != 3) throw ParameterError("d must be 2 or 3");
    for (double L : domain_size)
      if (!(L > 0)) throw ParameterError("domain lengths must be > 0");
  }
};

constexpr double kPi = 3.14159265358979323846;

}  // namespace mfch
