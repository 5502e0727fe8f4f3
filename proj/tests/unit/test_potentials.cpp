#include <doctest.h>

#include <cmath>
#include <mfch/potentials.hpp>

using namespace mfch;

TEST_SUITE_BEGIN("potentials");

TEST_CASE("mollifier normalization and symmetry") {
  for (auto mol : {Mollifier::polynomial(), Mollifier::standard()}) {
    CHECK(mol.primitive(1.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(mol.primitive(-1.0) == 0.0);
    CHECK(mol.value(1.0) == 0.0);
    CHECK(mol.value(0.3) == doctest::Approx(mol.value(-0.3)).epsilon(1e-14));
    CHECK(mol.value(0.5) > 0.0);
    // primitive consistent with the density
    double h = 1e-6;
    double fd = (mol.primitive(0.2 + h) - mol.primitive(0.2 - h)) / (2 * h);
    CHECK(fd == doctest::Approx(mol.value(0.2)).epsilon(1e-5));
  }
}

TEST_CASE("smooth jump values") {
  Mollifier mol = Mollifier::polynomial();
  auto [v1, d1] = smooth_jump(0.1, 0.2, 0.25, 0.25, mol);
  CHECK(v1 == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(d1 == 0.0);
  auto [v2, d2] = smooth_jump(0.1, 0.0, 0.25, 0.25, mol);
  CHECK(v2 == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(d2 > 0.0);
  auto [v3, d3] = smooth_jump(0.1, -0.15, 0.25, 0.25, mol);
  CHECK(v3 == doctest::Approx(-0.25).epsilon(1e-15));
  CHECK(d3 == 0.0);
  CHECK_THROWS_AS(smooth_jump(0.0, 0.1, 0.25, 0.25, mol), ParameterError);

  // monotone nondecreasing in rho, constant outside the band
  double prev = -1;
  for (int i = 0; i <= 100; ++i) {
    double rho = -0.2 + 0.4 * i / 100;
    double v = smooth_jump(0.1, rho, 0.25, 0.25, mol).first;
    CHECK(v >= prev - 1e-15);
    prev = v;
  }
}

TEST_CASE("universal billiard level set") {
  auto spec = universal_billiard(0.875);
  CHECK_THROWS_AS(universal_billiard(0.9), ParameterError);
  CHECK_THROWS_AS(universal_billiard(-0.1), ParameterError);

  // point on the diagonal inside the plateau
  Vec2 u(0.5, 0.5);
  double rho = spec.rho->value(u);
  CHECK(rho == doctest::Approx(0.875 - std::sqrt(0.5)).epsilon(1e-12));
  CHECK(spec.classify(u, 0.0) == Region::Plateau);

  // the collision curve crosses the diagonal at |u| = c
  Vec2 q = (0.875 / std::sqrt(2.0)) * Vec2(1, 1);
  CHECK(std::abs(spec.rho->value(q)) < 1e-12);
  CHECK(spec.classify(q, 0.1) == Region::Band);

  // quadratic core value
  Vec2 w(0.1, 0.1);
  CHECK(spec.eval(w, 0).value == doctest::Approx(0.02).epsilon(1e-14));

  // unit level-set gradient along the diagonal
  Vec2 g = spec.rho->grad(Vec2(0.6, 0.6));
  CHECK(g.norm() == doctest::Approx(1.0).epsilon(1e-12));

  // admissible smoothing widths cover the figure parameters
  CHECK(spec.delta0 >= 0.2);
}

TEST_CASE("billiard evaluation in each region") {
  auto spec = universal_billiard(0.875);
  Vec2 core = 0.05 * Vec2(0.6, 0.8);
  auto r = spec.eval(core, 2);
  CHECK((r.grad - 2 * core).norm() < 1e-14);
  CHECK((r.hess - 2 * Mat2::Identity()).norm() < 1e-12);

  Vec2 plateau(0.45, 0.45);
  auto p = spec.eval(plateau, 2);
  CHECK(p.value == doctest::Approx(0.25));
  CHECK(p.grad.norm() == 0.0);

  Vec2 well = (1.2 / std::sqrt(2.0)) * Vec2(1, 1);
  CHECK(spec.eval(well, 0).value == doctest::Approx(-0.25));

  CHECK_THROWS_AS(spec.eval(Vec2(-0.5, 0.2), 0), DomainError);
  CHECK_THROWS_AS(spec.eval(core, 3), CapabilityError);
}

TEST_CASE("regularized billiard") {
  auto spec = universal_billiard(0.875);
  RegularizedBilliard pot(spec, 0.2);
  CHECK_THROWS_AS(RegularizedBilliard(spec, 0.6), ParameterError);
  CHECK_THROWS_AS(RegularizedBilliard(spec, -0.1), ParameterError);

  // symmetric-jump midpoint on the collision curve
  Vec2 q = (0.875 / std::sqrt(2.0)) * Vec2(1, 1);
  CHECK(std::abs(pot.eval(q, 0).value) < 1e-12);

  // matches the raw billiard outside the band
  Vec2 plateau(0.45, 0.45);
  CHECK(pot.eval(plateau, 0).value == doctest::Approx(0.25));
  CHECK(pot.eval(Vec2(0.1, 0.1), 0).value == doctest::Approx(0.02));

  // Hessian at the origin is exactly 2 I
  CHECK((pot.hess0() - 2 * Mat2::Identity()).norm() == 0.0);

  // classification is stable under tiny perturbations
  for (double r : {0.05, 0.2, 0.6, 0.875, 1.1}) {
    Vec2 u = (r / std::sqrt(2.0)) * Vec2(1, 1);
    Region reg = pot.classify(u);
    Region reg2 = pot.classify(u + Vec2(1e-13, -1e-13));
    CHECK(reg == reg2);
  }
}

TEST_CASE("finite difference checks") {
  QuadraticWell qw;
  CHECK(finite_difference_gradient_check(qw, Vec2(0.3, -0.7), 1e-5) <= 1e-9);

  auto spec = universal_billiard(0.875);
  RegularizedBilliard pot(spec, 0.2);
  // a band point on the diagonal
  Vec2 band = (0.85 / std::sqrt(2.0)) * Vec2(1, 1);
  CHECK(pot.classify(band) == Region::Band);
  CHECK(finite_difference_gradient_check(pot, band, 1e-6) <= 1e-6);
  // off-diagonal band point exercises the full level-set derivatives
  Vec2 band2 = band + Vec2(0.05, -0.05);
  if (pot.classify(band2) == Region::Band)
    CHECK(finite_difference_gradient_check(pot, band2, 1e-6) <= 1e-6);

  // Hessian symmetric and consistent with second differences
  for (const Vec2& u : {band, Vec2(0.45, 0.45), Vec2(0.05, 0.02)}) {
    Mat2 H = pot.hess(u);
    CHECK((H - H.transpose()).norm() <= 1e-12);
    CHECK(finite_difference_hessian_check(pot, u, 2e-5) <= 2e-4);
  }

  // the raw billiard rejects differencing across its jump
  struct RawAdapter final : Potential {
    BilliardSpec s = universal_billiard(0.875);
    EvalResult eval(const Vec2& u, int order) const override {
      return s.eval(u, order);
    }
    std::string name() const override { return "raw"; }
    bool smooth_near(const Vec2& u, double radius) const override {
      return std::abs(s.rho->value(u)) > radius;
    }
  } raw;
  Vec2 onjump = (0.875 / std::sqrt(2.0)) * Vec2(1, 1);
  CHECK_THROWS_AS(finite_difference_gradient_check(raw, onjump, 1e-6),
                  CapabilityError);
}

TEST_CASE("decoupled cubic potential") {
  DecoupledCubic W;
  CHECK(W.value(Vec2::Zero()) == 0.0);
  CHECK(W.grad(Vec2::Zero()).norm() == 0.0);
  Mat2 H0 = W.hess0();
  CHECK(H0(0, 0) == doctest::Approx(1.0));
  CHECK(H0(1, 1) == doctest::Approx(2.0));
  CHECK(finite_difference_gradient_check(W, Vec2(0.4, -0.2), 1e-5) <= 1e-9);
}

TEST_CASE("solenoidal perturbations") {
  RotationalV V;
  CHECK(V.value(Vec2::Zero()).norm() == 0.0);
  CHECK(V.value(Vec2(0.3, 0.4)) == Vec2(-0.4, 0.3));
  CHECK(V.curl(Vec2(1.7, -2.2)) == doctest::Approx(2.0));
  ZeroV Z;
  CHECK(Z.value(Vec2(1, 1)).norm() == 0.0);
}

TEST_SUITE_END();
