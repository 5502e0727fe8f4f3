#include <doctest.h>

#include <cmath>
#include <mfch/homoclinic.hpp>

using namespace mfch;

namespace {

// exact solitary profile of u'' = u - u^2
double sech2_profile(double z) {
  double s = 1.0 / std::cosh(z / 2);
  return 1.5 * s * s;
}

ProfileData exact_guess(const Grid1D& g, double shift = 0) {
  ProfileData u(g.nodes, 2);
  for (int i = 0; i < g.nodes; ++i) {
    u(i, 0) = sech2_profile(g.z(i) - shift);
    u(i, 1) = 0;
  }
  return u;
}

}  // namespace

TEST_SUITE_BEGIN("homoclinic");

TEST_CASE("exact profile recovery and moments") {
  DecoupledCubic W;
  Grid1D g{20.0, 4001};
  auto p = solve_homoclinic(W, g, exact_guess(g));

  double err = 0;
  for (int i = 0; i < g.nodes; ++i) {
    err = std::max(err, std::abs(p.u(i, 0) - sech2_profile(g.z(i))));
    err = std::max(err, std::abs(p.u(i, 1)));
  }
  CHECK(err <= 1e-6);
  CHECK(p.M[0] == doctest::Approx(6.0).epsilon(1e-7));
  CHECK(std::abs(p.M[1]) <= 1e-6);
  CHECK(p.M1 == doctest::Approx(1.2).epsilon(1e-7));
  CHECK(p.M2 == doctest::Approx(6.0).epsilon(1e-7));

  // Hamiltonian identity |phi'|^2/2 = W(phi) pointwise
  double worst = 0;
  for (int i = 2; i + 2 < g.nodes; ++i) {
    Vec2 du = p.du.row(i);
    worst = std::max(worst,
                     std::abs(0.5 * du.squaredNorm() - W.value(p.u.row(i))));
  }
  CHECK(worst <= 1e-6);

  // even symmetry about the center node
  double asym = 0;
  for (int i = 0; i < g.nodes; ++i)
    asym = std::max(asym, std::abs(p.u(i, 0) - p.u(g.nodes - 1 - i, 0)));
  CHECK(asym <= 1e-8);
}

TEST_CASE("a crude bump guess converges too") {
  DecoupledCubic W;
  Grid1D g{20.0, 2001};
  ProfileData guess(g.nodes, 2);
  for (int i = 0; i < g.nodes; ++i) {
    double z = g.z(i);
    guess(i, 0) = 1.4 * std::exp(-z * z / 6.0);
    guess(i, 1) = 0;
  }
  auto p = solve_homoclinic(W, g, guess);
  CHECK(p.M[0] == doctest::Approx(6.0).epsilon(1e-4));
}

TEST_CASE("zero guess is rejected as trivial") {
  DecoupledCubic W;
  Grid1D g{20.0, 801};
  ProfileData guess = ProfileData::Zero(g.nodes, 2);
  CHECK_THROWS_AS(solve_homoclinic(W, g, guess), ConvergenceError);
}

TEST_CASE("translation invariance of moments") {
  DecoupledCubic W;
  Grid1D g{20.0, 2001};
  auto p0 = solve_homoclinic(W, g, exact_guess(g));
  auto p1 = solve_homoclinic(W, g, exact_guess(g, 0.37));
  CHECK(p0.M[0] == doctest::Approx(p1.M[0]).epsilon(1e-8));
  CHECK(p0.M1 == doctest::Approx(p1.M1).epsilon(1e-8));
  CHECK(p0.M2 == doctest::Approx(p1.M2).epsilon(1e-8));
  // the solved translate follows the guess
  int imax0 = 0, imax1 = 0;
  p0.u.col(0).maxCoeff(&imax0);
  p1.u.col(0).maxCoeff(&imax1);
  CHECK(std::abs((g.z(imax1) - g.z(imax0)) - 0.37) <= 2 * g.h());
}

TEST_CASE("second-order residual under refinement") {
  DecoupledCubic W;
  std::vector<double> res;
  for (int n : {1001, 2001, 4001}) {
    Grid1D g{20.0, n};
    auto p = solve_homoclinic(W, g, exact_guess(g));
    res.push_back(p.defect2);
  }
  double ratio1 = res[0] / res[1];
  double ratio2 = res[1] / res[2];
  CHECK(ratio1 == doctest::Approx(4.0).epsilon(0.15));
  CHECK(ratio2 == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("melnikov coefficient") {
  DecoupledCubic W;
  Grid1D g{20.0, 2001};
  auto p = solve_homoclinic(W, g, exact_guess(g));
  RotationalV V;
  // line-supported profile: V . phi' vanishes identically
  CHECK(melnikov_a0(p, V) == 0.0);
  ZeroV Z;
  CHECK(melnikov_a0(p, Z) == 0.0);
}

TEST_CASE("melnikov equals the shoelace area for planar loops") {
  Vec2 c1(0.6, 0.15), c2(0.15, 0.6);
  auto spec = raytrace_collision_curve(c1, c2);
  auto tr = trace_homoclinic(spec, std::atan2(c1[1], c1[0]));
  REQUIRE(tr.homoclinic);
  Grid1D g{16.0, 6001};
  auto p = solve_billiard_homoclinic(spec, 0.1, *tr.orbit, g,
                                     Mollifier::polynomial());
  RotationalV V;
  double a0 = melnikov_a0(p, V);
  // polygon quadrature of the enclosed area
  double area2 = 0;  // twice the signed area
  for (int i = 0; i + 1 < g.nodes; ++i) {
    area2 += p.u(i, 0) * p.u(i + 1, 1) - p.u(i + 1, 0) * p.u(i, 1);
  }
  double oracle = -area2 / p.M1;
  CHECK(a0 == doctest::Approx(oracle).epsilon(1e-6));
  CHECK(std::abs(a0) > 0.01);  // genuinely asymmetric loop
}

TEST_CASE("epsilon continuation") {
  DecoupledCubic W;
  Grid1D g{20.0, 2001};
  auto p0 = solve_homoclinic(W, g, exact_guess(g));
  RotationalV V;

  SUBCASE("eps = 0 reduces to the base profile") {
    auto p = continue_epsilon(W, p0, V, Vec2::Zero(), 0.0);
    CHECK((p.u - p0.u).cwiseAbs().maxCoeff() == 0.0);
    CHECK(p.melnikov_a == melnikov_a0(p0, V));
  }

  SUBCASE("small eps stays near the base profile, m = 0") {
    auto p = continue_epsilon(W, p0, V, Vec2::Zero(), 0.02);
    CHECK((p.u - p0.u).cwiseAbs().maxCoeff() <= 0.1);
    CHECK(p.far_field.norm() <= 1e-10);  // m = 0 keeps the origin fixed
    CHECK(p.defect2 <= 1e-4);
  }

  SUBCASE("far field expansion with m != 0") {
    Vec2 m(1.0, 0.5);
    Mat2 W0 = W.hess0();
    Vec2 B = W0.inverse() * (W0.inverse() * m);
    for (double eps : {0.04, 0.02}) {
      Vec2 uinf = whisker_equilibrium(W, V, m, eps);
      CHECK((uinf - eps * eps * B).norm() <= 10 * eps * eps * eps);
    }
  }
}

TEST_CASE("correctors") {
  DecoupledCubic W;
  Grid1D g{20.0, 2001};
  auto p = solve_homoclinic(W, g, exact_guess(g));

  SUBCASE("zero right-hand sides give zero correctors") {
    ZeroV Z;
    auto c = correctors(W, p, Z, Vec2::Zero(), 1.0, 1.0);
    CHECK(c.phi1.cwiseAbs().maxCoeff() <= 1e-9);
    CHECK(c.zeta.cwiseAbs().maxCoeff() <= 1e-9);
    CHECK(c.E.norm() == 0.0);
  }

  SUBCASE("far fields match E and the decay of phi1") {
    RotationalV V;
    Vec2 m(1.0, 0.0);
    auto c = correctors(W, p, V, m, 1.0, 2.0);
    CHECK((c.E - Vec2(-1.0, 0.0)).norm() <= 1e-14);
    CHECK((c.B - Vec2(1.0, 0.0)).norm() <= 1e-14);
    CHECK((Vec2(c.zeta.row(0)) - c.E).norm() <= 1e-6);
    CHECK((Vec2(c.zeta.row(g.nodes - 1)) - c.E).norm() <= 1e-6);
    CHECK(Vec2(c.phi1.row(0)).norm() <= 1e-6);
    // kernel orthogonality
    double dot = 0, n1 = 0, n2 = 0;
    for (int i = 1; i + 1 < g.nodes; ++i) {
      Vec2 du = (Vec2(p.u.row(i + 1)) - Vec2(p.u.row(i - 1))) / (2 * g.h());
      dot += du.dot(Vec2(c.phi1.row(i))) * g.h();
      n1 += du.squaredNorm() * g.h();
      n2 += Vec2(c.phi1.row(i)).squaredNorm() * g.h();
    }
    CHECK(std::abs(dot) <= 1e-8 * std::sqrt(n1 * n2));
  }
}

TEST_CASE("universal billiard profile and family diagnostics") {
  auto spec = universal_billiard(0.875);
  auto tr = trace_homoclinic(spec, kPi / 4);
  REQUIRE(tr.homoclinic);
  Grid1D g{16.0, 4001};
  auto p = solve_billiard_homoclinic(spec, 0.15, *tr.orbit, g,
                                     Mollifier::polynomial());
  REQUIRE(p.collision_times.size() == 1);
  CHECK(std::abs(p.collision_times[0]) <= 0.05);
  // the solution stays on the diagonal
  double off = 0;
  for (int i = 0; i < g.nodes; ++i)
    off = std::max(off, std::abs(p.u(i, 0) - p.u(i, 1)));
  CHECK(off <= 1e-8);
  // rotation family: a second near-zero singular value
  CHECK(p.sv_small[0] <= 1e-3 * p.sv_small[1]);
  CHECK(p.degenerate_family);

  // contrast: the ray-traced transversal spec has no extra kernel direction
  Vec2 c1(0.6, 0.15), c2(0.15, 0.6);
  auto rspec = raytrace_collision_curve(c1, c2);
  auto rtr = trace_homoclinic(rspec, std::atan2(c1[1], c1[0]));
  REQUIRE(rtr.homoclinic);
  auto rp = solve_billiard_homoclinic(rspec, 0.15, *rtr.orbit, g,
                                      Mollifier::polynomial());
  CHECK(rp.collision_times.size() == 2);
  CHECK(!rp.degenerate_family);
  CHECK(rp.sv_small[0] > 1e-3 * rp.sv_small[1]);
}

TEST_CASE("family sweep over the cap window") {
  auto spec = universal_billiard(0.875);
  Grid1D g{14.0, 2001};
  auto fam = family_sweep(spec, 0.15, kPi / 4 - 10 * kPi / 180,
                          kPi / 4 + 10 * kPi / 180, 5, g,
                          Mollifier::polynomial());
  int ok = 0;
  for (const auto& m : fam) {
    if (!m.converged) continue;
    ++ok;
    CHECK(m.sv0 <= 1e-3 * m.sv1);
  }
  CHECK(ok >= 4);
}

TEST_SUITE_END();
