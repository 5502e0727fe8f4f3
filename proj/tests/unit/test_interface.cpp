#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <mfch/dressing.hpp>
#include <mfch/fft.hpp>

using namespace mfch;

namespace {

HomoclinicProfile decoupled_profile(double L, int nodes) {
  DecoupledCubic W;
  Grid1D g{L, nodes};
  ProfileData u(g.nodes, 2);
  for (int i = 0; i < g.nodes; ++i) {
    double s = 1.0 / std::cosh(g.z(i) / 2);
    u(i, 0) = 1.5 * s * s;
    u(i, 1) = 0;
  }
  return solve_homoclinic(W, g, u);
}

}  // namespace

TEST_SUITE_BEGIN("interface");

TEST_CASE("admissibility") {
  auto circle = make_circle(Vec2(kPi, kPi), 1.0, 256, 0.2);
  auto rep = check_admissible(circle, 0.1, 0.2);
  CHECK(rep.pass);
  CHECK(rep.curvature_bound == doctest::Approx(0.6));

  auto rep2 = check_admissible(circle, 0.1, 0.5);
  CHECK(!rep2.pass);
  CHECK(rep2.curvature_bound >= 1.0);

  // dumbbell with a thin neck: whiskers from opposite neck sides intersect
  auto db = make_dumbbell(Vec2(kPi, kPi), 0.55, 0.4, 512, 0.2);
  auto rep3 = check_admissible(db, 0.1, 0.2);
  CHECK(!rep3.pass);
}

TEST_CASE("cyclic spline second derivative") {
  int n = 256;
  double h = 2 * kPi / n;
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) y[i] = std::sin(3 * i * h);
  auto m = cyclic_spline_second_derivative(y, h);
  for (int i = 0; i < n; i += 17)
    CHECK(m[i] == doctest::Approx(-9 * std::sin(3 * i * h)).epsilon(1e-3));
}

TEST_CASE("curvature of circle and ellipse") {
  auto circ = make_circle(Vec2(0, 0), 2.0, 256, 0.2);
  CHECK(circ.curvatures()[17] == doctest::Approx(0.5));
  auto ell = make_ellipse(Vec2(0, 0), 2.0, 1.0, 512, 0.1);
  auto k = ell.curvatures();
  // ends of the major axis carry maximal curvature a/b^2 = 2
  CHECK(k.maxCoeff() == doctest::Approx(2.0).epsilon(0.02));
  CHECK(k.minCoeff() == doctest::Approx(0.25).epsilon(0.02));
}

TEST_CASE("dressing a circle") {
  auto profile = decoupled_profile(24.0, 4801);
  ModelParams params;
  params.epsilon = 0.1;
  params.eta1 = params.eta2 = 1.0;
  auto geom = make_circle(Vec2(kPi, kPi), 1.6, 512, 0.5);
  auto f = dress(geom, profile, params, 512, 512);

  // far-field cells sit at the equilibrium (m = 0: the origin)
  double far_err = 0;
  for (int iy = 0; iy < f.ny; iy += 7) {
    for (int ix = 0; ix < f.nx; ix += 7) {
      Vec2 x(f.x(ix), f.y(iy));
      double d = std::abs((x - Vec2(kPi, kPi)).norm() - 1.6);
      if (d >= 3 * 0.5) {
        size_t idx = static_cast<size_t>(iy) * f.nx + ix;
        far_err = std::max(far_err, std::abs(f.u1[idx]) + std::abs(f.u2[idx]));
      }
    }
  }
  CHECK(far_err <= 1e-6);

  // rotation by pi about the center maps the field onto itself
  double sym = 0;
  for (int iy = 1; iy < f.ny; iy += 13) {
    for (int ix = 1; ix < f.nx; ix += 13) {
      int jx = (f.nx - ix) % f.nx, jy = (f.ny - iy) % f.ny;
      // grid point x and its rotation 2c - x coincide for c = (pi,pi)
      sym = std::max(sym, std::abs(f.u1[size_t(iy) * f.nx + ix] -
                                   f.u1[size_t(jy) * f.nx + jx]));
    }
  }
  CHECK(sym <= 1e-9);

  // resolution guard
  CHECK_THROWS_AS(dress(geom, profile, params, 64, 64), ResolutionError);

  // binary roundtrip
  write_mfch(f, "/tmp/mfch_field_test.mfch");
  auto f2 = read_mfch("/tmp/mfch_field_test.mfch");
  CHECK(f2.nx == f.nx);
  CHECK(f2.u1 == f.u1);
  CHECK(f2.u2 == f.u2);
  write_pgm(f, 0, "/tmp/mfch_field_test.pgm");
}

TEST_CASE("energy of trivial fields") {
  DecoupledCubic W;
  RotationalV V;
  FieldState f;
  f.resize(64, 64);
  f.params.epsilon = 0.2;
  CHECK(energy_full(f, W, V) == doctest::Approx(0.0).epsilon(1e-14));

  // constant field: integrand becomes a closed-form constant
  Vec2 c(0.3, -0.1);
  for (auto& v : f.u1) v = c[0];
  for (auto& v : f.u2) v = c[1];
  double eps = f.params.epsilon;
  Vec2 G = -W.grad(c) + eps * V.value(c);
  double integrand =
      0.5 * G.squaredNorm() - eps * eps * f.params.eta2 * W.value(c);
  double omega = f.Lx * f.Ly;
  CHECK(energy_full(f, W, V) ==
        doctest::Approx(omega * integrand).epsilon(1e-12));
  CHECK(mass_full(f)[0] == doctest::Approx(omega * c[0] / eps).epsilon(1e-12));

  // translation invariance under periodic shift
  FieldState g = f;
  for (int iy = 0; iy < 64; ++iy)
    for (int ix = 0; ix < 64; ++ix) {
      g.u1[size_t(iy) * 64 + ix] = 0.1 * std::sin(2 * kPi * ix / 64.0) *
                                   std::cos(2 * kPi * iy / 32.0);
      g.u2[size_t(iy) * 64 + ix] = 0.05 * std::cos(2 * kPi * ix / 32.0);
    }
  double e0 = energy_full(g, W, V);
  FieldState gs = g;
  for (int iy = 0; iy < 64; ++iy)
    for (int ix = 0; ix < 64; ++ix) {
      gs.u1[size_t(iy) * 64 + ix] = g.u1[size_t(iy) * 64 + (ix + 5) % 64];
      gs.u2[size_t(iy) * 64 + ix] = g.u2[size_t(iy) * 64 + (ix + 5) % 64];
    }
  CHECK(energy_full(gs, W, V) == doctest::Approx(e0).epsilon(1e-10));
}

TEST_CASE("sharp-interface energy quadratures") {
  ModelParams params;
  params.epsilon = 0.1;
  params.eta1 = params.eta2 = 1.0;
  // flat interface of length 2 pi: -2.4 pi eps^3
  Eigen::VectorXd H0 = Eigen::VectorXd::Zero(256);
  double e = energy_sharp_from_curvature(H0, 2 * kPi, 0.0, 1.2, params);
  CHECK(e == doctest::Approx(-2.4 * kPi * std::pow(0.1, 3)).epsilon(1e-12));

  // vanishing integrand: H0 = a0 and eta1 + eta2 = 0 is outside the
  // parameter space (eta1 > 0), so check via the raw quadrature
  ModelParams p2 = params;
  p2.eta1 = 0.5;
  p2.eta2 = -0.5;
  auto circ = make_circle(Vec2(0, 0), 2.0, 256, 0.2);
  CHECK(energy_sharp(circ, 0.5, 1.2, p2) ==
        doctest::Approx(0.0).epsilon(1e-12));

  // minimum over R at 1/a0 when eta1 + eta2 = 0
  double a0 = 2.0;
  auto ER = [&](double R) {
    return energy_sharp(make_circle(Vec2(0, 0), R, 128, 0.05), a0, 1.2, p2);
  };
  double Rstar = 1.0 / a0;
  CHECK(ER(Rstar) < ER(Rstar * 1.1));
  CHECK(ER(Rstar) < ER(Rstar * 0.9));

  // sphere family in d = 3 uses H0 = (d-1)/R
  auto spheres = make_spheres({1.0}, 0.1);
  double es = energy_sharp(spheres, 0.0, 1.2, p2);
  CHECK(es == doctest::Approx(std::pow(0.1, 3) * 0.5 * 1.2 * 4 * kPi * 4.0)
                  .epsilon(1e-12));
}

TEST_CASE("mass reductions") {
  auto profile = decoupled_profile(24.0, 4801);
  ModelParams params;
  params.epsilon = 0.1;
  params.eta1 = params.eta2 = 1.0;
  auto geom = make_circle(Vec2(kPi, kPi), 1.6, 512, 0.5);

  // even profile: the z-moment vanishes
  CHECK(profile.zM.norm() <= 1e-8);

  DecoupledCubic W;

  SUBCASE("V = 0: the eps-order bracket vanishes and mass_sharp = |Gamma| M") {
    ZeroV V0;
    auto corr = correctors(W, profile, V0, Vec2::Zero(), 1.0, 1.0);
    CHECK(corr.int_phi1.norm() <= 1e-8);
    auto f = dress(geom, profile, params, 512, 512);
    Vec2 lead = geom.total_area() * profile.M;
    Vec2 msharp = mass_sharp(geom, profile, corr, params);
    CHECK((msharp - lead).norm() <= 1e-8);
    CHECK((mass_full(f) - lead).norm() <= 0.1 * params.epsilon * lead.norm());
  }

  SUBCASE("V rotational: the continued profile carries the phi1 mass") {
    RotationalV V;
    auto corr = correctors(W, profile, V, Vec2::Zero(), 1.0, 1.0);
    auto cont = continue_epsilon(W, profile, V, Vec2::Zero(), params.epsilon);
    auto f = dress(geom, cont, params, 512, 512);
    Vec2 lead = geom.total_area() * profile.M;
    Vec2 msharp = mass_sharp(geom, profile, corr, params);
    Vec2 mfull = mass_full(f);
    // the eps-order bracket is a genuinely large correction here
    CHECK((msharp - lead).norm() >= 1.0);
    CHECK((mfull - msharp).norm() <= 0.2 * (mfull - lead).norm());
  }
}

TEST_SUITE_END();
