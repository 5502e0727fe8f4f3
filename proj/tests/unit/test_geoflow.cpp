#include <doctest.h>

#include <cmath>
#include <mfch/geoflow.hpp>
#include <random>

using namespace mfch;

TEST_SUITE_BEGIN("geoflow");

TEST_CASE("stability indicator") {
  auto v1 = stability_K(1.7, 1.0, 3);
  CHECK(v1.K == doctest::Approx(1.0));
  CHECK(v1.name() == "stable");
  auto v2 = stability_K(2.0, -3.3, 2);
  CHECK(v2.K == doctest::Approx(0.5));
  CHECK(v2.name() == "stable");
  auto v3 = stability_K(0.5, -1.0, 3);
  CHECK(v3.K == doctest::Approx(-1.0));
  CHECK(v3.name() == "unstable");
  auto v4 = stability_K(2.0, 0.0, 3);
  CHECK(v4.name() == "neutral");
}

TEST_CASE("radial willmore dichotomy") {
  SUBCASE("a0 > 0 in d = 3: radii equalize") {
    RadialSystem sys{{1.0, 0.8}, 3, 1.0, 1.2, 6.0};
    auto tr = radial_willmore(sys, 50.0);
    CHECK(tr.events.empty());
    auto& last = tr.radii.back();
    CHECK(std::abs(last[0] - last[1]) <= 1e-6);
    CHECK(last[0] == doctest::Approx(std::sqrt(0.82)).epsilon(1e-6));
    CHECK(tr.conserved_drift <= 1e-8);
  }
  SUBCASE("a0 < 0 in d = 3: the small sphere extinguishes") {
    RadialSystem sys{{1.0, 0.8}, 3, -1.0, 1.2, 6.0};
    auto tr = radial_willmore(sys, 50.0);
    REQUIRE(tr.events.size() == 1);
    CHECK(tr.events[0].sphere == 1);
    CHECK(tr.events[0].tau < 50.0);
    double survivor = tr.radii.back()[0];
    CHECK(survivor == doctest::Approx(std::sqrt(1.64)).epsilon(1e-6));
  }
  SUBCASE("a0 = 0 in d = 3: radii frozen") {
    RadialSystem sys{{1.0, 0.8}, 3, 0.0, 1.2, 6.0};
    auto tr = radial_willmore(sys, 10.0);
    CHECK(std::abs(tr.radii.back()[0] - 1.0) <= 1e-10);
    CHECK(std::abs(tr.radii.back()[1] - 0.8) <= 1e-10);
  }
  SUBCASE("d = 2: globally attracting equi-radius state") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uni(0.5, 1.5);
    std::vector<double> R(4);
    for (auto& r : R) r = uni(rng);
    RadialSystem sys{R, 2, 0.7, 1.2, 6.0};
    double rbar = sys.Rbar();
    auto tr = radial_willmore(sys, 400.0);
    for (double r : tr.radii.back())
      CHECK(r == doctest::Approx(rbar).epsilon(1e-6));
  }
}

TEST_CASE("finite-difference Jacobian signs match K") {
  for (auto [d, a0] : std::vector<std::pair<int, double>>{
           {3, 1.0}, {3, -1.0}, {3, 0.0}, {2, 0.7}}) {
    RadialSystem sys{{0.9, 0.9, 0.9}, d, a0, 1.2, 6.0};
    double rb = sys.Rbar();
    Eigen::VectorXd R0 = Eigen::VectorXd::Constant(3, rb);
    // FD Jacobian projected onto the conservation-orthogonal block
    Eigen::MatrixXd J(3, 3);
    double h = 1e-6;
    for (int j = 0; j < 3; ++j) {
      Eigen::VectorXd Rp = R0, Rm = R0;
      Rp[j] += h;
      Rm[j] -= h;
      J.col(j) = (sys.rhs(Rp) - sys.rhs(Rm)) / (2 * h);
    }
    // directions orthogonal to (1,...,1)
    Eigen::VectorXd e1(3), e2(3);
    e1 << 1, -1, 0;
    e2 << 1, 1, -2;
    Eigen::MatrixXd B(3, 2);
    B.col(0) = e1.normalized();
    B.col(1) = e2.normalized();
    Eigen::Matrix2d Jb = B.transpose() * J * B;
    Eigen::EigenSolver<Eigen::Matrix2d> es(Jb);
    double maxre = es.eigenvalues().real().maxCoeff();
    auto K = stability_K(rb, a0, d);
    if (K.K > 1e-12) CHECK(maxre < -1e-9);
    if (K.K < -1e-12) CHECK(maxre > 1e-9);
    if (std::abs(K.K) <= 1e-12) CHECK(std::abs(maxre) <= 1e-9);
  }
}

TEST_CASE("tau1 quench") {
  Tau1State st;
  st.radii = {1.0};
  st.d = 2;
  st.M = Vec2(6, 0);
  st.M2 = 6.0;
  st.hessW0 << 1, 0, 0, 2;
  st.omega = 4 * kPi * kPi;

  SUBCASE("E(0) = 0 is stationary") {
    st.B1 = Vec2(0, 1.0);  // orthogonal to M
    auto tr = tau1_flow(st, 5.0);
    CHECK(std::abs(tr.E.back()) <= 1e-12);
    CHECK(tr.radii.back()[0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK((tr.B1.back() - st.B1).norm() <= 1e-10);
  }

  SUBCASE("E decays monotonically to zero and mass is conserved") {
    st.B1 = Vec2(0.05, 0.02);
    auto tr = tau1_flow(st, 80.0);
    CHECK(std::abs(tr.E.back()) <= 1e-8);
    for (size_t k = 1; k < tr.E.size(); ++k) {
      CHECK(std::abs(tr.E[k]) <= std::abs(tr.E[k - 1]) + 1e-12);
      CHECK(tr.E[k] * tr.E.front() >= -1e-15);  // no sign flip
    }
    CHECK(tr.mass_drift <= 1e-8);
  }

  SUBCASE("B1 vanishes iff the initial mass is proportional to M") {
    // proportional branch: B1(0) along (hessW0^2 M)
    Vec2 dir = (st.hessW0 * st.hessW0) * st.M;
    st.B1 = 0.03 * dir.normalized();
    auto tr = tau1_flow(st, 200.0);
    CHECK(tr.B1.back().norm() <= 1e-7);

    // non-proportional branch: B1 settles onto the M-orthogonal line
    st.B1 = Vec2(0.03, 0.04);
    auto tr2 = tau1_flow(st, 200.0);
    CHECK(tr2.B1.back().norm() >= 1e-3);
    CHECK(std::abs(tr2.B1.back().dot(st.M)) <= 1e-8);
  }
}

TEST_CASE("curvature-weighted projection") {
  int n = 200;
  Eigen::VectorXd H0(n), fv(n);
  for (int i = 0; i < n; ++i) {
    H0[i] = 1.0 + 0.3 * std::sin(2 * kPi * i / n);
    fv[i] = std::cos(6 * kPi * i / n) + 0.2;
  }
  auto p1 = pi_gamma(fv, H0);
  auto p2 = pi_gamma(p1, H0);
  CHECK((p2 - p1).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(std::abs(p1.dot(H0)) <= 1e-10 * fv.norm() * H0.norm());
}

TEST_CASE("planar curve willmore flow") {
  SUBCASE("circles are stationary") {
    auto circ = make_circle(Vec2(0, 0), 1.3, 128, 0.2);
    auto res = curve_willmore(circ, 0.4, 1.2, 6.0, 0.02, 1e-4);
    CHECK(res.max_area_drift <= 1e-8);
  }
  SUBCASE("an ellipse rounds while keeping its length") {
    auto ell = make_ellipse(Vec2(0, 0), 1.4, 0.7, 128, 0.1);
    Eigen::VectorXd k0 = ell.curvatures();
    double spread0 = k0.maxCoeff() - k0.minCoeff();
    auto res = curve_willmore(ell, 0.0, 1.2, 6.0, 0.5, 2e-5);
    CHECK(!res.breakdown);
    CHECK(res.max_area_drift <= 1e-4);
    CHECK(std::abs(res.length.back() - res.length.front()) <=
          1e-4 * res.length.front());
    CHECK(res.max_projection_residual <= 1e-10);
    Eigen::VectorXd k1 = res.geom.curvatures();
    double spread1 = k1.maxCoeff() - k1.minCoeff();
    CHECK(spread1 <= 0.6 * spread0);
  }
}

TEST_SUITE_END();
