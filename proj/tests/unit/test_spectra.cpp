#include <doctest.h>

#include <cmath>
#include <mfch/spectra.hpp>

using namespace mfch;

namespace {

HomoclinicProfile decoupled_profile(int nodes = 4001) {
  DecoupledCubic W;
  Grid1D g{20.0, nodes};
  ProfileData u(g.nodes, 2);
  for (int i = 0; i < g.nodes; ++i) {
    double s = 1.0 / std::cosh(g.z(i) / 2);
    u(i, 0) = 1.5 * s * s;
    u(i, 1) = 0;
  }
  return solve_homoclinic(W, g, u);
}

}  // namespace

TEST_SUITE_BEGIN("spectra");

TEST_CASE("constant-coefficient operator") {
  DecoupledCubic W;
  Grid1D g{40.0, 2001};
  HomoclinicProfile p;
  p.grid = g;
  p.u = ProfileData::Zero(g.nodes, 2);
  p.du = ProfileData::Zero(g.nodes, 2);
  p.epsilon = 0;
  auto A = assemble_linearization(p, W);
  // storage is symmetric by construction
  CHECK(A.get(5, 3) == A.get(3, 5));
  auto top = A.top_eigenvalues(1);
  // top of spectrum = -lambda_min(hess W(0)) = -1
  CHECK(top[0] == doctest::Approx(-1.0).epsilon(1e-3));
}

TEST_CASE("Poschl-Teller point spectrum and translational kernel") {
  auto p = decoupled_profile();
  DecoupledCubic W;
  auto A = assemble_linearization(p, W);
  auto vals = A.eigenvalues_above(-0.9);
  REQUIRE(vals.size() == 3);
  CHECK(vals[0] == doctest::Approx(-0.75).epsilon(2e-5));
  CHECK(vals[1] == doctest::Approx(0.0).epsilon(1e-4));
  CHECK(std::abs(vals[1]) <= 1e-4);
  CHECK(vals[2] == doctest::Approx(1.25).epsilon(2e-5));

  // kernel eigenvector is the translational mode
  auto v = A.eigenvector(vals[1]);
  Eigen::VectorXd dphi(2 * p.grid.nodes);
  for (int i = 0; i < p.grid.nodes; ++i) {
    dphi[2 * i] = p.du(i, 0);
    dphi[2 * i + 1] = p.du(i, 1);
  }
  double cs = std::abs(v.dot(dphi)) / (v.norm() * dphi.norm());
  CHECK(cs >= 1.0 - 1e-6);

  // cutoff monotonicity
  CHECK(A.count_above(-0.9) >= A.count_above(-0.1));
  CHECK(A.count_above(-0.1) >= A.count_above(1.0));
}

TEST_CASE("limit collision operator") {
  auto spec = universal_billiard(0.875);
  auto tr = trace_homoclinic(spec, kPi / 4);
  REQUIRE(tr.homoclinic);
  auto op = LimitCollisionOperator::from_event(tr.orbit->collisions[0], spec,
                                               Mollifier::polynomial());
  double nu_s = op.nu_scalar();
  double nu_2 = op.nu_2d();
  CHECK(std::abs(nu_s - nu_2) <= 1e-8);
  CHECK(nu_s > 0.1);
  CHECK(nu_s < 1.0);
  // unique positive eigenvalue: nodeless ground state
  CHECK(op.ground_state_sign_changes() == 0);
  // the linearized-coordinate variant is a different, nearby number
  CHECK(op.nu_linearized() == doctest::Approx(nu_s).epsilon(0.1));
  CHECK(op.nu_linearized() != doctest::Approx(nu_s).epsilon(1e-6));
}

TEST_CASE("collision analysis of the one-collision profile") {
  auto spec = universal_billiard(0.875);
  auto tr = trace_homoclinic(spec, kPi / 4);
  REQUIRE(tr.homoclinic);
  Grid1D g{16.0, 8001};
  double delta = 0.15;
  auto prof = solve_billiard_homoclinic(spec, delta, *tr.orbit, g,
                                        Mollifier::polynomial());
  RegularizedBilliard pot(spec, delta);
  auto rep = collision_analysis(prof, pot, *tr.orbit);
  CHECK(rep.theorem_count_ok);
  REQUIRE(rep.collision_eigs.size() == 1);
  CHECK(rep.collision_eigs[0].lambda * delta * delta ==
        doctest::Approx(rep.nu_refs[0]).epsilon(0.05));
  CHECK(rep.collision_eigs[0].localization >= 0.85);
  CHECK(rep.intervals.size() == 1);
  CHECK(rep.ess_edge == doctest::Approx(-2.0));
  CHECK(rep.mollifier_tag == "polynomial-bump");
  // eigenvalues are real by construction (symmetric banded storage)
  write_spectral_report(rep, "/tmp/mfch_report_test.json");
}

TEST_CASE("pearling predictor") {
  PearlingGeometry circle{PearlingGeometry::Kind::Circle, 1.0};
  auto modes = pearling_predictor({4.0}, 0.2, circle);
  REQUIRE(modes.size() == 1);
  CHECK(modes[0].k_star == doctest::Approx(10.0).epsilon(1e-12));
  bool found10 = false;
  for (int k : modes[0].flagged)
    if (k == 10) found10 = true;
  CHECK(found10);

  auto zero = pearling_predictor({0.0}, 0.2, circle);
  CHECK(zero[0].k_star == 0.0);

  CHECK_THROWS_AS(pearling_predictor({-1.0}, 0.2, circle), ParameterError);
  CHECK_THROWS_AS(pearling_predictor({1.0}, 0.0, circle), ParameterError);

  PearlingGeometry flat{PearlingGeometry::Kind::FlatTorus, 2 * kPi};
  auto fm = pearling_predictor({4.0}, 0.2, flat);
  CHECK(fm[0].k_star == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_SUITE_END();
