#include <doctest.h>

#include <cmath>
#include <mfch/billiard.hpp>

using namespace mfch;

TEST_SUITE_BEGIN("billiard");

TEST_CASE("specular reflection") {
  CHECK((reflect(Vec2(1, 0), Vec2(1, 0)) - Vec2(-1, 0)).norm() < 1e-15);
  Vec2 v = Vec2(1, 1) / std::sqrt(2.0);
  CHECK((reflect(v, Vec2(1, 0)) - Vec2(-1, 1) / std::sqrt(2.0)).norm() < 1e-15);
  Vec2 w = reflect(Vec2(0.3, -0.4), Vec2(0, 1));
  CHECK((w - Vec2(0.3, 0.4)).norm() < 1e-15);
  CHECK(w.norm() == doctest::Approx(0.5));

  // involution
  Vec2 n = Vec2(0.6, 0.8);
  Vec2 v0(0.2, -0.9);
  CHECK((reflect(reflect(v0, n), n) - v0).norm() < 1e-15);

  CHECK_THROWS_AS(reflect(Vec2(1, 0), Vec2(0, 1)), DegenerateCollisionError);
}

TEST_CASE("universal billiard: head-on diagonal homoclinic") {
  auto spec = universal_billiard(0.875);
  auto tr = trace_homoclinic(spec, kPi / 4);
  REQUIRE(tr.homoclinic);
  REQUIRE(tr.orbit->n_collisions() == 1);
  const auto& c = tr.orbit->collisions[0];
  CHECK(c.point.norm() == doctest::Approx(0.875).epsilon(1e-9));
  CHECK(c.point[0] == doctest::Approx(c.point[1]).epsilon(1e-12));
  CHECK(c.z == doctest::Approx(0.0));
  // plateau speed sqrt(2 b+) = sqrt(1/2)
  CHECK(c.v_minus.norm() == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  CHECK((c.v_plus + c.v_minus).norm() < 1e-10);
  CHECK(c.Z == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));
  // energy conservation along the orbit
  CHECK(tr.orbit->energy_defect(spec) <= 1e-10);
}

TEST_CASE("universal billiard: family across the admissible window") {
  auto spec = universal_billiard(0.875);
  // cap-window rays are one-collision head-on homoclinics
  for (double off : {-0.15, -0.05, 0.08, 0.15}) {
    auto tr = trace_homoclinic(spec, kPi / 4 + off);
    CHECK(tr.homoclinic);
    CHECK(tr.orbit->n_collisions() == 1);
  }
  // parabola-zone rays return after two collisions
  for (double off : {-0.35, 0.35}) {
    auto tr = trace_homoclinic(spec, kPi / 4 + off);
    CHECK(tr.homoclinic);
    CHECK(tr.orbit->n_collisions() == 2);
  }
}

TEST_CASE("ray-traced triangle spec") {
  Vec2 c1(0.6, 0.15), c2(0.15, 0.6);
  auto spec = raytrace_collision_curve(c1, c2);
  auto tr = trace_homoclinic(spec, std::atan2(c1[1], c1[0]));
  REQUIRE(tr.homoclinic);
  REQUIRE(tr.orbit->n_collisions() == 2);
  CHECK((tr.orbit->collisions[0].point - c1).norm() < 1e-7);
  CHECK((tr.orbit->collisions[1].point - c2).norm() < 1e-7);
  CHECK(tr.orbit->energy_defect(spec) <= 1e-10);
  CHECK(spec.delta0 > 0.15);

  // time-reversal symmetry: tracing the return ray gives the mirror orbit
  auto rev = trace_homoclinic(spec, tr.orbit->exit_angle);
  REQUIRE(rev.homoclinic);
  CHECK(rev.orbit->n_collisions() == 2);
  CHECK((rev.orbit->collisions[0].point - c2).norm() < 1e-6);
  CHECK((rev.orbit->collisions[1].point - c1).norm() < 1e-6);

  CHECK_THROWS_AS(raytrace_collision_curve(c1, c1), ParameterError);
  CHECK_THROWS_AS(raytrace_collision_curve(Vec2(0.1, 0.05), c2), ParameterError);
}

TEST_CASE("transversality proxy") {
  Vec2 c1(0.6, 0.15), c2(0.15, 0.6);
  auto spec = raytrace_collision_curve(c1, c2);
  auto tr = trace_homoclinic(spec, std::atan2(c1[1], c1[0]));
  REQUIRE(tr.homoclinic);
  auto rep = verify_transversality_proxy(*tr.orbit, spec);
  CHECK(rep.verdict == TransversalityReport::Verdict::Transversal);
  CHECK(rep.fitted_exponent == doctest::Approx(1.0).epsilon(0.2));

  auto uspec = universal_billiard(0.875);
  auto utr = trace_homoclinic(uspec, kPi / 4);
  REQUIRE(utr.homoclinic);
  auto urep = verify_transversality_proxy(*utr.orbit, uspec);
  CHECK(urep.verdict == TransversalityReport::Verdict::DegenerateFamily);

  // rays striking the cap-to-parabola blend do not return to the origin
  auto bad = trace_homoclinic(uspec, kPi / 4 - 13.5 * kPi / 180);
  CHECK(!bad.homoclinic);
}

TEST_SUITE_END();
