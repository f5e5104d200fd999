#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "lvb/bounds.hpp"
#include "lvb/errors.hpp"
#include "oracle.hpp"

using namespace lvb;
namespace fz = oracle::frozen;

namespace {

double Yof(double y) { return y * std::exp(-y); }

}  // namespace

TEST_CASE("family coefficients") {
  const PadeFamilies& f = default_families();
  CHECK(f.linear.c == 0.0);
  CHECK(f.tangent_at_one.c == doctest::Approx((kE - 2.0) / (kE - 1.0)).epsilon(1e-15));
  CHECK(f.tangent_at_e.c == doctest::Approx(1.0 / kE).epsilon(1e-15));
  CHECK(f.two_point_tangent.a == doctest::Approx(fz::a1).epsilon(1e-14));
  CHECK(f.two_point_tangent.c == doctest::Approx(fz::c1).epsilon(1e-14));
  CHECK(f.osculating_at_one.a == doctest::Approx(fz::a2).epsilon(1e-14));
  CHECK(f.osculating_at_one.c == doctest::Approx(fz::c2).epsilon(1e-14));
  CHECK(f.osculating_at_e.a == doctest::Approx(fz::a3).epsilon(1e-14));
  CHECK(f.osculating_at_e.c == doctest::Approx(fz::c3).epsilon(1e-14));
  CHECK(branch_self_check(f));
}

TEST_CASE("every family passes through (1, 0) and (e, 1) with a positive denominator") {
  const PadeFamilies& f = default_families();
  for (const PadeBound* p : {&f.linear, &f.tangent_at_one, &f.tangent_at_e,
                             &f.two_point_tangent, &f.osculating_at_one, &f.osculating_at_e}) {
    CHECK(std::fabs(pade_eval(*p, 1.0)) <= 1e-14);
    CHECK(std::fabs(pade_eval(*p, kE) - 1.0) <= 1e-14);
    CHECK(p->d == doctest::Approx(kE - 1.0 - p->c * kE + p->a * (kE - 1.0) * (kE - 1.0)));
    for (int i = 0; i <= 100; ++i) {
      const double z = 1.0 + (kE - 1.0) * i / 100.0;
      CHECK(p->c * z + p->d > 0.0);
    }
  }
  CHECK(pade_eval(f.tangent_at_one, 1.5) > std::log(1.5));
  CHECK_THROWS_AS(pade_eval(f.linear, 0.5), DomainError);
  CHECK_THROWS_AS(pade_eval(f.linear, 3.0), DomainError);
}

TEST_CASE("exact_z against bisection and frozen values") {
  CHECK(exact_z(1.5) == doctest::Approx(fz::z_y1_5).epsilon(1e-14));
  CHECK(exact_z(2.0) == doctest::Approx(fz::z_y2).epsilon(1e-14));
  CHECK(exact_z(5.0) == doctest::Approx(fz::z_y5).epsilon(1e-14));
  CHECK(exact_z(20.0) == doctest::Approx(fz::z_y20).epsilon(1e-14));
  CHECK(exact_z(2.0) == doctest::Approx(static_cast<double>(oracle::z_of_y(2.0L))).epsilon(1e-14));

  const double z20 = exact_z(20.0);
  CHECK(z20 > 1.0);
  CHECK(z20 < 1.0 + 10.0 * Yof(20.0));
  CHECK(exact_z(25.0) < z20);

  // y -> 1+ drives z to e; the approach is like e - O(sqrt(y - 1)).
  CHECK(exact_z(1.0 + 1e-6) == doctest::Approx(kE).epsilon(1e-2));
  CHECK(exact_z(1.0 + 1e-6) < kE);

  for (double y : {1.5, 2.0, 3.0, 7.0, 15.0, 40.0}) {
    const double z = exact_z(y);
    CHECK(std::fabs(std::log(z) / z - Yof(y)) < 1e-13);
  }
}

TEST_CASE("domain of the z problem") {
  CHECK_THROWS_AS(exact_z(1.0), DomainError);
  CHECK_THROWS_AS(exact_z(0.5), DomainError);
  CHECK_THROWS_AS(exact_z(std::nan("")), DomainError);
  CHECK_THROWS_AS(exact_small_root(-2.0), DomainError);
  CHECK_THROWS_AS(ZProblem::from_y(1.0), DomainError);
  const ZProblem p = ZProblem::from_y(2.0);
  CHECK(p.Y == doctest::Approx(2.0 * std::exp(-2.0)));
}

TEST_CASE("exact_small_root") {
  CHECK(exact_small_root(2.0) == doctest::Approx(fz::x_y2).epsilon(1e-14));
  CHECK(exact_small_root(5.0) == doctest::Approx(fz::x_y5).epsilon(1e-14));
  CHECK(exact_small_root(2.0) ==
        doctest::Approx(static_cast<double>(oracle::small_root(2.0L))).epsilon(1e-14));
  CHECK(exact_small_root(1.0 + 1e-8) == doctest::Approx(1.0).epsilon(1e-3));
  for (double y : {1.01, 1.5, 4.0, 30.0}) {
    CHECK(exact_small_root(y) == doctest::Approx(exact_z(y) * Yof(y)).epsilon(1e-15));
  }
}

TEST_CASE("scaled_small_root") {
  CHECK(scaled_small_root(1.0, 2.0) == exact_small_root(2.0));
  const double x = scaled_small_root(2.0, 4.0);
  CHECK(x == doctest::Approx(2.0 * exact_small_root(2.0)).epsilon(1e-15));
  CHECK(std::fabs(x - 2.0 * std::log(x) - (4.0 - 2.0 * std::log(4.0))) < 1e-12);
  CHECK(scaled_small_root(3.0, 3.0 * (1.0 + 1e-9)) == doctest::Approx(3.0).epsilon(1e-3));
  CHECK_THROWS_AS(scaled_small_root(2.0, 1.5), DomainError);
  CHECK_THROWS_AS(scaled_small_root(0.0, 1.5), DomainError);
}

TEST_CASE("first-order bounds") {
  const FirstOrderZBounds b = first_order_z_bounds(0.2);
  CHECK(b.z1 == doctest::Approx(fz::z1_Y0_2).epsilon(1e-14));
  CHECK(b.z2 == doctest::Approx(fz::z2_Y0_2).epsilon(1e-14));
  CHECK(b.z0 == doctest::Approx(fz::z0_Y0_2).epsilon(1e-14));

  const double z = exact_z(2.0);
  const FirstOrderZBounds b2 = first_order_z_bounds(Yof(2.0));
  CHECK(1.0 < b2.z1);
  CHECK(b2.z1 < z);
  CHECK(z < b2.z2);
  CHECK(b2.z2 < b2.z0);
  CHECK(b2.z0 < kE);

  // Y -> 0: all collapse onto 1 without cancellation.
  const FirstOrderZBounds tiny = first_order_z_bounds(1e-300);
  CHECK(tiny.z1 == 1.0);
  CHECK(tiny.z2 == 1.0);
  CHECK(tiny.z0 == 1.0);
  const FirstOrderZBounds small = first_order_z_bounds(1e-10);
  CHECK(small.z1 - 1.0 == doctest::Approx(1e-10).epsilon(1e-6));

  // At Y = 1/e, through the closed-interval root.
  const PadeFamilies& f = default_families();
  CHECK(pade_z_root(f.linear, kInvE) == doctest::Approx(kE).epsilon(1e-12));
  CHECK(1.0 / (1.0 - (kE - 1.0) / kE) == doctest::Approx(kE).epsilon(1e-15));
  // tangent_at_e touches ln at e, so its root there is a double root.
  CHECK(pade_z_root(f.tangent_at_e, kInvE) == doctest::Approx(kE).epsilon(1e-7));
  // tangent_at_one crosses Y = 1/e at 1/c1 < e, its other intersection with z/e.
  CHECK(pade_z_root(f.tangent_at_one, kInvE) ==
        doctest::Approx(1.0 / f.tangent_at_one.c).epsilon(1e-12));
}

TEST_CASE("bound domain errors") {
  CHECK_THROWS_AS(first_order_z_bounds(0.0), DomainError);
  CHECK_THROWS_AS(first_order_z_bounds(-0.1), DomainError);
  CHECK_THROWS_AS(first_order_z_bounds(kInvE), DomainError);
  CHECK_THROWS_AS(second_order_z_bounds(0.5), DomainError);
  CHECK_THROWS_AS(pade_z_root(default_families().linear, 0.4), DomainError);
}

TEST_CASE("second-order bounds") {
  const SecondOrderZBounds b = second_order_z_bounds(0.2);
  CHECK(b.tz1 == doctest::Approx(fz::tz1_Y0_2).epsilon(1e-14));
  CHECK(b.tz2 == doctest::Approx(fz::tz2_Y0_2).epsilon(1e-14));
  CHECK(b.tz3 == doctest::Approx(fz::tz3_Y0_2).epsilon(1e-14));
  CHECK(b.tz1 < fz::z_Y0_2);
  CHECK(fz::z_Y0_2 < b.upper());

  const double Y = Yof(2.0);
  const double z = exact_z(2.0);
  const SecondOrderZBounds s = second_order_z_bounds(Y);
  const FirstOrderZBounds f = first_order_z_bounds(Y);
  CHECK(s.tz1 < z);
  CHECK(z < s.tz2);
  CHECK(z < s.tz3);
  CHECK(s.upper() - s.tz1 < f.z2 - f.z1);

  const SecondOrderZBounds tiny = second_order_z_bounds(1e-300);
  CHECK(tiny.tz1 == 1.0);
  CHECK(tiny.tz2 == 1.0);
  CHECK(tiny.tz3 == 1.0);

  // At Y = 1/e the osculating-at-one root is simple; the other two are
  // double roots and only good to about sqrt(eps).
  const PadeFamilies& fam = default_families();
  CHECK(pade_z_root(fam.osculating_at_one, kInvE) == doctest::Approx(kE).epsilon(1e-12));
  CHECK(pade_z_root(fam.two_point_tangent, kInvE) == doctest::Approx(kE).epsilon(1e-7));
  CHECK(pade_z_root(fam.osculating_at_e, kInvE) == doctest::Approx(kE).epsilon(1e-7));
}

TEST_CASE("roots satisfy their quadratic across the sign change of cY - a") {
  const PadeFamilies& fam = default_families();
  for (const PadeBound* p : {&fam.two_point_tangent, &fam.osculating_at_one,
                             &fam.osculating_at_e, &fam.tangent_at_one, &fam.tangent_at_e}) {
    for (int i = 1; i < 400; ++i) {
      const double Y = kInvE * i / 400.0;
      const double z = pade_z_root(*p, Y);
      REQUIRE(z >= 1.0);
      REQUIRE(z <= kE);
      CHECK(std::fabs((*p)(z) / z - Y) < 1e-12);
    }
  }
}

TEST_CASE("bound side agrees with the sign of x - ln x") {
  // x - ln x decreases on (0, 1): a lower estimate of x sits above the level.
  for (double y : {1.2, 2.0, 3.5, 8.0}) {
    const double Y = Yof(y);
    const double level = y - std::log(y);
    auto g = [](double x) { return x - std::log(x); };
    const FirstOrderZBounds f = first_order_z_bounds(Y);
    const SecondOrderZBounds s = second_order_z_bounds(Y);
    CHECK(g(f.z1 * Y) > level);
    CHECK(g(s.tz1 * Y) > level);
    CHECK(g(f.z2 * Y) < level);
    CHECK(g(f.z0 * Y) < level);
    CHECK(g(s.tz2 * Y) < level);
    CHECK(g(s.tz3 * Y) < level);
  }
}

TEST_CASE("ordering chains on random y") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> logy(std::log(1.001), std::log(100.0));
  for (int i = 0; i < 2000; ++i) {
    const double y = std::exp(logy(rng));
    const double Y = Yof(y);
    const double z = static_cast<double>(oracle::z_of_y(y));
    const FirstOrderZBounds f = first_order_z_bounds(Y);
    const SecondOrderZBounds s = second_order_z_bounds(Y);
    CHECK(f.z1 <= z + 1e-12);
    CHECK(z <= f.z2 + 1e-12);
    CHECK(f.z2 <= f.z0 + 1e-12);
    CHECK(s.tz1 <= z + 1e-12);
    CHECK(z <= s.upper() + 1e-12);
    CHECK(exact_z(y) == doctest::Approx(z).epsilon(1e-12));
  }
}

TEST_CASE("second-order families lie on the expected side of ln") {
  const PadeFamilies& fam = default_families();
  for (int i = 1; i < 1000; ++i) {
    const double z = 1.0 + (kE - 1.0) * i / 1000.0;
    const double ln = std::log(z);
    CHECK(fam.two_point_tangent(z) > ln);
    CHECK(fam.osculating_at_one(z) < ln);
    CHECK(fam.osculating_at_e(z) < ln);
    CHECK(fam.linear(z) < fam.tangent_at_e(z));
    CHECK(fam.tangent_at_e(z) < ln);
    CHECK(ln < fam.tangent_at_one(z));
  }
}
