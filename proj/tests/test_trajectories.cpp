#include <doctest.h>

#include <cmath>
#include <random>

#include "lvb/bounds.hpp"
#include "lvb/errors.hpp"
#include "lvb/lambert.hpp"
#include "lvb/trajectories.hpp"
#include "oracle.hpp"

using namespace lvb;
namespace fz = oracle::frozen;

namespace {

IntegrationOptions long_run() {
  IntegrationOptions o;
  o.t_max = 1e6;
  return o;
}

// Dimensional RM: dS/dt = r S (1 - S/K) - q S X / (A + S),
// dX/dt = p S X / (A + S) - d X.
Rates dimensional_rm(const RMPhysicalParams& p, double S, double X) {
  return {p.r * S * (1.0 - S / p.K) - p.q * S * X / (p.A + S),
          p.p * S * X / (p.A + S) - p.d * X};
}

}  // namespace

TEST_CASE("system constructors validate parameters") {
  CHECK_THROWS_AS(make_lotka_volterra(0.0), DomainError);
  CHECK_THROWS_AS(make_lotka_volterra(-1.0), DomainError);
  CHECK_THROWS_AS(make_rosenzweig_macarthur(0.0, 0.3, 0.1), DomainError);
  CHECK_THROWS_AS(make_rosenzweig_macarthur(1.0, 1.0, 0.1), DomainError);
  CHECK_THROWS_AS(make_rosenzweig_macarthur(1.0, 0.0, 0.1), DomainError);
  CHECK_THROWS_AS(make_rosenzweig_macarthur(1.0, 0.3, 0.0), DomainError);
  CHECK(make_rosenzweig_macarthur(1.0, 0.3, 0.1).h(0.3) == doctest::Approx(0.28));
}

TEST_CASE("general systems check phi and Phi") {
  auto H = [](double S) { return S * (1.0 - S); };
  auto phi = [](double S) { return S / (0.2 + S); };
  auto Phi = [](double S) { return S + 0.2 * std::log(S); };
  CHECK_NOTHROW(make_general(H, phi, Phi, 2.0, 1.0, 1.0));
  CHECK_THROWS_AS(make_general(H, phi, [](double S) { return S + 0.3 * std::log(S); }, 2.0,
                               1.0, 1.0),
                  DomainError);
  CHECK_THROWS_AS(make_general(H, [](double S) { return S + 1.0; },
                               [](double S) { return std::log(S + 1.0); }, 2.0, 1.0, 1.0),
                  DomainError);
  CHECK_THROWS_AS(make_general(H, [](double S) { return S * (2.0 - S); },
                               [](double S) { return 0.5 * std::log(S / (2.0 - S)); }, 2.0,
                               1.0, 1.0, 0.01, 1.9),
                  DomainError);
  CHECK_THROWS_AS(make_general(H, phi, Phi, 2.0, 0.0, 1.0), DomainError);
}

TEST_CASE("rhs") {
  const LotkaVolterra lv{1.0};
  const Rates eq = rhs(lv, {0.0, 1.0, 1.0});
  CHECK(eq.ds == 0.0);
  CHECK(eq.dx == 0.0);
  const Rates r = rhs(lv, {0.0, 2.0, 2.0});
  CHECK(r.ds == -2.0);
  CHECK(r.dx == 2.0);

  const RosenzweigMacArthur rm = make_rosenzweig_macarthur(1.3, 0.3, 0.1);
  const Rates iso = rhs(rm, {0.0, rm.lambda, rm.h(rm.lambda)});
  CHECK(iso.ds == doctest::Approx(0.0));
  CHECK(iso.dx == 0.0);

  CHECK_THROWS_AS(rhs(lv, {0.0, 0.0, 1.0}), DomainError);
  CHECK_THROWS_AS(rhs(lv, {0.0, 1.0, -1.0}), DomainError);
}

TEST_CASE("general form reproduces LV and RM") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.05, 3.0);
  const LotkaVolterra lv{1.7};
  const RosenzweigMacArthur rm = make_rosenzweig_macarthur(0.8, 0.25, 0.15);
  const GeneralSystem glv = as_general(lv);
  const GeneralSystem grm = as_general(rm);
  for (int i = 0; i < 100; ++i) {
    const TrajectoryState st{0.0, u(rng), u(rng)};
    const Rates a = rhs(lv, st);
    const Rates b = rhs(glv, st);
    CHECK(a.ds == doctest::Approx(b.ds).epsilon(1e-14));
    CHECK(a.dx == doctest::Approx(b.dx).epsilon(1e-14));
    const Rates c = rhs(rm, st);
    const Rates d = rhs(grm, st);
    CHECK(c.ds == doctest::Approx(d.ds).epsilon(1e-13));
    CHECK(c.dx == doctest::Approx(d.dx).epsilon(1e-13));
  }
}

TEST_CASE("general form scales the predator by q") {
  auto H = [](double S) { return S * (1.0 - S); };
  auto phi = [](double S) { return S; };
  auto Phi = [](double S) { return std::log(S); };
  const GeneralSystem g = make_general(H, phi, Phi, 2.0, 3.0, 0.5);
  const Rates r = rhs(g, {0.0, 0.4, 0.7});
  CHECK(r.ds == doctest::Approx(0.4 * 0.6 - 3.0 * 0.4 * 0.7));
  CHECK(r.dx == doctest::Approx(2.0 * 0.4 * 0.7 - 0.5 * 0.7));
  // V uses q X so that its rate keeps the (p phi - d)(F - Fbar) form.
  const TrajectoryState st{0.0, 0.4, 0.7};
  const double v = generalized_V(g, 0.2, st);
  CHECK(v == doctest::Approx(2.0 * 0.4 - 0.5 * std::log(0.4) + 2.1 - 0.2 * std::log(2.1)));
  CHECK(generalized_V_rate(g, 0.2, st) == doctest::Approx((2.0 * 0.4 - 0.5) * (0.6 - 0.2)));
}

TEST_CASE("lyapunov_V") {
  CHECK(lyapunov_V({1.0}, {0.0, 1.0, 1.0}) == 2.0);
  CHECK(lyapunov_V({2.0}, {0.0, 1.0, 1.0}) == 1.5);
  CHECK(lyapunov_V({1.0}, {0.0, 2.0, 2.0}) == doctest::Approx(2.0 * (2.0 - std::log(2.0))));
  CHECK_THROWS_AS(lyapunov_V({1.0}, {0.0, 0.0, 1.0}), DomainError);
}

TEST_CASE("generalized_V for RM") {
  const RosenzweigMacArthur rm = make_rosenzweig_macarthur(1.4, 0.3, 0.1);
  CHECK(generalized_V(rm, 0.123, {0.0, 1.0, 1.0}) == doctest::Approx(rm.m + 1.0));
  CHECK(generalized_V_rate(rm, 0.2, {0.0, rm.lambda, 0.9}) == 0.0);
  CHECK_THROWS_AS(generalized_V(rm, 0.0, {0.0, 1.0, 1.0}), DomainError);
}

TEST_CASE("V rate matches finite differences along an RM arc") {
  const RosenzweigMacArthur rm = make_rosenzweig_macarthur(1.0, 0.3, 0.1);
  const RmReturn r = rm_next_intersection(rm, 1.0, rm.lambda, long_run());
  const auto& arc = r.trajectory.samples;
  const double F_up = rm.h(rm.lambda);
  IntegrationOptions shortrun;
  shortrun.t_max = 1e-6;
  shortrun.initial_step = 1e-6;
  int checked = 0;
  for (std::size_t i = 1; i + 1 < arc.size(); i += arc.size() / 20) {
    const IntegrationResult piece = integrate(rm, arc[i], std::nullopt, shortrun);
    const double dt = piece.final_state.tau - arc[i].tau;
    const double fd =
        (generalized_V(rm, F_up, piece.final_state) - generalized_V(rm, F_up, arc[i])) / dt;
    const double exact = generalized_V_rate(rm, F_up, arc[i]);
    // Forward difference: O(dt) truncation plus rounding of V / dt.
    CHECK(fd == doctest::Approx(exact).epsilon(1e-3).scale(1e-5));
    // With Fbar above F on the arc and s < lambda, both factors are negative.
    if (arc[i].s < rm.lambda * (1.0 - 1e-6)) CHECK(exact >= 0.0);
    ++checked;
  }
  CHECK(checked >= 10);
}

TEST_CASE("integrate: equilibrium runs to t_max") {
  IntegrationOptions o;
  o.t_max = 50.0;
  const IntegrationResult r =
      integrate(LotkaVolterra{1.0}, {0.0, 1.0, 1.0},
                LevelEvent{StateVariable::Prey, 2.0, Crossing::Any, 1}, o);
  CHECK(r.reason == StopReason::MaxTime);
  CHECK(r.final_state.tau == doctest::Approx(50.0));
  for (const auto& st : r.samples) {
    CHECK(st.s == 1.0);
    CHECK(st.x == 1.0);
  }
}

TEST_CASE("integrate: one and two LV cycles") {
  const LotkaVolterra lv{1.0};
  const TrajectoryState start{0.0, 2.0, 2.0};
  const double v0 = lyapunov_V(lv, start);
  // ds < 0 at the start, so the cycle closes on a falling crossing.
  LevelEvent ev{StateVariable::Prey, 2.0, Crossing::Falling, 1};
  const IntegrationResult one = integrate(lv, start, ev);
  REQUIRE(one.reason == StopReason::Event);
  CHECK(std::fabs(one.final_state.s - 2.0) < 1e-10);
  CHECK(one.final_state.x == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(one.event_residual < 1e-10);
  double drift = 0.0;
  for (const auto& st : one.samples) drift = std::max(drift, std::fabs(lyapunov_V(lv, st) - v0));
  CHECK(drift < 1e-8);

  ev.occurrence = 2;
  const IntegrationResult two = integrate(lv, start, ev);
  REQUIRE(two.reason == StopReason::Event);
  CHECK(two.final_state.tau == doctest::Approx(2.0 * one.final_state.tau).epsilon(1e-7));

  // The rising crossing comes first, halfway round.
  const IntegrationResult rising =
      integrate(lv, start, LevelEvent{StateVariable::Prey, 2.0, Crossing::Rising, 1});
  CHECK(rising.final_state.tau < one.final_state.tau);
  CHECK(rising.final_state.x < 1.0);
}

TEST_CASE("integrate: positivity and failures") {
  const LotkaVolterra lv{1.0};
  // A large orbit reaching s ~ 1e-6 stays positive.
  const IntegrationResult r =
      integrate(lv, {0.0, 15.0, 2.0}, LevelEvent{StateVariable::Prey, 15.0, Crossing::Falling, 1});
  REQUIRE(r.reason == StopReason::Event);
  for (const auto& st : r.samples) {
    CHECK(st.s > 0.0);
    CHECK(st.x > 0.0);
  }
  IntegrationOptions tight;
  tight.min_step = 0.5;
  tight.initial_step = 1.0;
  CHECK_THROWS_AS(integrate(lv, {0.0, 15.0, 1.0}, std::nullopt, tight), IntegrationError);
  CHECK_THROWS_AS(integrate(lv, {0.0, -1.0, 1.0}, std::nullopt), DomainError);
  CHECK_THROWS_AS(integrate(lv, {0.0, 1.0, 1.0}, LevelEvent{StateVariable::Prey, 0.0}),
                  DomainError);
}

TEST_CASE("LV return bounds") {
  const ReturnBounds b = lv_return_bounds(StateVariable::Prey, 2.0);
  const double Y = 2.0 * std::exp(-2.0);
  CHECK(b.Y == doctest::Approx(Y));
  CHECK(b.lower < fz::x_y2);
  CHECK(fz::x_y2 < b.upper);
  CHECK(b.upper < b.z0_upper);
  CHECK(b.trivial_lower == doctest::Approx(Y));
  CHECK(b.trivial_upper == doctest::Approx(kE * Y));

  // v -> 1: the upper end tends to 1, the lower end to 1/(c e) of the
  // tangent-at-one family.
  const ReturnBounds near = lv_return_bounds(StateVariable::Predator, 1.0 + 1e-6);
  CHECK(near.upper == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(near.z0_upper == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(near.lower ==
        doctest::Approx(1.0 / (default_families().tangent_at_one.c * kE)).epsilon(1e-4));
  CHECK_THROWS_AS(lv_return_bounds(StateVariable::Prey, 1.0), DomainError);
}

TEST_CASE("LV next intersection matches the conserved quantity") {
  const LotkaVolterra lv{1.0};
  const LvReturn left = lv_next_intersection(lv, 2.0, 2.0, StateVariable::Prey);
  CHECK(left.intersection.contained());
  CHECK(left.intersection.crossing_value == doctest::Approx(fz::x_y2).epsilon(1e-9));
  CHECK(left.intersection.level == 2.0);
  CHECK(left.max_v_drift < 1e-8);
  CHECK(left.intersection.refinement_residual < 1e-10);

  const LvReturn right = lv_next_intersection(lv, 2.0, 0.5, StateVariable::Predator);
  CHECK(right.intersection.contained());
  CHECK(right.intersection.crossing_value == doctest::Approx(fz::x_y2).epsilon(1e-9));
  CHECK(right.max_v_drift < 1e-8);

  CHECK_THROWS_AS(lv_next_intersection(lv, 1.0, 0.5, StateVariable::Predator), DomainError);
}

TEST_CASE("LV containment on random starts") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> level(1.001, 5.0);
  std::uniform_real_distribution<double> other(0.2, 3.0);
  std::uniform_real_distribution<double> alpha(0.5, 2.0);
  for (int i = 0; i < 30; ++i) {
    const LotkaVolterra lv{alpha(rng)};
    const double s0 = level(rng);
    double x0 = other(rng);
    if (std::fabs(x0 - 1.0) < 1e-3) x0 += 0.01;
    const LvReturn r = lv_next_intersection(lv, x0, s0, StateVariable::Prey);
    CHECK(r.intersection.contained());
    // With alpha != 1 the return level is still the exact small root.
    CHECK(r.intersection.crossing_value ==
          doctest::Approx(exact_small_root(s0)).epsilon(1e-8));
  }
}

TEST_CASE("trapped return interval") {
  const double exact = -0.3 * lambert_w(-(2.0 / 0.3) * std::exp(-2.0 / 0.3));
  const TrappedInterval same = trapped_return_interval(2.0, 0.3, 0.3);
  CHECK(same.lower == doctest::Approx(exact).epsilon(1e-14));
  CHECK(same.upper == doctest::Approx(exact).epsilon(1e-14));

  const TrappedInterval t = trapped_return_interval(2.0, 0.1, 0.5);
  CHECK(t.lower == doctest::Approx(fz::trapped_F0_1).epsilon(1e-12));
  CHECK(t.upper == doctest::Approx(fz::trapped_F0_5).epsilon(1e-14));
  CHECK(t.lower < t.upper);

  const RatioChain& c = t.ratios;
  CHECK(c.outer_lower < c.lower);
  CHECK(c.lower <= t.lower / 2.0 * (1.0 + 1e-12));
  CHECK(t.upper / 2.0 <= c.upper * (1.0 + 1e-12));
  CHECK(c.upper < c.z0_mirrored);
  CHECK(c.z0_mirrored < c.outer_mirrored);
  CHECK(c.upper < c.z0_printed);
  CHECK(c.z0_printed < c.outer_printed);

  CHECK_THROWS_AS(trapped_return_interval(0.4, 0.1, 0.5), DomainError);
  CHECK_THROWS_AS(trapped_return_interval(2.0, 0.5, 0.1), DomainError);
  CHECK_THROWS_AS(trapped_return_interval(2.0, 0.0, 0.1), DomainError);
}

TEST_CASE("RM minimum predator interval") {
  const RosenzweigMacArthur rm = make_rosenzweig_macarthur(1.0, 0.3, 0.1);
  const RmReturn r = rm_next_intersection(rm, 1.0, rm.lambda, long_run());
  CHECK(r.preconditions.ok);
  CHECK(r.intersection.contained());
  CHECK(r.intersection.crossing_value < 1.0);
  CHECK(r.intersection.refinement_residual < 1e-10);
  const TrappedInterval iv = rm_min_predator_interval(1.0, 0.3, 0.1);
  CHECK(iv.lower == r.interval.lower);
  CHECK(iv.upper == r.interval.upper);

  // x_min lies on the isocline and is the smallest x on the arc.
  double min_x = 1e300;
  for (const auto& st : r.trajectory.samples) min_x = std::min(min_x, st.x);
  CHECK(min_x >= r.intersection.crossing_value * (1.0 - 1e-8));

  // lambda -> 0 collapses onto the constant-F answer.
  const TrappedInterval thin = rm_min_predator_interval(1.0, 1e-9, 0.1);
  CHECK(thin.upper == doctest::Approx(thin.lower).epsilon(1e-6));

  // Shrinking to lambda/2 tightens the upper end.
  const TrappedInterval half = rm_shrunk_interval(1.0, 0.15, 0.1);
  CHECK(half.lower == iv.lower);
  CHECK(half.upper < iv.upper);
  const RmReturn rh = rm_next_intersection(rm, 1.0, 0.15, long_run());
  CHECK(rh.intersection.contained());
  CHECK(rh.preconditions.ok);

  CHECK_THROWS_AS(rm_min_predator_interval(0.2, 0.3, 0.1), DomainError);
  CHECK_THROWS_AS(rm_next_intersection(rm, 1.0, 0.4), DomainError);
}

TEST_CASE("trapped interval brackets an RM return with F in (0.1, 0.5)") {
  const RosenzweigMacArthur rm = make_rosenzweig_macarthur(1.0, 0.3, 0.1);
  const RmReturn r = rm_next_intersection(rm, 2.0, rm.lambda, long_run());
  const TrappedInterval wide = trapped_return_interval(2.0, 0.1, 0.5);
  CHECK(wide.lower <= r.intersection.crossing_value);
  CHECK(r.intersection.crossing_value <= wide.upper);
  const ArcCheck loose = check_trapping_preconditions(rm, r.trajectory.samples, 0.1, 0.5);
  CHECK(loose.ok);
}

TEST_CASE("precondition violations are reported") {
  const RosenzweigMacArthur rm = make_rosenzweig_macarthur(1.0, 0.3, 0.1);
  const RmReturn r = rm_next_intersection(rm, 1.0, rm.lambda, long_run());
  const ArcCheck narrow = check_trapping_preconditions(rm, r.trajectory.samples, 0.1, 0.2);
  CHECK_FALSE(narrow.ok);
  CHECK(narrow.violations > 0);
  CHECK(narrow.worst_margin < 0.0);
  CHECK_FALSE(narrow.detail.empty());

  // An LV orbit crosses s = 1 = d/p.
  const LotkaVolterra lv{1.0};
  const IntegrationResult orbit =
      integrate(lv, {0.0, 2.0, 2.0}, LevelEvent{StateVariable::Prey, 2.0, Crossing::Falling, 1});
  CHECK_FALSE(check_trapping_preconditions(lv, orbit.samples, 0.5, 1.5).ok);
}

TEST_CASE("RM barrier curves bracket the arc") {
  const RosenzweigMacArthur rm = make_rosenzweig_macarthur(1.0, 0.3, 0.1);
  const RmReturn r = rm_next_intersection(rm, 1.0, rm.lambda, long_run());
  const TrajectoryState start = r.trajectory.samples.front();
  CHECK(rm_barrier_prey(rm, 0.1, start, start.x) == doctest::Approx(rm.lambda).epsilon(1e-6));
  int inside = 0;
  for (const auto& st : r.trajectory.samples) {
    const double lo = rm_barrier_prey(rm, 0.1, start, st.x);
    const double up = rm_barrier_prey(rm, rm.h(rm.lambda), start, st.x);
    if (std::isnan(lo) || std::isnan(up) || st.s > rm.lambda * (1.0 - 1e-9)) continue;
    CHECK(lo <= st.s * (1.0 + 1e-7));
    CHECK(st.s <= up * (1.0 + 1e-7));
    ++inside;
  }
  CHECK(inside > 10);
  CHECK(std::isnan(rm_barrier_prey(rm, 0.1, start, 50.0)));
}

TEST_CASE("nondimensionalization") {
  const RosenzweigMacArthur rm = rm_nondimensionalize({1.0, 1.0, 0.1, 2.0, 1.0, 1.0});
  CHECK(rm.m == doctest::Approx(1.0));
  CHECK(rm.lambda == doctest::Approx(0.1));
  CHECK(rm.a == doctest::Approx(0.1));

  const RosenzweigMacArthur doubled = rm_nondimensionalize({1.0, 2.0, 0.1, 2.0, 1.0, 1.0});
  CHECK(doubled.a == doctest::Approx(0.05));
  CHECK(doubled.lambda == doctest::Approx(0.05));
  CHECK(doubled.m == doctest::Approx(1.0));

  CHECK_THROWS_AS(rm_nondimensionalize({1.0, 1.0, 0.1, 1.0, 1.0, 1.0}), DomainError);
  CHECK_THROWS_AS(rm_nondimensionalize({1.0, -1.0, 0.1, 2.0, 1.0, 1.0}), DomainError);
}

TEST_CASE("nondimensional RM reproduces the dimensional vector field") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.2, 3.0);
  for (int i = 0; i < 50; ++i) {
    RMPhysicalParams p{u(rng), u(rng), u(rng), 0.0, u(rng), u(rng)};
    p.p = p.d * (1.0 + u(rng));
    const RosenzweigMacArthur rm = rm_nondimensionalize(p);
    CHECK(rm.lambda * (p.p - p.d) * p.K == doctest::Approx(p.d * p.A).epsilon(1e-12));
    // s = S/K, x = q X / (r K), dtau/dt = r K / (A + S).
    const double S = u(rng);
    const double X = u(rng);
    const Rates dim = dimensional_rm(p, S, X);
    const double s = S / p.K;
    const double x = p.q * X / (p.r * p.K);
    const double dtau_dt = p.r * p.K / (p.A + S);
    if (!(rm.lambda < 1.0)) continue;
    const Rates nd = rhs(rm, {0.0, s, x});
    CHECK(nd.ds * dtau_dt == doctest::Approx(dim.ds / p.K).epsilon(1e-12).scale(1e-12));
    CHECK(nd.dx * dtau_dt == doctest::Approx(dim.dx * p.q / (p.r * p.K)).epsilon(1e-12).scale(1e-12));
  }
}
