#include "lvb/verify.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

#include "lvb/errors.hpp"
#include "lvb/lambert.hpp"
#include "lvb/trajectories.hpp"

namespace lvb {
namespace {

constexpr double kSlack = 1e-12;

std::vector<double> geometric_grid(double lo, double hi, int n) {
  std::vector<double> out(n);
  const double r = std::log(hi / lo);
  for (int i = 0; i < n; ++i) out[i] = lo * std::exp(r * i / (n - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<double> linear_grid(double lo, double hi, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = lo + (hi - lo) * i / (n - 1);
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::string at(const char* name, double v) {
  std::ostringstream os;
  os.precision(12);
  os << name << " = " << v;
  return os.str();
}

// Accumulates margins; a check fails when its margin drops below -slack.
class Tracker {
 public:
  Tracker(std::string name, double slack) : slack_(slack) {
    result_.name = std::move(name);
    result_.worst_margin = std::numeric_limits<double>::infinity();
  }

  void check(double margin, const std::string& where) {
    ++result_.checks;
    if (!(margin >= -slack_)) ++result_.failures;
    if (!(margin >= result_.worst_margin)) {
      result_.worst_margin = margin;
      result_.worst_at = where;
    }
  }

  void fail(const std::string& where) {
    ++result_.checks;
    ++result_.failures;
    result_.worst_margin = -std::numeric_limits<double>::infinity();
    result_.worst_at = where;
  }

  SuiteResult& result() { return result_; }

 private:
  double slack_;
  SuiteResult result_;
};

SuiteResult first_order_chain(const PadeFamilies& fam) {
  Tracker t("first-order z chain 1 < z1 < z < z2 < z0 < e", kSlack);
  for (double y : geometric_grid(1.001, 100.0, 1000)) {
    const double Y = y * std::exp(-y);
    const double z = exact_z(y);
    const FirstOrderZBounds b = first_order_z_bounds(Y, fam);
    const std::string w = at("y", y);
    t.check(std::min({b.z1 - 1.0, z - b.z1, b.z2 - z, b.z0 - b.z2, kE - b.z0}), w);
    t.check(1e-13 - std::fabs(std::log(z) / z - Y), w);
  }
  return t.result();
}

SuiteResult second_order_chain(const PadeFamilies& fam) {
  Tracker t("second-order z chain tz1 < z < tz2, tz3; narrower than first order", kSlack);
  for (double y : geometric_grid(1.001, 100.0, 1000)) {
    const double Y = y * std::exp(-y);
    const double z = exact_z(y);
    const SecondOrderZBounds b = second_order_z_bounds(Y, fam);
    const FirstOrderZBounds f = first_order_z_bounds(Y, fam);
    const std::string w = at("y", y);
    t.check(std::min({z - b.tz1, b.tz2 - z, b.tz3 - z}), w);
    t.check((f.z2 - f.z1) - (b.upper() - b.tz1), w);
  }
  return t.result();
}

SuiteResult z_monotone() {
  Tracker t("exact z strictly decreasing in y", 0.0);
  const auto grid = geometric_grid(1.001, 100.0, 1000);
  double prev_z = exact_z(grid.front());
  double prev_Y = grid.front() * std::exp(-grid.front());
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double Y = grid[i] * std::exp(-grid[i]);
    const double z = exact_z(grid[i]);
    const double step = prev_z - z;
    // Once the change in z ~ 1 + Y drops below a few ulps of 1, only
    // non-strict decrease is observable.
    const bool resolvable = prev_Y - Y > 8.0 * std::numeric_limits<double>::epsilon();
    t.check(resolvable ? (step > 0.0 ? step : -1.0) : step, at("y", grid[i]));
    prev_z = z;
    prev_Y = Y;
  }
  return t.result();
}

SuiteResult log_sandwich(const PadeFamilies& fam) {
  Tracker t("rational sandwich f0 < f2 < ln z < f1 and f2', f3' < ln z < f1'", 0.0);
  const auto grid = linear_grid(1.0, kE, 1002);
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
    const double z = grid[i];
    const double ln = std::log(z);
    const std::string w = at("z", z);
    t.check(std::min({fam.tangent_at_e(z) - fam.linear(z), ln - fam.tangent_at_e(z),
                      fam.tangent_at_one(z) - ln}),
            w);
    t.check(std::min({fam.two_point_tangent(z) - ln, ln - fam.osculating_at_one(z),
                      ln - fam.osculating_at_e(z)}),
            w);
  }
  return t.result();
}

SuiteResult small_root_consistency() {
  Tracker t("exact_small_root = z Y and solves x - ln x = y - ln y", 0.0);
  for (double y : geometric_grid(1.001, 100.0, 1000)) {
    const double x = exact_small_root(y);
    const double Y = y * std::exp(-y);
    const std::string w = at("y", y);
    t.check(1e-12 - std::fabs(x - exact_z(y) * Y), w);
    t.check(1e-13 * std::max(1.0, y) - std::fabs((x - std::log(x)) - (y - std::log(y))), w);
  }
  return t.result();
}

SuiteResult lambert_identity() {
  Tracker t("W e^W = X on [-1/e + 1e-9, 1e3]", 0.0);
  const auto grid = linear_grid(-kInvE + 1e-9, 1e3, 10000);
  for (double X : grid) {
    const double w = lambert_w(X);
    const std::string where = at("X", X);
    t.check(1e-13 * std::max(1.0, std::fabs(X)) - std::fabs(w * std::exp(w) - X), where);
    t.check(w + 1.0, where);
  }
  return t.result();
}

SuiteResult w_first_order_chain(const PadeFamilies& fam) {
  Tracker t("first-order W chain w0 <= w2 <= W <= w1", kSlack);
  const auto grid = linear_grid(-kInvE, 0.0, 1002);
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
    const double X = grid[i];
    const double W = lambert_w(X);
    const FirstOrderWBounds b = first_order_w_bounds(X, fam);
    t.check(std::min({b.w2 - b.w0, W - b.w2, b.w1 - W}), at("X", X));
  }
  return t.result();
}

SuiteResult w_second_order_chain(const PadeFamilies& fam) {
  Tracker t("second-order W chain max(w2, w3) <= W <= w1; max relerr below first order",
            kSlack);
  const auto grid = linear_grid(-kInvE, 0.0, 1002);
  double worst_first = 0.0;
  double worst_second = 0.0;
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
    const double X = grid[i];
    const double W = lambert_w(X);
    const SecondOrderWBounds b = second_order_w_bounds(X, fam);
    const FirstOrderWBounds f = first_order_w_bounds(X, fam);
    t.check(std::min(W - b.lower(), b.w1 - W), at("X", X));
    for (double v : {f.w1, f.w2}) worst_first = std::max(worst_first, std::fabs(v / W - 1.0));
    for (double v : {b.w1, b.w2, b.w3}) {
      worst_second = std::max(worst_second, std::fabs(v / W - 1.0));
    }
  }
  t.check(worst_first - worst_second, "max relative error over grid");
  return t.result();
}

SuiteResult cross_identity() {
  Tracker t("-W(-y e^{-y}) = exact_small_root(y)", 0.0);
  for (double y : geometric_grid(1.001, 100.0, 1000)) {
    t.check(1e-12 - std::fabs(-w_of_minus_y_exp(y) - exact_small_root(y)), at("y", y));
  }
  return t.result();
}

SuiteResult series_alternation() {
  Tracker t("W series partial sums bracket W on (0, 1/e)", 0.0);
  for (double X : linear_grid(0.0, kInvE, 202)) {
    if (X <= 0.0 || X >= kInvE) continue;
    const double W = lambert_w(X);
    for (int n = 2; n <= 6; ++n) {
      const double a = w_series(X, n) - W;
      const double b = w_series(X, n + 1) - W;
      // For small X the later partial sums agree with W to the last bit and
      // the side they fall on is rounding noise.
      const double floor = 4.0 * std::numeric_limits<double>::epsilon() * W;
      if (std::fabs(a) <= floor || std::fabs(b) <= floor) continue;
      t.check(-(a * b), at("X", X) + ", n = " + std::to_string(n));
    }
  }
  return t.result();
}

SuiteResult literature_bounds() {
  Tracker t("elementary chain (strict) and tangent-line upper bound", 0.0);
  for (double y : geometric_grid(1.001, 50.0, 1000)) {
    const double W = w_of_minus_y_exp(y);
    const ElementaryWChain c = elementary_w_chain(y);
    const double margin = std::min({c.lower_b - c.lower_a, W - c.lower_b, c.upper - W});
    t.check(margin > 0.0 ? margin : -1.0, at("y", y));
  }
  for (double X : linear_grid(-kInvE, 10.0, 1000)) {
    t.check(w_tangent_upper(X) - lambert_w(X), at("X", X));
  }
  return t.result();
}

SuiteResult lv_containment(std::mt19937_64& rng) {
  Tracker t("LV return crossings inside [z1 Y, z2 Y], V drift < 1e-8", 0.0);
  std::uniform_real_distribution<double> level(1.0 + 1e-3, 5.0);
  std::uniform_real_distribution<double> other(0.2, 3.0);
  std::uniform_real_distribution<double> alpha(0.5, 2.0);
  for (int i = 0; i < 50; ++i) {
    const LotkaVolterra lv{alpha(rng)};
    const double lvl = level(rng);
    const double oth = other(rng);
    for (StateVariable est : {StateVariable::Prey, StateVariable::Predator}) {
      // Estimating s needs s0 > 1; estimating x needs x0 > 1.
      const double s0 = est == StateVariable::Prey ? lvl : oth;
      const double x0 = est == StateVariable::Prey ? oth : lvl;
      if (std::fabs((est == StateVariable::Prey ? s0 : x0) - 1.0) < 1e-3) continue;
      std::ostringstream where;
      where.precision(10);
      where << "alpha = " << lv.alpha << ", (x0, s0) = (" << x0 << ", " << s0 << ")";
      try {
        const LvReturn r = lv_next_intersection(lv, x0, s0, est);
        const IntersectionResult& ir = r.intersection;
        t.check(std::min(ir.crossing_value - ir.predicted_lower,
                         ir.predicted_upper - ir.crossing_value),
                where.str());
        t.check(1e-8 - r.max_v_drift, where.str() + " (V drift)");
        t.check(1e-10 - ir.refinement_residual, where.str() + " (event residual)");
      } catch (const std::exception& e) {
        t.fail(where.str() + ": " + e.what());
      }
    }
  }
  return t.result();
}

struct RmCase {
  double x_max, lambda, a;
};

std::vector<RmCase> rm_cases(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> lam(0.05, 0.45);
  std::uniform_real_distribution<double> aa(0.02, 0.3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<RmCase> out;
  while (static_cast<int>(out.size()) < n) {
    const double l = lam(rng);
    const double a = aa(rng);
    if (!(2.0 * l + a < 1.0)) continue;
    const double h = (1.0 - l) * (l + a);
    const double lo = 1.1 * h;
    if (lo >= 5.0) continue;
    out.push_back({lo + (5.0 - lo) * unit(rng), l, a});
  }
  return out;
}

SuiteResult rm_containment(const std::vector<RmCase>& cases) {
  Tracker t("RM x_min inside trapped interval; arc preconditions verified", 0.0);
  IntegrationOptions opts;
  opts.t_max = 1e6;
  for (const RmCase& c : cases) {
    std::ostringstream where;
    where.precision(10);
    where << "(x_max, lambda, a) = (" << c.x_max << ", " << c.lambda << ", " << c.a << ")";
    try {
      const RosenzweigMacArthur rm = make_rosenzweig_macarthur(1.0, c.lambda, c.a);
      const RmReturn r = rm_next_intersection(rm, c.x_max, c.lambda, opts);
      const IntersectionResult& ir = r.intersection;
      // Relative margin: x_min can be far below 1e-100.
      t.check(std::min(ir.crossing_value / ir.predicted_lower - 1.0,
                       1.0 - ir.crossing_value / ir.predicted_upper),
              where.str());
      if (!r.preconditions.ok) t.fail(where.str() + ": " + r.preconditions.detail);
    } catch (const std::exception& e) {
      t.fail(where.str() + ": " + e.what());
    }
  }
  return t.result();
}

SuiteResult rm_arc_structure(const std::vector<RmCase>& cases) {
  // While s < lambda: d/dtau V_{h(lambda)} >= 0 and d/dtau V_a <= 0. The
  // x-minimum sits on s = lambda and every event lands on its level.
  Tracker t("RM barrier monotonicity, isocline extremum, event residual", 0.0);
  IntegrationOptions opts;
  opts.t_max = 1e6;
  for (const RmCase& c : cases) {
    std::ostringstream where;
    where.precision(10);
    where << "(x_max, lambda, a) = (" << c.x_max << ", " << c.lambda << ", " << c.a << ")";
    try {
      const RosenzweigMacArthur rm = make_rosenzweig_macarthur(1.0, c.lambda, c.a);
      const RmReturn r = rm_next_intersection(rm, c.x_max, c.lambda, opts);
      const auto& arc = r.trajectory.samples;
      const double F_up = rm.h(c.lambda);
      double worst_up = std::numeric_limits<double>::infinity();
      double worst_low = std::numeric_limits<double>::infinity();
      double prev_up = generalized_V(rm, F_up, arc.front());
      double prev_low = generalized_V(rm, c.a, arc.front());
      for (std::size_t i = 1; i < arc.size(); ++i) {
        const double vu = generalized_V(rm, F_up, arc[i]);
        const double vl = generalized_V(rm, c.a, arc[i]);
        const double tol = 1e-9 * std::max(1.0, std::fabs(vu));
        worst_up = std::min(worst_up, vu - prev_up + tol);
        worst_low = std::min(worst_low, prev_low - vl + 1e-9 * std::max(1.0, std::fabs(vl)));
        prev_up = vu;
        prev_low = vl;
      }
      t.check(worst_up, where.str() + " (V_Fup non-decreasing)");
      t.check(worst_low, where.str() + " (V_Flow non-increasing)");

      const TrajectoryState& end = r.trajectory.final_state;
      double min_x = std::numeric_limits<double>::infinity();
      for (const auto& st : arc) min_x = std::min(min_x, st.x);
      t.check(1e-8 - std::fabs(end.s - c.lambda), where.str() + " (isocline)");
      t.check(min_x - end.x * (1.0 - 1e-8), where.str() + " (x minimum on isocline)");
      t.check(1e-10 - r.trajectory.event_residual, where.str() + " (event residual)");
    } catch (const std::exception& e) {
      t.fail(where.str() + ": " + e.what());
    }
  }
  return t.result();
}

}  // namespace

PadeFamilies corrupted_families() {
  PadeFamilies f = default_families();
  f.tangent_at_e = PadeBound::through_endpoints(f.tangent_at_e.a, 1.2 * f.tangent_at_e.c,
                                                f.tangent_at_e.side);
  return f;
}

bool VerifyReport::passed() const {
  return std::all_of(suites.begin(), suites.end(),
                     [](const SuiteResult& s) { return s.passed(); });
}

void VerifyReport::print(std::ostream& out) const {
  long total = 0;
  long failed = 0;
  for (const SuiteResult& s : suites) {
    total += s.checks;
    failed += s.failures;
    out << (s.passed() ? "PASS " : "FAIL ") << s.name << ": " << s.checks
        << " checks, " << s.failures << " failures, worst margin "
        << std::setprecision(6) << s.worst_margin << " at " << s.worst_at << '\n';
    if (!s.note.empty()) out << "     " << s.note << '\n';
  }
  out << (passed() ? "ALL PASS" : "FAILURES") << ": " << total - failed << '/' << total
      << " checks passed\n";
}

VerifyReport run_invariant_suites(const VerifyOptions& options) {
  const PadeFamilies fam =
      options.corrupt_coefficient ? corrupted_families() : default_families();
  std::mt19937_64 rng(options.seed);

  VerifyReport report;
  auto guarded = [&](auto&& suite, const char* name) {
    try {
      report.suites.push_back(suite());
    } catch (const std::exception& e) {
      SuiteResult r;
      r.name = name;
      r.checks = 1;
      r.failures = 1;
      r.note = e.what();
      report.suites.push_back(r);
    }
  };
  guarded([&] { return first_order_chain(fam); }, "first-order z chain");
  guarded([&] { return second_order_chain(fam); }, "second-order z chain");
  guarded([] { return z_monotone(); }, "exact z monotone");
  guarded([&] { return log_sandwich(fam); }, "rational sandwich");
  guarded([] { return small_root_consistency(); }, "small root consistency");
  guarded([] { return lambert_identity(); }, "W identity");
  guarded([&] { return w_first_order_chain(fam); }, "first-order W chain");
  guarded([&] { return w_second_order_chain(fam); }, "second-order W chain");
  guarded([] { return cross_identity(); }, "cross identity");
  guarded([] { return series_alternation(); }, "series alternation");
  guarded([] { return literature_bounds(); }, "literature bounds");
  guarded([&] { return lv_containment(rng); }, "LV containment");
  const std::vector<RmCase> cases = rm_cases(rng, 20);
  guarded([&] { return rm_containment(cases); }, "RM containment");
  guarded([&] { return rm_arc_structure(cases); }, "RM arc structure");
  return report;
}

}  // namespace lvb
