#include "lvb/trajectories.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "lvb/bounds.hpp"
#include "lvb/errors.hpp"
#include "lvb/lambert.hpp"

namespace lvb {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string describe(const char* what, double value) {
  std::ostringstream os;
  os.precision(17);
  os << what << " (got " << value << ")";
  return os.str();
}

void require_positive_state(double s, double x) {
  if (!(s > 0.0) || !(x > 0.0) || !std::isfinite(s) || !std::isfinite(x)) {
    std::ostringstream os;
    os.precision(17);
    os << "state must be positive (s = " << s << ", x = " << x << ")";
    throw DomainError(os.str());
  }
}

// Log-coordinates: y[0] = ln s, y[1] = ln x.
using Vec = std::array<double, 2>;

Vec log_rates(const SystemSpec& system, const Vec& y) {
  const double s = std::exp(y[0]);
  const double x = std::exp(y[1]);
  return std::visit(
      Overloaded{
          [&](const LotkaVolterra& lv) -> Vec {
            return {1.0 - x, lv.alpha * (s - 1.0)};
          },
          [&](const RosenzweigMacArthur& rm) -> Vec {
            return {rm.h(s) - x, rm.m * (s - rm.lambda)};
          },
          [&](const GeneralSystem& g) -> Vec {
            const double phi = g.phi(s);
            return {(g.H(s) - g.q * phi * x) / s, g.p * phi - g.d};
          },
      },
      system);
}

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// Continuous extension (Hairer, Norsett, Wanner).
constexpr double d1 = -12715105075.0 / 11282082432.0,
                 d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0,
                 d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0,
                 d7 = 69997945.0 / 29380423.0;

struct Step {
  Vec y1;
  Vec k7;  // rates at y1 (FSAL)
  Vec err;
  std::array<Vec, 5> dense;
};

Step dopri_step(const SystemSpec& sys, const Vec& y0, const Vec& k1, double h) {
  auto add = [h](const Vec& y, std::initializer_list<std::pair<double, const Vec*>> terms) {
    Vec out = y;
    for (const auto& [coef, k] : terms) {
      out[0] += h * coef * (*k)[0];
      out[1] += h * coef * (*k)[1];
    }
    return out;
  };
  const Vec k2 = log_rates(sys, add(y0, {{a21, &k1}}));
  const Vec k3 = log_rates(sys, add(y0, {{a31, &k1}, {a32, &k2}}));
  const Vec k4 = log_rates(sys, add(y0, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
  const Vec k5 = log_rates(
      sys, add(y0, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
  const Vec k6 = log_rates(
      sys, add(y0, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
  Step st;
  st.y1 = add(y0, {{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}});
  st.k7 = log_rates(sys, st.y1);
  for (int i = 0; i < 2; ++i) {
    st.err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                     e6 * k6[i] + e7 * st.k7[i]);
    const double dy = st.y1[i] - y0[i];
    const double bspl = h * k1[i] - dy;
    st.dense[0][i] = y0[i];
    st.dense[1][i] = dy;
    st.dense[2][i] = bspl;
    st.dense[3][i] = dy - h * st.k7[i] - bspl;
    st.dense[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                          d6 * k6[i] + d7 * st.k7[i]);
  }
  return st;
}

Vec dense_eval(const Step& st, double theta) {
  const double t1 = 1.0 - theta;
  Vec out;
  for (int i = 0; i < 2; ++i) {
    const auto& r = st.dense;
    out[i] = r[0][i] +
             theta * (r[1][i] + t1 * (r[2][i] + theta * (r[3][i] + t1 * r[4][i])));
  }
  return out;
}

bool admissible(const Vec& y) {
  return std::isfinite(y[0]) && std::isfinite(y[1]) && std::exp(y[0]) > 0.0 &&
         std::exp(y[1]) > 0.0 && std::isfinite(std::exp(y[0])) &&
         std::isfinite(std::exp(y[1]));
}

TrajectoryState to_state(double tau, const Vec& y) {
  return TrajectoryState{tau, std::exp(y[0]), std::exp(y[1])};
}

int component(StateVariable v) { return v == StateVariable::Prey ? 0 : 1; }

bool is_crossing(double g0, double g1, Crossing dir) {
  const bool rising = g0 < 0.0 && g1 >= 0.0;
  const bool falling = g0 > 0.0 && g1 <= 0.0;
  switch (dir) {
    case Crossing::Rising: return rising;
    case Crossing::Falling: return falling;
    case Crossing::Any: return rising || falling;
  }
  return false;
}

}  // namespace

LotkaVolterra make_lotka_volterra(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw DomainError(describe("Lotka-Volterra alpha must be positive", alpha));
  }
  return LotkaVolterra{alpha};
}

RosenzweigMacArthur make_rosenzweig_macarthur(double m, double lambda, double a) {
  if (!(m > 0.0) || !std::isfinite(m)) {
    throw DomainError(describe("Rosenzweig-MacArthur m must be positive", m));
  }
  if (!(lambda > 0.0 && lambda < 1.0)) {
    throw DomainError(describe("Rosenzweig-MacArthur lambda must lie in (0, 1)", lambda));
  }
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw DomainError(describe("Rosenzweig-MacArthur a must be positive", a));
  }
  return RosenzweigMacArthur{m, lambda, a};
}

GeneralSystem make_general(std::function<double(double)> H,
                           std::function<double(double)> phi,
                           std::function<double(double)> Phi, double p,
                           double q, double d, double s_lo, double s_hi,
                           int samples) {
  if (!H || !phi || !Phi) throw DomainError("general system: H, phi and Phi are required");
  for (double v : {p, q, d}) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw DomainError(describe("general system: p, q, d must be positive", v));
    }
  }
  if (!(s_lo > 0.0 && s_lo < s_hi) || samples < 2) {
    throw DomainError("general system: invalid sample range");
  }
  if (std::fabs(phi(0.0)) > 1e-12) {
    throw DomainError(describe("general system: phi(0) must be 0", phi(0.0)));
  }
  double previous = phi(s_lo);
  for (int i = 0; i < samples; ++i) {
    const double s = s_lo + (s_hi - s_lo) * i / (samples - 1);
    const double value = phi(s);
    if (!(value > 0.0) || value < previous) {
      throw DomainError(describe("general system: phi must be positive and non-decreasing at s", s));
    }
    previous = value;
    const double step = 1e-5 * s;
    const double slope = (Phi(s + step) - Phi(s - step)) / (2.0 * step);
    const double expected = 1.0 / value;
    if (std::fabs(slope - expected) > 1e-6 * std::fabs(expected)) {
      throw DomainError(describe("general system: Phi' differs from 1/phi at s", s));
    }
  }
  return GeneralSystem{std::move(H), std::move(phi), std::move(Phi), p, q, d};
}

GeneralSystem as_general(const SystemSpec& system) {
  auto identity = [](double s) { return s; };
  auto log_fn = [](double s) { return std::log(s); };
  return std::visit(
      Overloaded{
          [&](const LotkaVolterra& lv) {
            return GeneralSystem{identity, identity, log_fn, lv.alpha, 1.0, lv.alpha};
          },
          [&](const RosenzweigMacArthur& rm) {
            auto H = [rm](double s) { return rm.h(s) * s; };
            return GeneralSystem{H, identity, log_fn, rm.m, 1.0, rm.m * rm.lambda};
          },
          [](const GeneralSystem& g) { return g; },
      },
      system);
}

Rates rhs(const SystemSpec& system, const TrajectoryState& state) {
  require_positive_state(state.s, state.x);
  const double s = state.s;
  const double x = state.x;
  return std::visit(
      Overloaded{
          [&](const LotkaVolterra& lv) {
            return Rates{(1.0 - x) * s, lv.alpha * x * (s - 1.0)};
          },
          [&](const RosenzweigMacArthur& rm) {
            return Rates{(rm.h(s) - x) * s, rm.m * (s - rm.lambda) * x};
          },
          [&](const GeneralSystem& g) {
            const double phi = g.phi(s);
            return Rates{g.H(s) - g.q * phi * x, g.p * phi * x - g.d * x};
          },
      },
      system);
}

double lyapunov_V(const LotkaVolterra& system, const TrajectoryState& state) {
  require_positive_state(state.s, state.x);
  return (state.x - std::log(state.x)) / system.alpha + state.s - std::log(state.s);
}

double generalized_V(const SystemSpec& system, double Fbar,
                     const TrajectoryState& state) {
  require_positive_state(state.s, state.x);
  if (!(Fbar > 0.0)) throw DomainError(describe("generalized_V: Fbar must be positive", Fbar));
  const GeneralSystem g = as_general(system);
  const double X = g.q * state.x;
  return g.p * state.s - g.d * g.Phi(state.s) + X - Fbar * std::log(X);
}

double generalized_V_rate(const SystemSpec& system, double Fbar,
                          const TrajectoryState& state) {
  require_positive_state(state.s, state.x);
  const GeneralSystem g = as_general(system);
  return (g.p * g.phi(state.s) - g.d) * (g.F(state.s) - Fbar);
}

IntegrationResult integrate(const SystemSpec& system,
                            const TrajectoryState& initial,
                            const std::optional<LevelEvent>& stop,
                            const IntegrationOptions& options) {
  require_positive_state(initial.s, initial.x);
  if (stop) {
    if (!(stop->level > 0.0)) throw DomainError(describe("event level must be positive", stop->level));
    if (stop->occurrence < 1) throw DomainError("event occurrence must be at least 1");
  }

  IntegrationResult result;
  double t = initial.tau;
  const double t_end = initial.tau + options.t_max;
  Vec y{std::log(initial.s), std::log(initial.x)};
  Vec k1 = log_rates(system, y);
  if (options.record_samples) result.samples.push_back(initial);

  const int ev_index = stop ? component(stop->variable) : 0;
  const double ev_log_level = stop ? std::log(stop->level) : 0.0;
  auto event_fn = [&](const Vec& v) { return v[ev_index] - ev_log_level; };
  int crossings = 0;

  double h = std::min(options.initial_step, options.t_max);
  double err_old = 1e-4;
  constexpr double kSafety = 0.9;
  constexpr double kBeta = 0.04;
  constexpr double kExpo = 0.2 - kBeta * 0.75;

  while (t < t_end) {
    if (t + h > t_end) h = t_end - t;
    if (h < options.min_step) {
      if (t_end - t < options.min_step) break;
      throw IntegrationError(IntegrationError::Kind::StepUnderflow,
                             describe("integrate: step size underflow at tau", t));
    }

    const Step st = dopri_step(system, y, k1, h);
    if (!admissible(st.y1)) {
      h *= 0.5;
      ++result.rejected_steps;
      continue;
    }
    double err = 0.0;
    for (int i = 0; i < 2; ++i) {
      const double sc = options.atol +
                        options.rtol * std::max(std::fabs(y[i]), std::fabs(st.y1[i]));
      err += (st.err[i] / sc) * (st.err[i] / sc);
    }
    err = std::sqrt(err / 2.0);
    if (!std::isfinite(err)) {
      h *= 0.5;
      ++result.rejected_steps;
      continue;
    }

    const double fac11 = std::pow(std::max(err, 1e-300), kExpo);
    if (err > 1.0) {
      h /= std::min(5.0, fac11 / kSafety);
      ++result.rejected_steps;
      continue;
    }

    // Accepted step [t, t + h].
    ++result.accepted_steps;
    if (stop && is_crossing(event_fn(y), event_fn(st.y1), stop->direction) &&
        ++crossings == stop->occurrence) {
      // Locate the crossing on the dense output, then polish the time with
      // Newton steps on freshly integrated states.
      double lo = 0.0;
      double hi = 1.0;
      const double g_lo = event_fn(y);
      for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = event_fn(dense_eval(st, mid));
        if ((gm < 0.0) == (g_lo < 0.0)) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      double h_ev = 0.5 * (lo + hi) * h;
      Vec y_ev = dense_eval(st, 0.5 * (lo + hi));
      const double tol_log = 0.1 * options.event_tolerance / stop->level;
      for (int it = 0; it < 8; ++it) {
        const Step fine = dopri_step(system, y, k1, h_ev);
        y_ev = fine.y1;
        const double g = event_fn(y_ev);
        if (std::fabs(g) <= tol_log) break;
        const double slope = fine.k7[ev_index];
        if (slope == 0.0) break;
        h_ev = std::clamp(h_ev - g / slope, 0.0, h);
      }
      result.final_state = to_state(t + h_ev, y_ev);
      const double value = ev_index == 0 ? result.final_state.s : result.final_state.x;
      result.event_residual = std::fabs(value - stop->level);
      result.reason = StopReason::Event;
      if (options.record_samples) result.samples.push_back(result.final_state);
      return result;
    }

    t += h;
    y = st.y1;
    k1 = st.k7;
    if (options.record_samples) result.samples.push_back(to_state(t, y));

    double fac = fac11 / std::pow(err_old, kBeta);
    fac = std::clamp(fac / kSafety, 0.1, 5.0);
    h /= fac;
    err_old = std::max(err, 1e-4);
  }

  result.final_state = to_state(t, y);
  result.reason = StopReason::MaxTime;
  return result;
}

ReturnBounds lv_return_bounds(StateVariable /*level_kind*/, double start_value) {
  if (!(start_value > 1.0) || !std::isfinite(start_value)) {
    throw DomainError(describe("lv_return_bounds: start value must exceed 1", start_value));
  }
  const double Y = start_value * std::exp(-start_value);
  const FirstOrderZBounds z = first_order_z_bounds(Y);
  return ReturnBounds{Y, z.z1 * Y, z.z2 * Y, z.z0 * Y, Y, kE * Y};
}

TrappedInterval trapped_return_interval(double X0, double F_low, double F_up) {
  if (!(F_low > 0.0)) throw DomainError(describe("F_low must be positive", F_low));
  if (!(F_up >= F_low)) throw DomainError(describe("F_up must be at least F_low", F_up));
  if (!(X0 > F_up) || !std::isfinite(X0)) {
    throw DomainError(describe("X0 must exceed F_up", X0));
  }
  const double y_low = X0 / F_low;
  const double y_up = X0 / F_up;
  TrappedInterval out;
  out.lower = -F_low * w_of_minus_y_exp(y_low);
  out.upper = -F_up * w_of_minus_y_exp(y_up);

  const double e_low = std::exp(-y_low);
  const double e_up = std::exp(-y_up);
  RatioChain& r = out.ratios;
  r.outer_lower = e_low;
  r.lower = first_order_z_bounds(y_low * e_low).z1 * e_low;
  const FirstOrderZBounds zu = first_order_z_bounds(y_up * e_up);
  r.upper = zu.z2 * e_up;
  r.z0_mirrored = zu.z0 * e_up;
  r.outer_mirrored = std::exp(1.0 - y_up);
  r.z0_printed = zu.z0 * std::exp(y_up);
  r.outer_printed = std::exp(1.0 + y_up);
  return out;
}

TrappedInterval rm_shrunk_interval(double x0, double lambda_star, double a) {
  if (!(lambda_star > 0.0 && lambda_star < 1.0)) {
    throw DomainError(describe("level must lie in (0, 1)", lambda_star));
  }
  if (!(a > 0.0)) throw DomainError(describe("a must be positive", a));
  const double h_level = (1.0 - lambda_star) * (lambda_star + a);
  if (!(h_level > a)) {
    throw DomainError(describe("h(level) must exceed a, i.e. level + a < 1", lambda_star));
  }
  if (!(x0 > h_level)) throw DomainError(describe("x0 must exceed h(level)", x0));
  return trapped_return_interval(x0, a, h_level);
}

TrappedInterval rm_min_predator_interval(double x_max, double lambda, double a) {
  return rm_shrunk_interval(x_max, lambda, a);
}

ArcCheck check_trapping_preconditions(const SystemSpec& system,
                                      std::span<const TrajectoryState> arc,
                                      double F_low, double F_up,
                                      double endpoint_slack) {
  const GeneralSystem g = as_general(system);
  const double phi_cap = g.d / g.p;
  ArcCheck out;
  out.worst_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < arc.size(); ++i) {
    const bool endpoint = i == 0 || i + 1 == arc.size();
    const double S = arc[i].s;
    const double F = g.F(S);
    const double phi = g.phi(S);
    // Near S = 0, F(S) = F_low + O(S) is only resolved to a few ulps.
    const double rounding =
        8.0 * std::numeric_limits<double>::epsilon() * std::max({F_up, phi_cap, std::fabs(F)});
    const double slack = endpoint ? std::max(endpoint_slack, rounding) : rounding;
    const double margin = std::min({F - F_low, F_up - F, phi_cap - phi});
    out.worst_margin = std::min(out.worst_margin, margin);
    const bool interior_ok = margin > 0.0;
    if (!(interior_ok || margin >= -slack)) {
      ++out.violations;
      if (out.detail.empty()) {
        std::ostringstream os;
        os.precision(17);
        os << "sample " << i << " at tau = " << arc[i].tau << ": F(S) = " << F
           << ", phi(S) = " << phi << " outside (" << F_low << ", " << F_up
           << ") or above d/p = " << phi_cap;
        out.detail = os.str();
      }
    }
  }
  out.ok = out.violations == 0;
  return out;
}

LvReturn lv_next_intersection(const LotkaVolterra& system, double x0, double s0,
                              StateVariable estimated,
                              const IntegrationOptions& options) {
  require_positive_state(s0, x0);
  const TrajectoryState start{0.0, s0, x0};
  const Rates r0 = rhs(system, start);

  // Estimating s means crossing x = x0 again; estimating x means s = s0.
  LevelEvent ev;
  double departure;
  double start_value;
  if (estimated == StateVariable::Prey) {
    ev.variable = StateVariable::Predator;
    ev.level = x0;
    departure = r0.dx;
    start_value = s0;
  } else {
    ev.variable = StateVariable::Prey;
    ev.level = s0;
    departure = r0.ds;
    start_value = x0;
  }
  if (departure == 0.0) {
    throw DomainError("lv_next_intersection: start lies on an isocline of the level variable");
  }
  ev.direction = departure > 0.0 ? Crossing::Falling : Crossing::Rising;

  const ReturnBounds bounds = lv_return_bounds(estimated, start_value);

  LvReturn out;
  out.trajectory = integrate(system, start, ev, options);
  if (out.trajectory.reason != StopReason::Event) {
    throw IntegrationError(IntegrationError::Kind::NonFinite,
                           "lv_next_intersection: no return crossing before t_max");
  }
  const TrajectoryState& end = out.trajectory.final_state;
  out.intersection.crossing_value = estimated == StateVariable::Prey ? end.s : end.x;
  out.intersection.predicted_lower = bounds.lower;
  out.intersection.predicted_upper = bounds.upper;
  out.intersection.level = ev.level;
  out.intersection.refinement_residual = out.trajectory.event_residual;

  const double v0 = lyapunov_V(system, start);
  for (const TrajectoryState& st : out.trajectory.samples) {
    out.max_v_drift = std::max(out.max_v_drift, std::fabs(lyapunov_V(system, st) - v0));
  }
  return out;
}

RmReturn rm_next_intersection(const RosenzweigMacArthur& system, double x0,
                              double level, const IntegrationOptions& options) {
  if (!(level > 0.0 && level <= system.lambda)) {
    throw DomainError(describe("rm_next_intersection: level must lie in (0, lambda]", level));
  }
  RmReturn out;
  out.interval = rm_shrunk_interval(x0, level, system.a);

  const TrajectoryState start{0.0, level, x0};
  LevelEvent ev{StateVariable::Prey, level, Crossing::Rising, 1};
  out.trajectory = integrate(system, start, ev, options);
  if (out.trajectory.reason != StopReason::Event) {
    throw IntegrationError(IntegrationError::Kind::NonFinite,
                           "rm_next_intersection: no return to the prey level before t_max");
  }
  out.intersection.crossing_value = out.trajectory.final_state.x;
  out.intersection.predicted_lower = out.interval.lower;
  out.intersection.predicted_upper = out.interval.upper;
  out.intersection.level = level;
  out.intersection.refinement_residual = out.trajectory.event_residual;
  out.preconditions = check_trapping_preconditions(
      system, out.trajectory.samples, system.a, system.h(level));
  return out;
}

double rm_barrier_prey(const RosenzweigMacArthur& system, double F,
                       const TrajectoryState& start, double x) {
  require_positive_state(start.s, start.x);
  if (!(x > 0.0)) throw DomainError(describe("rm_barrier_prey: x must be positive", x));
  // m (s - lambda ln s) = V_F(start) - (x - F ln x); solve on s < lambda via
  // s = -lambda W(-(1/lambda) e^{-K/lambda}) with K the right side over m.
  const double target = generalized_V(system, F, start) - (x - F * std::log(x));
  const double K = target / system.m;
  const double lam = system.lambda;
  if (K < lam - lam * std::log(lam)) return std::numeric_limits<double>::quiet_NaN();
  const double arg = -std::exp(-K / lam - std::log(lam));
  return -lam * lambert_w(std::max(arg, -kInvE));
}

RosenzweigMacArthur rm_nondimensionalize(const RMPhysicalParams& phys) {
  for (double v : {phys.r, phys.K, phys.A, phys.p, phys.q, phys.d}) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw DomainError(describe("physical parameters must be positive", v));
    }
  }
  if (!(phys.p > phys.d)) {
    throw DomainError(describe("predator conversion p must exceed mortality d", phys.p));
  }
  RosenzweigMacArthur rm;
  rm.a = phys.A / phys.K;
  rm.m = (phys.p - phys.d) / phys.r;
  rm.lambda = phys.d * phys.A / ((phys.p - phys.d) * phys.K);
  return rm;
}

}  // namespace lvb
