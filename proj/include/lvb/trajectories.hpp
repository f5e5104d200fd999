#pragma once

// Predator-prey systems, their first integrals, and trajectory integration
// with level-crossing events.
//
// State convention: s is prey, x is predator, tau is (nondimensional) time.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace lvb {

// ds/dtau = (1 - x) s,  dx/dtau = alpha x (s - 1).
struct LotkaVolterra {
  double alpha = 1.0;
};

// ds/dtau = (h(s) - x) s,  dx/dtau = m (s - lambda) x,  h(s) = (1 - s)(s + a).
struct RosenzweigMacArthur {
  double m = 1.0;
  double lambda = 0.5;
  double a = 0.1;

  double h(double s) const { return (1.0 - s) * (s + a); }
};

// dS/dt = H(S) - q phi(S) X,  dX/dt = p phi(S) X - d X.
// Phi is an antiderivative of 1 / phi, supplied by the caller.
struct GeneralSystem {
  std::function<double(double)> H;
  std::function<double(double)> phi;
  std::function<double(double)> Phi;
  double p = 1.0;
  double q = 1.0;
  double d = 1.0;

  // Prey isocline in scaled predator units q X: F(S) = H(S) / phi(S).
  double F(double S) const { return H(S) / phi(S); }
};

using SystemSpec = std::variant<LotkaVolterra, RosenzweigMacArthur, GeneralSystem>;

// Validating constructors; DomainError on bad parameters.
LotkaVolterra make_lotka_volterra(double alpha);
RosenzweigMacArthur make_rosenzweig_macarthur(double m, double lambda, double a);

// Spot-checks phi(0) = 0, phi non-decreasing and Phi' = 1/phi (central
// differences, relative 1e-6) on `samples` points of [s_lo, s_hi].
GeneralSystem make_general(std::function<double(double)> H,
                           std::function<double(double)> phi,
                           std::function<double(double)> Phi, double p,
                           double q, double d, double s_lo = 1e-2,
                           double s_hi = 1.0, int samples = 32);

// LV and RM rewritten in general form (phi(s) = s, Phi = ln s, q = 1).
GeneralSystem as_general(const SystemSpec& system);

struct TrajectoryState {
  double tau = 0.0;
  double s = 1.0;
  double x = 1.0;
};

struct Rates {
  double ds;
  double dx;
};

Rates rhs(const SystemSpec& system, const TrajectoryState& state);

// (1/alpha)(x - ln x) + s - ln s.
double lyapunov_V(const LotkaVolterra& system, const TrajectoryState& state);

// p S - d Phi(S) + q X - Fbar ln(q X); reduces to the usual
// p S - d Phi(S) + X - Fbar ln X for q = 1.
double generalized_V(const SystemSpec& system, double Fbar,
                     const TrajectoryState& state);

// Time derivative of generalized_V along the flow, (p phi - d)(F - Fbar).
double generalized_V_rate(const SystemSpec& system, double Fbar,
                          const TrajectoryState& state);

enum class StateVariable { Prey, Predator };
enum class Crossing { Rising, Falling, Any };

// Stop at the `occurrence`-th crossing of `variable == level` in the given
// direction. A start point lying on the level is not a crossing.
struct LevelEvent {
  StateVariable variable = StateVariable::Prey;
  double level = 1.0;
  Crossing direction = Crossing::Any;
  int occurrence = 1;
};

struct IntegrationOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double t_max = 1e3;
  double initial_step = 1e-3;
  double min_step = 1e-14;
  double event_tolerance = 1e-10;
  bool record_samples = true;
};

enum class StopReason { Event, MaxTime };

struct IntegrationResult {
  std::vector<TrajectoryState> samples;  // accepted steps, start and end included
  TrajectoryState final_state;
  StopReason reason = StopReason::MaxTime;
  double event_residual = 0.0;  // |variable - level| at the event
  int accepted_steps = 0;
  int rejected_steps = 0;
};

// Dormand-Prince 5(4) with PI step control, integrated in (ln s, ln x) so
// that tolerances act relatively on the biomasses. Steps producing a
// non-positive or non-finite state are rejected. Throws IntegrationError
// when the step size falls below options.min_step.
IntegrationResult integrate(const SystemSpec& system,
                            const TrajectoryState& initial,
                            const std::optional<LevelEvent>& stop,
                            const IntegrationOptions& options = {});

// Estimates for the next crossing of a prey or predator level by an LV
// trajectory starting at level value v > 1. Values are in biomass units.
struct ReturnBounds {
  double Y;        // v e^{-v}
  double lower;    // z1 Y
  double upper;    // z2 Y
  double z0_upper; // z0 Y
  double trivial_lower;  // Y
  double trivial_upper;  // e Y
};

ReturnBounds lv_return_bounds(StateVariable level_kind, double start_value);

// Ratio X1 / X0 bounds for the trapped-trajectory estimate, including both
// readings of the z0 link.
struct RatioChain {
  double outer_lower;     // e^{-X0/F_low}
  double lower;           // z1(X0/F_low) e^{-X0/F_low}
  double upper;           // z2(X0/F_up) e^{-X0/F_up}
  double z0_mirrored;     // z0(X0/F_up) e^{-X0/F_up}
  double outer_mirrored;  // e^{1 - X0/F_up}
  double z0_printed;      // z0(X0/F_up) e^{+X0/F_up}
  double outer_printed;   // e^{1 + X0/F_up}
};

struct TrappedInterval {
  double lower;  // -F_low W(-(X0/F_low) e^{-X0/F_low})
  double upper;  // -F_up W(-(X0/F_up) e^{-X0/F_up})
  RatioChain ratios;
};

// Requires 0 < F_low <= F_up < X0.
TrappedInterval trapped_return_interval(double X0, double F_low, double F_up);

// Minimal predator biomass on an RM trajectory started at (x_max, lambda):
// trapped_return_interval(x_max, a, h(lambda)).
TrappedInterval rm_min_predator_interval(double x_max, double lambda, double a);

// Same estimate for the return to s = lambda_star, 0 < lambda_star <= lambda,
// with F_up tightened to h(lambda_star).
TrappedInterval rm_shrunk_interval(double x0, double lambda_star, double a);

struct IntersectionResult {
  double crossing_value = 0.0;
  double predicted_lower = 0.0;
  double predicted_upper = 0.0;
  double level = 0.0;
  double refinement_residual = 0.0;

  bool contained() const {
    return predicted_lower <= crossing_value && crossing_value <= predicted_upper;
  }
};

// Pointwise check of F_low < F(S) < F_up and phi(S) < d/p along an arc.
// Endpoints may touch the bounds within `endpoint_slack`; interior samples
// get a few ulps for rounding.
struct ArcCheck {
  bool ok = true;
  int violations = 0;
  double worst_margin = 0.0;  // smallest slack seen; negative when violated
  std::string detail;
};

ArcCheck check_trapping_preconditions(const SystemSpec& system,
                                      std::span<const TrajectoryState> arc,
                                      double F_low, double F_up,
                                      double endpoint_slack = 1e-9);

struct LvReturn {
  IntersectionResult intersection;
  IntegrationResult trajectory;
  double max_v_drift = 0.0;
};

// Integrates LV from (x0, s0) to the next crossing of the chosen level
// (x = x0 for Prey-valued estimates, s = s0 for Predator-valued ones) and
// compares with lv_return_bounds.
LvReturn lv_next_intersection(const LotkaVolterra& system, double x0, double s0,
                              StateVariable estimated,
                              const IntegrationOptions& options = {});

struct RmReturn {
  IntersectionResult intersection;
  IntegrationResult trajectory;
  ArcCheck preconditions;
  TrappedInterval interval;
};

// Integrates RM from (x0, level) to the next crossing of s = level, where
// level <= lambda, and compares with rm_shrunk_interval.
RmReturn rm_next_intersection(const RosenzweigMacArthur& system, double x0,
                              double level, const IntegrationOptions& options = {});

// Prey coordinate s < lambda of the curve V_F(x, s) = V_F(start) for RM,
// or NaN when x is outside the curve's range.
double rm_barrier_prey(const RosenzweigMacArthur& system, double F,
                       const TrajectoryState& start, double x);

struct RMPhysicalParams {
  double r = 1.0;
  double K = 1.0;
  double A = 0.1;
  double p = 2.0;
  double q = 1.0;
  double d = 1.0;
};

// a = A/K, m = (p - d)/r, lambda = d A / ((p - d) K). Requires p > d.
RosenzweigMacArthur rm_nondimensionalize(const RMPhysicalParams& phys);

}  // namespace lvb
