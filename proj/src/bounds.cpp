#include "lvb/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "lvb/errors.hpp"

namespace lvb {
namespace {

constexpr double kYMargin = 1e-15;
constexpr double kZResidualTol = 1e-13;
constexpr int kMaxIterations = 200;

std::string describe(const char* what, double value) {
  std::ostringstream os;
  os.precision(17);
  os << what << " (got " << value << ")";
  return os.str();
}

void require_open_y_interval(double Y) {
  if (!(Y > 0.0) || !(Y < kInvE - kYMargin)) {
    throw DomainError(describe("Y must lie in (0, 1/e)", Y));
  }
}

PadeFamilies build_families() {
  const double e = kE;
  const double em1 = e - 1.0;

  PadeFamilies f;
  f.linear = PadeBound::through_endpoints(0.0, 0.0, LogSide::Below);
  f.tangent_at_one =
      PadeBound::through_endpoints(0.0, (e - 2.0) / em1, LogSide::Above);
  f.tangent_at_e = PadeBound::through_endpoints(0.0, 1.0 / e, LogSide::Below);

  f.two_point_tangent = PadeBound::through_endpoints(
      1.0 - e / (em1 * em1), em1 - 2.0 / em1, LogSide::Above);
  f.osculating_at_one = PadeBound::through_endpoints(
      (3.0 - e) / (2.0 * em1 * (e - 2.0)),
      (e * e - 4.0 * e + 5.0) / (2.0 * em1 * (e - 2.0)), LogSide::Below);
  const double c3 = (2.0 * e - em1 * em1) / (2.0 + em1 * em1);
  f.osculating_at_e = PadeBound::through_endpoints((c3 * e - 1.0) / (e * e - 1.0),
                                                   c3, LogSide::Below);

  if (!branch_self_check(f)) {
    throw std::logic_error("pade_z_root: selected branch left [1, e]");
  }
  return f;
}

}  // namespace

PadeBound PadeBound::through_endpoints(double a, double c, LogSide side) {
  const double em1 = kE - 1.0;
  return PadeBound{a, c, em1 - c * kE + a * em1 * em1, side};
}

const PadeFamilies& default_families() {
  static const PadeFamilies families = build_families();
  return families;
}

double pade_eval(const PadeBound& f, double z) {
  if (!(z >= 1.0 && z <= kE)) {
    throw DomainError(describe("pade_eval: z must lie in [1, e]", z));
  }
  return f(z);
}

double pade_z_root(const PadeBound& f, double Y) {
  if (!(Y >= 0.0 && Y <= kInvE + kYMargin)) {
    throw DomainError(describe("pade_z_root: Y must lie in [0, 1/e]", Y));
  }
  const double one_minus_dY = 1.0 - f.d * Y;
  double disc = one_minus_dY * one_minus_dY -
                4.0 * Y * (f.c - f.a * (f.d + f.c));
  if (disc < 0.0) {
    // Double roots at Y = 1/e round to tiny negatives.
    if (disc > -64.0 * std::numeric_limits<double>::epsilon()) {
      disc = 0.0;
    } else {
      throw std::logic_error(describe("pade_z_root: negative discriminant", disc));
    }
  }
  const double denom = (1.0 - 2.0 * f.a - f.d * Y) + std::sqrt(disc);
  if (!(denom > 0.0)) {
    throw std::logic_error(describe("pade_z_root: degenerate denominator", denom));
  }
  return 2.0 * (1.0 - f.a) / denom;
}

bool branch_self_check(const PadeFamilies& families) {
  const PadeBound* all[] = {&families.linear,
                            &families.tangent_at_one,
                            &families.tangent_at_e,
                            &families.two_point_tangent,
                            &families.osculating_at_one,
                            &families.osculating_at_e};
  for (double Y : {1e-6, 0.1, kInvE - 1e-6}) {
    for (const PadeBound* f : all) {
      const double z = pade_z_root(*f, Y);
      if (!(z >= 1.0 && z <= kE)) return false;
    }
  }
  return true;
}

ZProblem ZProblem::from_y(double y) {
  if (!(y > 1.0 + 1e-12) || !std::isfinite(y)) {
    throw DomainError(describe("y must exceed 1", y));
  }
  return ZProblem{y, y * std::exp(-y)};
}

double exact_z(double y) {
  const double Y = ZProblem::from_y(y).Y;
  if (Y == 0.0) return 1.0;  // y e^{-y} underflows past y ~ 745

  // Work with u = z - 1. g(u) = log1p(u) - Y (1 + u) is increasing on
  // [0, e - 1] because Y < 1/e, with g(0) < 0 < g(e - 1).
  auto g = [Y](double u) { return std::log1p(u) - Y * (1.0 + u); };
  double lo = 0.0;
  double hi = kE - 1.0;
  double u = std::min(hi, (kE - 1.0) * Y / (1.0 - (kE - 1.0) * Y));

  const double eps = std::numeric_limits<double>::epsilon();
  for (int it = 0; it < kMaxIterations; ++it) {
    const double gu = g(u);
    if (gu == 0.0) break;
    if (gu < 0.0) {
      lo = u;
    } else {
      hi = u;
    }
    const double slope = 1.0 / (1.0 + u) - Y;
    double next = u - gu / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::fabs(next - u);
    u = next;
    if (step <= 2.0 * eps * (1.0 + u) || hi - lo <= 2.0 * eps * (1.0 + hi)) {
      break;
    }
  }

  const double z = 1.0 + u;
  const double residual = std::fabs(std::log(z) / z - Y);
  if (!(residual < kZResidualTol)) {
    throw ConvergenceError(describe("exact_z: residual above 1e-13", residual));
  }
  return z;
}

double exact_small_root(double y) {
  const ZProblem p = ZProblem::from_y(y);
  return exact_z(y) * p.Y;
}

double scaled_small_root(double a, double y) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw DomainError(describe("scaled_small_root: a must be positive", a));
  }
  if (!(y > a)) {
    throw DomainError(describe("scaled_small_root: y must exceed a", y));
  }
  return a * exact_small_root(y / a);
}

FirstOrderZBounds first_order_z_bounds(double Y) {
  return first_order_z_bounds(Y, default_families());
}

FirstOrderZBounds first_order_z_bounds(double Y, const PadeFamilies& families) {
  require_open_y_interval(Y);
  return FirstOrderZBounds{pade_z_root(families.tangent_at_one, Y),
                           pade_z_root(families.tangent_at_e, Y),
                           pade_z_root(families.linear, Y)};
}

SecondOrderZBounds second_order_z_bounds(double Y) {
  return second_order_z_bounds(Y, default_families());
}

SecondOrderZBounds second_order_z_bounds(double Y,
                                         const PadeFamilies& families) {
  require_open_y_interval(Y);
  return SecondOrderZBounds{pade_z_root(families.two_point_tangent, Y),
                            pade_z_root(families.osculating_at_one, Y),
                            pade_z_root(families.osculating_at_e, Y)};
}

}  // namespace lvb
