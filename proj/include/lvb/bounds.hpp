#pragma once

// Closed-form bounds for the small root of x - ln x = y - ln y.
//
// Writing the root as x = z * Y with Y = y e^{-y}, the factor z in (1, e)
// solves ln(z) / z = Y. Replacing ln z by a rational function f that lies
// above or below it on [1, e] turns that equation into a quadratic whose
// root brackets z.

#include <cmath>

namespace lvb {

inline const double kE = std::exp(1.0);
inline const double kInvE = std::exp(-1.0);

// Which side of ln z the rational function lies on for 1 < z < e.
enum class LogSide { Below, Above };

// f(z) = ((z - 1) + a (z - 1)^2) / (c z + d), with f(1) = 0 and f(e) = 1.
struct PadeBound {
  double a = 0.0;
  double c = 0.0;
  double d = 0.0;
  LogSide side = LogSide::Below;

  // Fixes d from the endpoint condition f(e) = 1.
  static PadeBound through_endpoints(double a, double c, LogSide side);

  // Unchecked evaluation.
  double operator()(double z) const {
    const double t = z - 1.0;
    return (t + a * t * t) / (c * z + d);
  }
};

// Rational families used by the bounds. Coefficients are derived from kE
// when first requested.
struct PadeFamilies {
  // First order, a = 0.
  PadeBound linear;          // c = 0; below ln z
  PadeBound tangent_at_one;  // slope matches ln at 1; above ln z
  PadeBound tangent_at_e;    // slope matches ln at e; below ln z
  // Second order.
  PadeBound two_point_tangent;  // slopes match at 1 and e; above ln z
  PadeBound osculating_at_one;  // value, slope, curvature at 1; below ln z
  PadeBound osculating_at_e;    // value, slope, curvature at e; below ln z
};

const PadeFamilies& default_families();

// f(z) for z in [1, e]; DomainError outside.
double pade_eval(const PadeBound& f, double z);

// Root of f(z) / z = Y taken on the branch that starts at z = 1 for Y = 0.
// Accepts the closed interval Y in [0, 1/e]. Evaluated as
//   z = 2 (1 - a) / ((1 - 2a - dY) + sqrt((1 - dY)^2 - 4Y(c - a(d + c))))
// which has no removable singularity at Y = 0 or at c Y = a.
double pade_z_root(const PadeBound& f, double Y);

// Checks that the selected root lies in [1, e] for a few Y across the domain.
bool branch_self_check(const PadeFamilies& families);

struct ZProblem {
  double y;
  double Y;  // y e^{-y}, in (0, 1/e)

  static ZProblem from_y(double y);
};

// z in (1, e) with ln(z)/z = y e^{-y}. Safeguarded Newton on [1, e].
double exact_z(double y);

// The root x in (0, 1) of x - ln x = y - ln y, computed as exact_z(y) * Y.
double exact_small_root(double y);

// Root x in (0, a) of x - a ln x = y - a ln y, by rescaling to a = 1.
double scaled_small_root(double a, double y);

// z1 < z < z2 < z0 from the first-order families.
struct FirstOrderZBounds {
  double z1;  // from tangent_at_one
  double z2;  // from tangent_at_e
  double z0;  // from linear, 1 / (1 - (e - 1) Y)
};

// tz1 < z < min(tz2, tz3) from the second-order families.
struct SecondOrderZBounds {
  double tz1;
  double tz2;
  double tz3;

  double upper() const { return tz2 < tz3 ? tz2 : tz3; }
};

// Y in (0, 1/e); DomainError outside or within 1e-15 of 1/e.
FirstOrderZBounds first_order_z_bounds(double Y);
FirstOrderZBounds first_order_z_bounds(double Y, const PadeFamilies& families);
SecondOrderZBounds second_order_z_bounds(double Y);
SecondOrderZBounds second_order_z_bounds(double Y,
                                         const PadeFamilies& families);

}  // namespace lvb
