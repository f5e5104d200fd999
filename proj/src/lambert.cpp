#include "lvb/lambert.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "lvb/errors.hpp"

namespace lvb {
namespace {

// 1/e split into a double and its rounding error, for X + 1/e near the
// branch point.
constexpr double kInvEHi = 0.36787944117144233;
constexpr double kInvELo = -1.2428753672788363e-17;

constexpr double kBranchSlack = 1e-15;
constexpr int kMaxHalley = 64;

std::string describe(const char* what, double value) {
  std::ostringstream os;
  os.precision(17);
  os << what << " (got " << value << ")";
  return os.str();
}

double distance_to_branch_point(double X) { return (X + kInvEHi) + kInvELo; }

double initial_guess(double X, double q) {
  if (X < -0.2) {
    // W = -1 + p - p^2/3 + 11/72 p^3 - ... with p = sqrt(2 (e X + 1)).
    const double p = std::sqrt(2.0 * kE * q);
    return -1.0 +
           p * (1.0 +
                p * (-1.0 / 3.0 +
                     p * (11.0 / 72.0 +
                          p * (-43.0 / 540.0 +
                               p * (769.0 / 17280.0 - p * 221.0 / 8505.0)))));
  }
  if (X < 0.2) {
    return X * (1.0 + X * (-1.0 + X * (1.5 + X * (-8.0 / 3.0 + X * 125.0 / 24.0))));
  }
  if (X < kE) return std::log1p(X) * (1.0 - 0.25 * std::log1p(X));
  const double l1 = std::log(X);
  const double l2 = std::log(l1);
  return l1 - l2 + l2 / l1;
}

void require_negative_w_domain(double X, const char* who) {
  if (!(X < 0.0) || !(distance_to_branch_point(X) > 0.0)) {
    throw DomainError(describe(who, X));
  }
}

}  // namespace

double lambert_w(double X) {
  if (!std::isfinite(X)) throw DomainError(describe("lambert_w: non-finite argument", X));
  const double q = distance_to_branch_point(X);
  if (q < -kBranchSlack) {
    throw DomainError(describe("lambert_w: argument below -1/e", X));
  }
  if (q <= 0.0) return -1.0;
  if (X == 0.0) return 0.0;

  const double eps = std::numeric_limits<double>::epsilon();
  double w = initial_guess(X, q);
  for (int it = 0; it < kMaxHalley; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - X;
    // Rounding floor of f; below this further steps chase noise.
    if (std::fabs(f) <= 2.0 * eps * (std::fabs(w * ew) + std::fabs(X))) {
      return w < -1.0 ? -1.0 : w;
    }
    const double wp1 = w + 1.0;
    const double dw = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
    const double previous = w;
    w -= dw;
    // Stay on the principal branch.
    if (w <= -1.0) w = 0.5 * (previous - 1.0);
    if (std::fabs(dw) <= 4.0 * eps * (1.0 + std::fabs(w))) {
      return w;
    }
  }
  throw ConvergenceError(describe("lambert_w: Halley iteration did not converge", X));
}

double w_of_minus_y_exp(double y) {
  if (!(y > 1.0) || !std::isfinite(y)) {
    throw DomainError(describe("w_of_minus_y_exp: y must exceed 1", y));
  }
  return lambert_w(-y * std::exp(-y));
}

FirstOrderWBounds first_order_w_bounds(double X) {
  return first_order_w_bounds(X, default_families());
}

FirstOrderWBounds first_order_w_bounds(double X, const PadeFamilies& families) {
  require_negative_w_domain(X, "first_order_w_bounds: X must lie in (-1/e, 0)");
  // (-1 - dX + sqrt((1 + dX)^2 + 4cX)) / (2c), rationalized.
  auto image = [X](const PadeBound& f) {
    const double t = 1.0 + f.d * X;
    double disc = t * t + 4.0 * f.c * X;
    if (disc < 0.0) disc = 0.0;
    return 2.0 * X / (t + std::sqrt(disc));
  };
  return FirstOrderWBounds{image(families.tangent_at_one),
                           image(families.tangent_at_e),
                           X / (1.0 + (kE - 1.0) * X)};
}

SecondOrderWBounds second_order_w_bounds(double X) {
  return second_order_w_bounds(X, default_families());
}

SecondOrderWBounds second_order_w_bounds(double X,
                                         const PadeFamilies& families) {
  require_negative_w_domain(X, "second_order_w_bounds: X must lie in (-1/e, 0)");
  // (2a - 1 - dX + sqrt(D)) / (2 (c + a/X)) with
  // D = (1 + dX)^2 + 4X(c - a(d + c)), rationalized so that neither X = 0
  // nor cX + a = 0 is a removable singularity.
  auto image = [X](const PadeBound& f) {
    const double t = 1.0 + f.d * X;
    double disc = t * t + 4.0 * X * (f.c - f.a * (f.d + f.c));
    if (disc < 0.0) disc = 0.0;
    return 2.0 * (1.0 - f.a) * X / (1.0 - 2.0 * f.a + f.d * X + std::sqrt(disc));
  };
  return SecondOrderWBounds{image(families.two_point_tangent),
                            image(families.osculating_at_one),
                            image(families.osculating_at_e)};
}

ElementaryWChain elementary_w_chain(double y) {
  if (!(y > 1.0) || !std::isfinite(y)) {
    throw DomainError(describe("elementary_w_chain: y must exceed 1", y));
  }
  const double ln_y = std::log(y);
  // y - 1 - ln y without cancellation near y = 1.
  const double gap = (y - 1.0) - std::log1p(y - 1.0);
  return ElementaryWChain{2.0 * ln_y - y, std::sqrt(8.0 * gap) - y, ln_y - 1.0};
}

double w_tangent_upper(double X, double ybar) {
  if (!std::isfinite(X) || distance_to_branch_point(X) < -kBranchSlack) {
    throw DomainError(describe("w_tangent_upper: X must be >= -1/e", X));
  }
  if (!(ybar > kInvE) || !std::isfinite(ybar)) {
    throw DomainError(describe("w_tangent_upper: ybar must exceed 1/e", ybar));
  }
  return (X + ybar) / (1.0 + std::log(ybar));
}

double w_tangent_upper(double X) { return w_tangent_upper(X, X + 1.0); }

double w_series_coefficient(int n) {
  if (n < 1 || n > 30) {
    throw std::invalid_argument("w_series_coefficient: n must lie in [1, 30]");
  }
  double numerator = 1.0;
  for (int k = 1; k < n; ++k) numerator *= -static_cast<double>(n);
  double factorial = 1.0;
  for (int k = 2; k <= n; ++k) factorial *= k;
  return numerator / factorial;
}

double w_series(double X, int n_terms) {
  if (n_terms < 1 || n_terms > 30) {
    throw std::invalid_argument("w_series: n_terms must lie in [1, 30]");
  }
  double sum = 0.0;
  for (int n = n_terms; n >= 1; --n) {
    sum = (sum + w_series_coefficient(n)) * X;
  }
  return sum;
}

}  // namespace lvb
