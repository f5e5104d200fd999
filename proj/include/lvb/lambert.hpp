#pragma once

// Principal-branch Lambert W and closed-form bounds on (-1/e, 0).

#include "lvb/bounds.hpp"

namespace lvb {

// Principal branch, W(X) >= -1, for X >= -1/e (1e-15 slack below).
// Halley iteration from a branch-point series, Taylor or logarithmic start.
double lambert_w(double X);

// W(-y e^{-y}) for y > 1; equals -exact_small_root(y).
double w_of_minus_y_exp(double y);

// Images of the first-order z bounds under W(X) = z X, X = -Y.
// Because X < 0 the ordering flips: w0 <= w2 <= W(X) <= w1.
// Columns Z1, Z2, Z0 in CSV output.
struct FirstOrderWBounds {
  double w1;
  double w2;
  double w0;
};

// Images of the second-order z bounds: max(w2, w3) <= W(X) <= w1.
// Columns TZ1, TZ2, TZ3 in CSV output.
struct SecondOrderWBounds {
  double w1;
  double w2;
  double w3;

  double lower() const { return w2 > w3 ? w2 : w3; }
};

// X in the open interval (-1/e, 0).
FirstOrderWBounds first_order_w_bounds(double X);
FirstOrderWBounds first_order_w_bounds(double X, const PadeFamilies& families);
SecondOrderWBounds second_order_w_bounds(double X);
SecondOrderWBounds second_order_w_bounds(double X,
                                         const PadeFamilies& families);

// 2 ln y - y < sqrt(8 (y - 1 - ln y)) - y < W(-y e^{-y}) < ln y - 1.
struct ElementaryWChain {
  double lower_a;
  double lower_b;
  double upper;
};

ElementaryWChain elementary_w_chain(double y);

// Tangent-line upper bound (X + ybar) / (1 + ln ybar), ybar > 1/e.
double w_tangent_upper(double X, double ybar);
// Same with ybar = X + 1.
double w_tangent_upper(double X);

// Coefficient (-n)^(n-1) / n! of X^n in the Maclaurin series of W.
double w_series_coefficient(int n);

// Partial sum with n_terms in [1, 30].
double w_series(double X, int n_terms);

}  // namespace lvb
