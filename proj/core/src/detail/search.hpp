#pragma once

#include <cmath>

namespace mdh::detail {

// Bisection for a sign change of `deriv` on [a, b]; `deriv(a)` and
// `deriv(b)` must have opposite signs.
template <class Deriv>
double bisect_sign_change(Deriv&& deriv, double a, double b, double tol) {
  const bool a_negative = deriv(a) < 0.0;
  while (b - a > tol) {
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;
    if ((deriv(mid) < 0.0) == a_negative) a = mid;
    else b = mid;
  }
  return 0.5 * (a + b);
}

// Golden-section search for a minimum of `value` on [a, b].
template <class Value>
double golden_minimize(Value&& value, double a, double b, double tol) {
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - ratio * (b - a);
  double x2 = a + ratio * (b - a);
  double f1 = value(x1);
  double f2 = value(x2);
  while (b - a > tol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - ratio * (b - a);
      f1 = value(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + ratio * (b - a);
      f2 = value(x2);
    }
  }
  return 0.5 * (a + b);
}

// Refines an extremum bracketed by [a, b]. For a minimum the derivative goes
// from negative to positive; for a maximum the reverse. Falls back to a
// golden-section search on the values when the derivative signs at the
// bracket ends disagree with the grid (very flat or underflowing stretches).
template <class Value, class Deriv>
double refine_extremum(Value&& value, Deriv&& deriv, double a, double b, double tol,
                       bool is_min) {
  const double da = deriv(a);
  const double db = deriv(b);
  const bool ok = is_min ? (da < 0.0 && db > 0.0) : (da > 0.0 && db < 0.0);
  if (ok) return bisect_sign_change(deriv, a, b, tol);
  if (is_min) return golden_minimize(value, a, b, tol);
  return golden_minimize([&](double x) { return -value(x); }, a, b, tol);
}

}  // namespace mdh::detail
