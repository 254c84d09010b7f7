// Adaptive Simpson quadrature with Richardson correction.  Used by the
// test oracles and by the branching-matrix computation; the hot paths of
// the library never integrate numerically.
#pragma once

#include <cmath>
#include <functional>

#include "memip/types.hpp"

namespace memip {

namespace detail {

inline double simpson_step(double a, double fa, double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson_rec(const std::function<double(double)>& f,
                                   double a, double fa, double b, double fb,
                                   double m, double fm, double whole, double tol,
                                   int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson_step(a, fa, m, fm, flm);
  const double right = simpson_step(m, fm, b, fb, frm);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol,
                              depth - 1) +
         adaptive_simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol,
                              depth - 1);
}

}  // namespace detail

// Integrates f over [a, b] to absolute tolerance tol (best effort; recursion
// depth is capped).  Non-finite integrand values raise numeric_error.
inline double adaptive_simpson(const std::function<double(double)>& f, double a,
                               double b, double tol = 1e-12,
                               int max_depth = 48) {
  if (a == b) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  if (!std::isfinite(fa) || !std::isfinite(fb) || !std::isfinite(fm)) {
    throw numeric_error("quadrature: integrand is not finite");
  }
  const double whole = detail::simpson_step(a, fa, b, fb, fm);
  const double result =
      detail::adaptive_simpson_rec(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
  if (!std::isfinite(result)) {
    throw numeric_error("quadrature: integral did not evaluate to a finite value");
  }
  return result;
}

}  // namespace memip
