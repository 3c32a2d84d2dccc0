#pragma once

// Recursive adaptive Simpson quadrature for test oracles. Deliberately a
// different method from the library's Gauss-Kronrod rule so transform and
// convolution checks do not share an integration path with what they verify.

#include <cmath>
#include <functional>

namespace oracle {

namespace detail {

inline double simpson(const std::function<double(double)>& f, double a,
                      double fa, double b, double fb, double& fm) {
  const double m = 0.5 * (a + b);
  fm = f(m);
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double simpson_rec(const std::function<double(double)>& f, double a,
                          double fa, double m, double fm, double b, double fb,
                          double whole, double tol, int depth) {
  double flm, frm;
  const double left = simpson(f, a, fa, m, fm, flm);
  const double right = simpson(f, m, fm, b, fb, frm);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return simpson_rec(f, a, fa, 0.5 * (a + m), flm, m, fm, left, 0.5 * tol,
                     depth - 1) +
         simpson_rec(f, m, fm, 0.5 * (m + b), frm, b, fb, right, 0.5 * tol,
                     depth - 1);
}

}  // namespace detail

inline double integrate_simpson(const std::function<double(double)>& f,
                                double a, double b, double tol,
                                int max_depth = 40) {
  const double fa = f(a), fb = f(b);
  double fm;
  const double whole = detail::simpson(f, a, fa, b, fb, fm);
  return detail::simpson_rec(f, a, fa, 0.5 * (a + b), fm, b, fb, whole, tol,
                             max_depth);
}

}  // namespace oracle
