#pragma once

// Test-only reference computations. Nothing here calls into the library's
// numerical routines.

#include <cmath>
#include <functional>
#include <numbers>

namespace qcslab::test {

inline double std_normal_pdf(double t) {
  return std::exp(-0.5 * t * t) / std::sqrt(2.0 * std::numbers::pi);
}

namespace detail {

inline double simpson(const std::function<double(double)>& f, double a, double b, double fa,
                      double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson quadrature on a finite interval.
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-13) {
  if (a == b) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson(f, a, b, fa, fm, fb, whole, tol, 50);
}

/// Integral of f(t) * N(0,1) density over [a, b]; infinite ends are cut at
/// +-12 where the density is below 1e-31.
inline double gaussian_integral(const std::function<double(double)>& f, double a, double b) {
  a = std::max(a, -12.0);
  b = std::min(b, 12.0);
  if (a >= b) return 0.0;
  return integrate([&](double t) { return f(t) * std_normal_pdf(t); }, a, b);
}

}  // namespace qcslab::test
