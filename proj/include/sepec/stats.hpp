#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "sepec/error.hpp"

namespace sepec {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

namespace detail {

// Bisection for the root of a nondecreasing function on [lo, hi].
template <class F>
double bisect_increasing(F&& f, double target, double lo, double hi, double tol) {
  for (int it = 0; it < 400 && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) < target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

// Standard-normal quantile: monotone bisection on the erfc-based CDF, then
// Newton steps to full double precision.
inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("normal_quantile: p must lie in (0,1)");
  // Work on the tail closest to p so that tiny p stays well conditioned.
  if (p > 0.5) return -normal_quantile(1.0 - p);
  double x = detail::bisect_increasing([](double t) { return normal_cdf(t); }, p, -40.0, 0.0, 1e-13);
  constexpr double inv_sqrt_2pi = 0.39894228040143267794;
  for (int it = 0; it < 2; ++it) {
    const double pdf = inv_sqrt_2pi * std::exp(-0.5 * x * x);
    if (!(pdf > 0.0)) break;
    x -= (normal_cdf(x) - p) / pdf;
  }
  return x;
}

// Regularized lower incomplete gamma P(a, x).
inline double regularized_gamma_p(double a, double x) {
  if (!(a > 0.0)) throw InvalidArgument("regularized_gamma_p: a must be positive");
  if (x <= 0.0) return 0.0;
  const double log_prefix = a * std::log(x) - x - std::lgamma(a);
  if (x < a + 1.0) {
    // Series expansion.
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < 10000; ++n) {
      term *= x / (a + n);
      sum += term;
      if (std::abs(term) < std::abs(sum) * 1e-17) break;
    }
    return std::exp(log_prefix) * sum;
  }
  // Continued fraction for Q(a, x) (modified Lentz).
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return 1.0 - std::exp(log_prefix) * h;
}

inline double chi2_cdf(double x, double dof) {
  if (!(dof > 0.0)) throw InvalidArgument("chi2_cdf: dof must be positive");
  return regularized_gamma_p(0.5 * dof, 0.5 * x);
}

// Chi-square quantile by bisection on the CDF, tolerance 1e-10.
inline double chi2_quantile(double p, double dof) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("chi2_quantile: p must lie in (0,1)");
  double hi = std::max(1.0, dof);
  while (chi2_cdf(hi, dof) < p) hi *= 2.0;
  return detail::bisect_increasing([dof](double x) { return chi2_cdf(x, dof); }, p, 0.0, hi,
                                   1e-10);
}

}  // namespace sepec
