#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "sepec/core.hpp"
#include "sepec/error.hpp"
#include "sepec/linalg.hpp"

namespace sepec::opt {

// sum_a w_a / x_a with the 0/0 = 0 convention (w_a > 0, x_a = 0 gives +inf).
inline double ipw_surrogate(const Vec& w, const Vec& x) {
  double s = 0.0;
  for (Eigen::Index a = 0; a < w.size(); ++a) {
    if (w[a] == 0.0) continue;
    if (!(x[a] > 0.0)) return std::numeric_limits<double>::infinity();
    s += w[a] / x[a];
  }
  return s;
}

// argmin sum_a w_a / x_a over {sum x = 1, x >= l}. The KKT point is
// x_a = max(l_a, c sqrt(w_a)); c is bracketed by bisection and then solved
// exactly on the resulting active set.
inline PolicyVector waterfill_simplex(const Vec& w, const Vec& l) {
  const auto k = w.size();
  if (k < 1) throw InvalidArgument("waterfill_simplex: empty weights");
  if (l.size() != k) throw DimensionError("waterfill_simplex lower bounds", static_cast<std::size_t>(k), l.size());
  if (!w.allFinite() || (w.array() < 0.0).any()) throw InvalidArgument("waterfill_simplex: weights must be finite and >= 0");
  if (!l.allFinite() || (l.array() < 0.0).any()) throw InvalidArgument("waterfill_simplex: lower bounds must be finite and >= 0");
  const double lsum = l.sum();
  if (lsum > 1.0 + 1e-12) throw InfeasibleError("waterfill_simplex: lower bounds sum to more than 1");

  const Vec root = w.cwiseSqrt();
  const double root_sum = root.sum();
  Vec x(k);
  if (root_sum == 0.0) {
    // Nothing to estimate: park the slack on the largest floor.
    x = l;
    Eigen::Index park = 0;
    for (Eigen::Index a = 1; a < k; ++a)
      if (l[a] > l[park]) park = a;
    x[park] += std::max(0.0, 1.0 - lsum);
  } else {
    auto mass = [&](double c) { return (c * root).cwiseMax(l).sum(); };
    double lo = 0.0, hi = 1.0 / root_sum;
    while (mass(hi) < 1.0) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (mass(mid) < 1.0 ? lo : hi) = mid;
    }
    // Exact refinement: coordinates above their floor share the remaining mass.
    double c = hi;
    for (int pass = 0; pass < 4; ++pass) {
      double floor_mass = 0.0, free_root = 0.0;
      for (Eigen::Index a = 0; a < k; ++a) {
        if (c * root[a] > l[a])
          free_root += root[a];
        else
          floor_mass += l[a];
      }
      if (free_root <= 0.0) break;
      const double next = (1.0 - floor_mass) / free_root;
      if (next == c) break;
      c = next;
    }
    x = (c * root).cwiseMax(l);
    const double s = x.sum();
    // Leftover round-off goes to the largest coordinate.
    Eigen::Index big = 0;
    x.maxCoeff(&big);
    x[big] += 1.0 - s;
  }
  return PolicyVector(x);
}

}  // namespace sepec::opt
