#pragma once

// Cutting-plane driver for constraints of the form
//   min over theta in a region of  a(theta)^T x - b(theta) >= 0.
// The inner solver optimizes over the finite cut set; the oracle returns the
// most violated member at the current point.

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <optional>
#include <utility>

#include "sepec/error.hpp"
#include "sepec/linalg.hpp"
#include "sepec/opt/frank_wolfe.hpp"
#include "sepec/opt/polytope.hpp"

namespace sepec::opt {

struct CutQuery {
  Vec a;          // the cut a^T x >= b
  double b = 0.0;
  double margin = 0.0;  // a^T x - b at the queried point (the worst case over the region)
};

struct CuttingPlaneConfig {
  std::size_t max_cuts = 200;
  double feas_tol = 1e-9;
  // When positive and an anchor is known, a point whose violation is below
  // this level is mixed toward the anchor instead of adding more cuts.
  double repair_tol = 0.0;
};

struct CuttingPlaneResult {
  Vec x;
  SolveDiagnostics diagnostics;
  Polytope polytope;  // the final cut set
};

struct InnerSolution {
  Vec x;
  SolveDiagnostics diagnostics;
};

namespace detail {

// Smallest t in [0,1] with (1-t) x + t anchor satisfying the cut, for a cut
// the anchor satisfies.
inline Vec mix_toward(const Vec& x, const Vec& anchor, const Vec& a, double b) {
  const double ax = a.dot(x), aa = a.dot(anchor);
  if (ax >= b) return x;
  if (!(aa > ax)) return anchor;
  const double t = std::min(1.0, (b - ax) / (aa - ax) * (1.0 + 1e-12) + 1e-15);
  return (1.0 - t) * x + t * anchor;
}

}  // namespace detail

// anchor: optional point feasible for the full (infinite) constraint family.
// It seeds warm starts after each new cut and enables the repair step.
template <class Inner, class Oracle>
CuttingPlaneResult cutting_plane(Polytope poly, Inner&& inner, Oracle&& oracle, const CuttingPlaneConfig& cfg = {},
                                 const std::optional<Vec>& anchor = std::nullopt) {
  const auto start = std::chrono::steady_clock::now();
  std::optional<Vec> warm = anchor;
  std::size_t inner_iters = 0;
  auto finish = [&](Vec x, const InnerSolution& sol, double margin, bool repaired) -> CuttingPlaneResult {
    CuttingPlaneResult out{std::move(x), {}, poly};
    out.diagnostics = sol.diagnostics;
    out.diagnostics.iterations = inner_iters;
    out.diagnostics.cuts = poly.cuts().size();
    out.diagnostics.residual = margin;
    out.diagnostics.repaired = repaired;
    out.diagnostics.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
  };

  for (;;) {
    InnerSolution sol = inner(static_cast<const Polytope&>(poly), static_cast<const std::optional<Vec>&>(warm));
    inner_iters += sol.diagnostics.iterations;
    CutQuery cut = oracle(static_cast<const Vec&>(sol.x));
    if (cut.margin >= -cfg.feas_tol) return finish(sol.x, sol, cut.margin, false);

    const bool budget_left = poly.cuts().size() < cfg.max_cuts;
    if (anchor && (cut.margin >= -cfg.repair_tol || !budget_left)) {
      const CutQuery at_anchor = oracle(*anchor);
      if (at_anchor.margin >= 0.0 && at_anchor.margin > cut.margin) {
        // The constraint is concave in x, so mixing by t keeps at least the
        // linear interpolation of the margins.
        double t = -cut.margin / (at_anchor.margin - cut.margin);
        for (int attempt = 0; attempt < 60; ++attempt) {
          const Vec y = (1.0 - t) * sol.x + t * *anchor;
          const CutQuery q = oracle(y);
          if (q.margin >= -cfg.feas_tol) return finish(y, sol, q.margin, true);
          t = std::min(1.0, t * 1.5 + 1e-12);
        }
      }
    }
    if (!budget_left)
      throw BudgetExhausted("cutting_plane: cut budget exhausted with the constraint still violated", sol.x,
                            cut.margin, poly.cuts().size());

    poly.add_cut(cut.a, cut.b);
    if (anchor)
      warm = detail::mix_toward(sol.x, *anchor, cut.a, cut.b);
    else
      warm.reset();
  }
}

}  // namespace sepec::opt
