#pragma once

// Exploration-policy design problems for MAB, contextual MAB and linear
// bandits, plus the comparison baselines.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "sepec/core.hpp"
#include "sepec/error.hpp"
#include "sepec/estimators.hpp"
#include "sepec/linalg.hpp"
#include "sepec/opt/cutting_plane.hpp"
#include "sepec/opt/frank_wolfe.hpp"
#include "sepec/opt/ipw_dual.hpp"
#include "sepec/opt/lp.hpp"
#include "sepec/opt/objectives.hpp"
#include "sepec/opt/polytope.hpp"
#include "sepec/opt/waterfill.hpp"
#include "sepec/regions.hpp"

namespace sepec {

using opt::SolveDiagnostics;

enum class WeightMode { Unit, Posterior, DoublyRobust };

struct DesignConfig {
  opt::CuttingPlaneConfig cutting_plane;
  opt::FrankWolfeConfig frank_wolfe;
  // Box regions: start the cut set with the supporting cut of the exact
  // optimum instead of an empty set.
  bool seed_support_cut = true;
};

struct DesignResult {
  Vec policy;                  // stacked context-major for contextual problems
  std::size_t contexts = 0;    // 0 for non-contextual problems
  double objective = 0.0;
  SolveDiagnostics diagnostics;
  double certificate = 0.0;    // worst-case safety margin over the region
  bool partial = false;
  std::string note;

  PolicyVector as_policy() const { return PolicyVector(policy); }
  ContextualPolicy as_contextual(const Vec& context_probs) const {
    return ContextualPolicy::from_stacked(policy, static_cast<std::size_t>(policy.size()) / contexts, context_probs);
  }
};

inline constexpr double kSupportFloor = 1e-12;

namespace detail {

inline void require_eps(double eps) {
  if (!std::isfinite(eps) || eps > 1.0) throw InvalidArgument("design: epsilon must lie in (0,1]");
  if (eps <= 0.0) throw InfeasibleError("design: epsilon must be positive");
}

// Objective weights: pi_Delta^2 (unit), pi_Delta^2 (E sigma^2 + E r^2)
// (posterior) or pi_1^2 (doubly robust).
inline Vec design_weights(const Vec& pi0, const Vec& pi1, WeightMode mode, const std::optional<Vec>& moments) {
  const Vec delta = pi1 - pi0;
  switch (mode) {
    case WeightMode::Unit:
      return delta.array().square();
    case WeightMode::Posterior:
      if (!moments || moments->size() != delta.size())
        throw InvalidArgument("design: posterior weighting needs per-arm second moments");
      return delta.array().square() * moments->array();
    case WeightMode::DoublyRobust:
      return pi1.array().square();
  }
  return delta.array().square();
}

// Any coordinate where the target differs from the baseline must keep
// positive mass; repaired by moving 1e-9 from the largest coordinate of the
// same block.
inline bool support_guard(Vec& x, const Vec& delta, std::size_t block) {
  bool touched = false;
  for (Eigen::Index a = 0; a < x.size(); ++a) {
    if (delta[a] == 0.0 || x[a] >= kSupportFloor) continue;
    const auto off = static_cast<Eigen::Index>(static_cast<std::size_t>(a) / block * block);
    Eigen::Index big = 0;
    x.segment(off, static_cast<Eigen::Index>(block)).maxCoeff(&big);
    x[off + big] -= 1e-9;
    x[a] += 1e-9;
    touched = true;
  }
  return touched;
}

// min over r in [0,1]^n of r^T (x - floor), per block weighted by block_w.
inline double worst_case_margin(const Vec& x, const Vec& floor) {
  return (x - floor).cwiseMin(0.0).sum();
}

inline Vec stacked_waterfill(const Vec& w, const Vec& l, std::size_t block) {
  Vec x(w.size());
  for (Eigen::Index off = 0; off < w.size(); off += static_cast<Eigen::Index>(block)) {
    const auto n = static_cast<Eigen::Index>(block);
    x.segment(off, n) = opt::waterfill_simplex(w.segment(off, n), l.segment(off, n)).weights();
  }
  return x;
}

// Inner solver for the IPW surrogate: exact water-filling while no cuts are
// present, away-step Frank-Wolfe from the warm start otherwise.
// Exact dual solve when every weight is positive, Frank-Wolfe otherwise. The
// cut multipliers carry over between cutting-plane rounds.
inline auto ipw_inner(const Vec& w, std::size_t block, const opt::FrankWolfeConfig& fw) {
  auto multipliers = std::make_shared<Vec>();
  return [w, block, fw, multipliers](const opt::Polytope& poly, const std::optional<Vec>& warm) {
    opt::InnerSolution sol;
    if (poly.cuts().empty()) {
      sol.x = stacked_waterfill(w, poly.lower(), block);
      sol.diagnostics.objective = opt::ipw_surrogate(w, sol.x);
      return sol;
    }
    if (auto dual = opt::ipw_dual_solve(w, poly, *multipliers)) {
      *multipliers = dual->multipliers;
      sol.x = std::move(dual->x);
      sol.diagnostics.iterations = dual->iterations;
      sol.diagnostics.objective = dual->objective;
      sol.diagnostics.gap = dual->gap;
      sol.diagnostics.residual = -dual->violation;
      return sol;
    }
    opt::LinearProgram lp(poly);
    Vec start = warm ? *warm : lp.feasible_point();
    const opt::IpwSurrogate obj(w);
    auto res = opt::frank_wolfe(obj, lp, poly, start, fw);
    sol.x = std::move(res.x);
    sol.diagnostics = res.diagnostics;
    return sol;
  };
}

inline DesignResult finalize(Vec x, const Vec& delta, std::size_t block, double objective,
                             const SolveDiagnostics& diag, double certificate) {
  DesignResult out;
  // Clear round-off below zero left by the iterative solvers.
  if ((x.array() < -1e-9).any()) throw Error("design: solver returned a point outside the simplex");
  if ((x.array() < 0.0).any()) {
    x = x.cwiseMax(0.0);
    for (Eigen::Index off = 0; off < x.size(); off += static_cast<Eigen::Index>(block))
      x.segment(off, static_cast<Eigen::Index>(block)) /= x.segment(off, static_cast<Eigen::Index>(block)).sum();
  }
  if (support_guard(x, delta, block)) out.note = "support guard moved 1e-9 mass";
  out.policy = std::move(x);
  out.objective = objective;
  out.diagnostics = diag;
  out.certificate = certificate;
  return out;
}

// Re-certifies a finished design. If the support guard pushed it outside
// the safe set, mixes it toward the feasible anchor just enough to restore it.
template <class Oracle, class Objective>
void certify(DesignResult& out, Oracle& oracle, const std::optional<Vec>& anchor, double feas_tol,
             Objective&& objective) {
  out.certificate = oracle(static_cast<const Vec&>(out.policy)).margin;
  if (out.certificate >= -feas_tol || !anchor) return;
  const double at_anchor = oracle(*anchor).margin;
  if (!(at_anchor > out.certificate)) return;
  double t = -out.certificate / (at_anchor - out.certificate);
  for (int attempt = 0; attempt < 60; ++attempt) {
    const Vec y = (1.0 - t) * out.policy + t * *anchor;
    const double m = oracle(y).margin;
    if (m >= -feas_tol) {
      out.policy = y;
      out.certificate = m;
      out.objective = objective(out.policy);
      out.diagnostics.objective = out.objective;
      out.diagnostics.repaired = true;
      return;
    }
    t = std::min(1.0, t * 1.5 + 1e-12);
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// MAB

inline DesignResult design_mab_worstcase(const PolicyVector& pi0, const PolicyVector& pi1, double eps,
                                         WeightMode mode = WeightMode::Unit,
                                         const std::optional<Vec>& moments = std::nullopt) {
  detail::require_same_size(pi0.size(), pi1.size(), "design_mab_worstcase");
  detail::require_eps(eps);
  const Vec w = detail::design_weights(pi0.weights(), pi1.weights(), mode, moments);
  const Vec floor = (1.0 - eps) * pi0.weights();
  Vec x = opt::waterfill_simplex(w, floor).weights();
  SolveDiagnostics diag;
  diag.objective = opt::ipw_surrogate(w, x);
  const double cert = detail::worst_case_margin(x, floor);
  diag.residual = cert;
  return detail::finalize(std::move(x), pi1.weights() - pi0.weights(), pi0.size(), diag.objective, diag, cert);
}

// Safety over a box of mean rewards, enforced by cutting planes.
inline DesignResult design_mab_with_region(const PolicyVector& pi0, const PolicyVector& pi1, double eps,
                                           const BoxRegion& box, WeightMode mode = WeightMode::Unit,
                                           const std::optional<Vec>& moments = std::nullopt,
                                           const DesignConfig& cfg = {}) {
  detail::require_same_size(pi0.size(), pi1.size(), "design_mab_with_region");
  detail::require_same_size(pi0.size(), box.size(), "design_mab_with_region box");
  detail::require_eps(eps);
  const Vec delta = pi1.weights() - pi0.weights();
  const Vec floor = (1.0 - eps) * pi0.weights();
  auto oracle = [&](const Vec& x) {
    const auto worst = min_linear_over_box(x - floor, box);
    return opt::CutQuery{worst.point, worst.point.dot(floor), worst.value};
  };
  if (delta.cwiseAbs().maxCoeff() == 0.0) {
    DesignResult out;
    out.policy = pi0.weights();
    out.certificate = oracle(out.policy).margin;
    out.diagnostics.residual = out.certificate;
    return out;
  }
  const Vec w = detail::design_weights(pi0.weights(), pi1.weights(), mode, moments);
  const Vec anchor = opt::waterfill_simplex(w, floor).weights();
  opt::Polytope poly(pi0.size());
  if (cfg.seed_support_cut)
    if (auto cut = opt::ipw_box_support_cut(w, pi0.size(), floor, box.lower(), box.upper())) poly.add_cut(cut->a, cut->b);
  auto res = opt::cutting_plane(poly, detail::ipw_inner(w, pi0.size(), cfg.frank_wolfe), oracle, cfg.cutting_plane,
                                anchor);
  const double objective = opt::ipw_surrogate(w, res.x);
  res.diagnostics.objective = objective;
  DesignResult out = detail::finalize(std::move(res.x), delta, pi0.size(), objective, res.diagnostics, 0.0);
  detail::certify(out, oracle, anchor, cfg.cutting_plane.feas_tol, [&](const Vec& x) { return opt::ipw_surrogate(w, x); });
  return out;
}

// ---------------------------------------------------------------------------
// Contextual MAB

namespace detail {

inline Vec context_scaled(const Vec& stacked, const Vec& probs, std::size_t arms) {
  Vec out = stacked;
  for (Eigen::Index x = 0; x < probs.size(); ++x)
    out.segment(x * static_cast<Eigen::Index>(arms), static_cast<Eigen::Index>(arms)) *= probs[x];
  return out;
}

inline void require_same_contexts(const ContextualPolicy& a, const ContextualPolicy& b) {
  require_same_size(a.num_contexts(), b.num_contexts(), "contextual design contexts");
  require_same_size(a.num_arms(), b.num_arms(), "contextual design arms");
  if ((a.context_probs() - b.context_probs()).cwiseAbs().maxCoeff() > kSimplexTol)
    throw InvalidArgument("contextual design: policies disagree on p(x)");
}

}  // namespace detail

// Independent per-context water-filling; objective sum_x p(x) J_x.
inline DesignResult design_cmab_worstcase(const ContextualPolicy& pi0, const ContextualPolicy& pi1, double eps,
                                          WeightMode mode = WeightMode::Unit,
                                          const std::optional<Vec>& moments = std::nullopt) {
  detail::require_same_contexts(pi0, pi1);
  detail::require_eps(eps);
  const std::size_t k = pi0.num_arms();
  const Vec p0 = pi0.stacked(), p1 = pi1.stacked();
  const Vec w = detail::context_scaled(detail::design_weights(p0, p1, mode, moments), pi0.context_probs(), k);
  const Vec floor = (1.0 - eps) * p0;
  Vec x = detail::stacked_waterfill(w, floor, k);
  SolveDiagnostics diag;
  diag.objective = opt::ipw_surrogate(w, x);
  const double cert = detail::worst_case_margin(detail::context_scaled(x, pi0.context_probs(), k),
                                                detail::context_scaled(floor, pi0.context_probs(), k));
  diag.residual = cert;
  DesignResult out = detail::finalize(std::move(x), p1 - p0, k, diag.objective, diag, cert);
  out.contexts = pi0.num_contexts();
  return out;
}

// Joint safety over a stacked K*|X| box: each cut is
// sum_x p(x) r(.|x)^T (pi_e(.|x) - (1-eps) pi_0(.|x)) >= 0.
inline DesignResult design_cmab_with_region(const ContextualPolicy& pi0, const ContextualPolicy& pi1, double eps,
                                            const BoxRegion& box, WeightMode mode = WeightMode::Unit,
                                            const std::optional<Vec>& moments = std::nullopt,
                                            const DesignConfig& cfg = {}) {
  detail::require_same_contexts(pi0, pi1);
  detail::require_eps(eps);
  const std::size_t k = pi0.num_arms();
  const std::size_t nx = pi0.num_contexts();
  detail::require_same_size(k * nx, box.size(), "design_cmab_with_region box");
  const Vec& probs = pi0.context_probs();
  const Vec p0 = pi0.stacked(), p1 = pi1.stacked();
  const Vec delta = p1 - p0;
  const Vec floor = (1.0 - eps) * p0;
  const Vec scaled_floor = detail::context_scaled(floor, probs, k);
  auto oracle = [&](const Vec& x) {
    const auto worst = min_linear_over_box(detail::context_scaled(x, probs, k) - scaled_floor, box);
    const Vec a = detail::context_scaled(worst.point, probs, k);
    return opt::CutQuery{a, a.dot(floor), worst.value};
  };
  DesignResult out;
  out.contexts = nx;
  if (delta.cwiseAbs().maxCoeff() == 0.0) {
    out.policy = p0;
    out.certificate = oracle(p0).margin;
    out.diagnostics.residual = out.certificate;
    return out;
  }
  const Vec w = detail::context_scaled(detail::design_weights(p0, p1, mode, moments), probs, k);
  const Vec anchor = detail::stacked_waterfill(w, floor, k);
  opt::Polytope poly(k * nx, nx);
  if (cfg.seed_support_cut)
    if (auto cut = opt::ipw_box_support_cut(w, k, floor, detail::context_scaled(box.lower(), probs, k),
                                            detail::context_scaled(box.upper(), probs, k)))
      poly.add_cut(cut->a, cut->b);
  auto res = opt::cutting_plane(poly, detail::ipw_inner(w, k, cfg.frank_wolfe), oracle, cfg.cutting_plane, anchor);
  const double objective = opt::ipw_surrogate(w, res.x);
  res.diagnostics.objective = objective;
  out = detail::finalize(std::move(res.x), delta, k, objective, res.diagnostics, 0.0);
  out.contexts = nx;
  detail::certify(out, oracle, anchor, cfg.cutting_plane.feas_tol, [&](const Vec& x) { return opt::ipw_surrogate(w, x); });
  return out;
}

// ---------------------------------------------------------------------------
// Linear bandits

namespace detail {

// Cut generator for theta^T X^T (x - (1-eps) pi_0) >= 0 over an ellipsoid.
inline auto ellipsoid_oracle(const Mat& arm_features, const Vec& floor, const EllipsoidRegion& region) {
  return [&arm_features, floor, &region](const Vec& x) {
    const Vec v = arm_features.transpose() * (x - floor);
    const auto worst = max_linear_over_ellipsoid(Vec(-v), region);
    const Vec a = arm_features * worst.point;
    return opt::CutQuery{a, a.dot(floor), -worst.value};
  };
}

template <class Oracle>
std::optional<Vec> lb_anchor(const Vec& pi0, Oracle& oracle) {
  if (oracle(pi0).margin >= 0.0) return pi0;
  return std::nullopt;
}

inline void check_lb_inputs(const PolicyVector& pi0, const PolicyVector& pi1, const Mat& arm_features,
                            const EllipsoidRegion& region) {
  detail::require_same_size(pi0.size(), pi1.size(), "design_lb policies");
  detail::require_same_size(pi0.size(), static_cast<std::size_t>(arm_features.rows()), "design_lb arm features");
  detail::require_same_size(region.dim(), static_cast<std::size_t>(arm_features.cols()), "design_lb ellipsoid");
}

}  // namespace detail

// min phi^T (T G(pi_e) + G0)^{-1} phi subject to safety for every theta in the
// ellipsoid; Frank-Wolfe inside cutting planes.
inline DesignResult design_lb(const PolicyVector& pi0, const PolicyVector& pi1, double eps, const Mat& arm_features,
                              const Mat& gram0, double horizon, const EllipsoidRegion& region,
                              const DesignConfig& cfg = {}) {
  detail::check_lb_inputs(pi0, pi1, arm_features, region);
  detail::require_eps(eps);
  const Vec delta = pi1.weights() - pi0.weights();
  const Vec phi = arm_features.transpose() * delta;
  const Vec floor = (1.0 - eps) * pi0.weights();
  auto oracle = detail::ellipsoid_oracle(arm_features, floor, region);
  if (phi.cwiseAbs().maxCoeff() == 0.0) {
    DesignResult out;
    out.policy = pi0.weights();
    out.certificate = oracle(out.policy).margin;
    out.diagnostics.residual = out.certificate;
    return out;
  }
  const opt::LbObjective obj(phi, arm_features, gram0, horizon);
  const std::optional<Vec> anchor = detail::lb_anchor(pi0.weights(), oracle);
  // Cuts are first collected with a loose inner tolerance; the final cut set
  // is then re-solved to the requested tolerance from the loose solution.
  // Only the second pass decides the returned point and its certificate.
  opt::FrankWolfeConfig loose = cfg.frank_wolfe;
  const double j0 = obj.value(pi0.weights());
  if (!cfg.frank_wolfe.gap_tol && std::isfinite(j0)) loose.gap_tol = 1e-4 * j0;
  std::optional<Vec> first_start;
  auto make_inner = [&](const opt::FrankWolfeConfig& fw) {
    return [&, fw](const opt::Polytope& poly, const std::optional<Vec>& warm) {
      opt::LinearProgram lp(poly);
      Vec start = first_start ? *first_start : warm ? *warm : (poly.cuts().empty() ? pi0.weights() : lp.feasible_point());
      first_start.reset();
      auto res = opt::frank_wolfe(obj, lp, poly, start, fw);
      return opt::InnerSolution{std::move(res.x), res.diagnostics};
    };
  };
  auto rough = opt::cutting_plane(opt::Polytope(pi0.size()), make_inner(loose), oracle, cfg.cutting_plane, anchor);
  first_start = rough.x;
  auto res = opt::cutting_plane(rough.polytope, make_inner(cfg.frank_wolfe), oracle, cfg.cutting_plane, anchor);
  res.diagnostics.iterations += rough.diagnostics.iterations;
  const double objective = obj.value(res.x);
  res.diagnostics.objective = objective;
  DesignResult out = detail::finalize(std::move(res.x), delta, pi0.size(), objective, res.diagnostics, 0.0);
  detail::certify(out, oracle, anchor, cfg.cutting_plane.feas_tol, [&](const Vec& x) { return obj.value(x); });
  return out;
}

// Coefficients c_x = (phi_{pi1}^T G(pi1)^{-1} x)^2 of the (linear) pseudo-inverse
// design objective.
inline Vec pi_design_costs(const PolicyVector& pi1, const Mat& arm_features) {
  const Mat g = policy_gram(pi1.weights(), arm_features);
  const SymFactor f(g);
  if (f.jittered()) throw SingularMatrixError("design_lb_pi: G(pi_1) is singular");
  const Vec u = f.solve(Vec(arm_features.transpose() * pi1.weights()));
  return (arm_features * u).array().square();
}

inline DesignResult design_lb_pi(const PolicyVector& pi1, double eps, const Mat& arm_features,
                                 const EllipsoidRegion& region, const PolicyVector& pi0,
                                 const DesignConfig& cfg = {}) {
  detail::check_lb_inputs(pi0, pi1, arm_features, region);
  detail::require_eps(eps);
  const Vec c = pi_design_costs(pi1, arm_features);
  const Vec floor = (1.0 - eps) * pi0.weights();
  auto oracle = detail::ellipsoid_oracle(arm_features, floor, region);
  auto inner = [&](const opt::Polytope& poly, const std::optional<Vec>&) {
    opt::LinearProgram lp(poly);
    auto res = lp.solve(c);
    opt::InnerSolution sol{std::move(res.x), {}};
    sol.diagnostics.objective = res.value;
    sol.diagnostics.iterations = 1;
    return sol;
  };
  auto res = opt::cutting_plane(opt::Polytope(pi0.size()), inner, oracle, cfg.cutting_plane,
                                detail::lb_anchor(pi0.weights(), oracle));
  DesignResult out;
  out.objective = c.dot(res.x);
  out.policy = std::move(res.x);
  out.diagnostics = res.diagnostics;
  out.diagnostics.objective = out.objective;
  out.certificate = oracle(out.policy).margin;
  return out;
}

// ---------------------------------------------------------------------------
// Baselines

inline PolicyVector baseline_mixture(const PolicyVector& pi0, const PolicyVector& pi1, double eps) {
  detail::require_same_size(pi0.size(), pi1.size(), "baseline_mixture");
  if (!(eps >= 0.0 && eps <= 1.0)) throw InvalidArgument("baseline_mixture: epsilon must lie in [0,1]");
  return PolicyVector(eps * pi1.weights() + (1.0 - eps) * pi0.weights());
}

inline ContextualPolicy baseline_mixture(const ContextualPolicy& pi0, const ContextualPolicy& pi1, double eps) {
  detail::require_same_contexts(pi0, pi1);
  std::vector<PolicyVector> rows;
  for (std::size_t x = 0; x < pi0.num_contexts(); ++x) rows.push_back(baseline_mixture(pi0.at(x), pi1.at(x), eps));
  return ContextualPolicy(std::move(rows), pi0.context_probs());
}

// Raise every arm to a common level c above the floors (1-eps) pi_0.
inline PolicyVector baseline_safe_od(const PolicyVector& pi0, double eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw InvalidArgument("baseline_safe_od: epsilon must lie in [0,1]");
  return opt::waterfill_simplex(Vec::Ones(static_cast<Eigen::Index>(pi0.size())), (1.0 - eps) * pi0.weights());
}

inline ContextualPolicy baseline_safe_od(const ContextualPolicy& pi0, double eps) {
  std::vector<PolicyVector> rows;
  for (const auto& p : pi0.per_context()) rows.push_back(baseline_safe_od(p, eps));
  return ContextualPolicy(std::move(rows), pi0.context_probs());
}

// Linear-bandit stand-in: Frank-Wolfe with the argmax-arm subgradient on
// max_x x^T (T G + G0)^{-1} x under the same ellipsoid safety cuts. This is an
// approximation of the uncertainty-reduction comparator, not a certified optimum.
inline DesignResult baseline_safe_od_lb(const PolicyVector& pi0, double eps, const Mat& arm_features,
                                        const Mat& gram0, double horizon, const EllipsoidRegion& region,
                                        const DesignConfig& cfg = {}) {
  detail::check_lb_inputs(pi0, pi0, arm_features, region);
  if (!(eps >= 0.0 && eps <= 1.0)) throw InvalidArgument("baseline_safe_od_lb: epsilon must lie in [0,1]");
  const Vec floor = (1.0 - eps) * pi0.weights();
  auto oracle = detail::ellipsoid_oracle(arm_features, floor, region);
  const opt::MaxUncertaintyObjective obj(arm_features, gram0, horizon);
  opt::FrankWolfeConfig fw = cfg.frank_wolfe;
  fw.max_iter = std::min<std::size_t>(fw.max_iter, 200);
  fw.away_steps = false;
  fw.gap_tol = 0.0;
  auto inner = [&](const opt::Polytope& poly, const std::optional<Vec>& warm) {
    opt::LinearProgram lp(poly);
    Vec start = warm ? *warm : (poly.cuts().empty() ? pi0.weights() : lp.feasible_point());
    auto res = opt::frank_wolfe(obj, lp, poly, start, fw);
    return opt::InnerSolution{std::move(res.x), res.diagnostics};
  };
  auto res = opt::cutting_plane(opt::Polytope(pi0.size()), inner, oracle, cfg.cutting_plane,
                                detail::lb_anchor(pi0.weights(), oracle));
  DesignResult out;
  out.objective = obj.value(res.x);
  out.policy = std::move(res.x);
  out.diagnostics = res.diagnostics;
  out.certificate = oracle(out.policy).margin;
  out.note = "approximation";
  return out;
}

inline PolicyVector baseline_uniform(std::size_t k) { return PolicyVector::uniform(k); }

inline PolicyVector baseline_ab(const PolicyVector& pi0, const PolicyVector& pi1) {
  detail::require_same_size(pi0.size(), pi1.size(), "baseline_ab");
  return PolicyVector(0.5 * pi0.weights() + 0.5 * pi1.weights());
}

}  // namespace sepec
