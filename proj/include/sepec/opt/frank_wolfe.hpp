#pragma once

// Frank-Wolfe over a Polytope with an exact golden-section line search.
//
// Iterates are kept as an explicit convex combination of LP vertices (plus
// the start point) so that away steps can shift weight off bad vertices;
// this gives linear convergence on the strongly convex objectives used here.

#include <chrono>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "sepec/error.hpp"
#include "sepec/linalg.hpp"
#include "sepec/opt/lp.hpp"
#include "sepec/opt/polytope.hpp"

namespace sepec::opt {

struct SolveDiagnostics {
  std::size_t iterations = 0;
  double objective = 0.0;
  double gap = 0.0;
  double residual = 0.0;
  std::size_t cuts = 0;
  double wall_seconds = 0.0;
  bool repaired = false;
};

inline constexpr double kInvPhi = 0.6180339887498949;

// Minimizer of a unimodal phi on [lo, hi]. A geometric scan t = lo + (hi-lo) 2^-k
// first brackets the minimizer, so very short optimal steps are resolved as
// accurately as long ones; golden-section search then shrinks the bracket to
// width at most tol * (hi - lo). Endpoints are compared explicitly so monotone
// cases return exactly lo or hi.
template <class Phi>
double line_search_1d(Phi&& phi, double lo, double hi, double tol = 1e-8) {
  const double span = hi - lo;
  if (!(span > 0.0)) return lo;
  const double f_lo = phi(lo);
  double best_t = hi, best_f = phi(hi);
  const double f_hi = best_f;
  int best_k = 0, k = 1;
  for (; k <= 60; ++k) {
    const double t = lo + std::ldexp(span, -k);
    const double f = phi(t);
    if (f < best_f) {
      best_f = f;
      best_t = t;
      best_k = k;
    } else if (f > best_f) {
      break;
    }
  }
  double a = lo + (k > 60 ? 0.0 : std::ldexp(span, -(best_k + 1)));
  double b = best_k == 0 ? hi : lo + std::ldexp(span, -(best_k - 1));
  const double width = tol * std::min(1.0, (b - a) / span) * span;
  double c = b - kInvPhi * (b - a), d = a + kInvPhi * (b - a);
  double fc = phi(c), fd = phi(d);
  while (b - a > width) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = phi(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = phi(d);
    }
  }
  const double mid = 0.5 * (a + b);
  const double f_mid = phi(mid);
  if (f_mid < best_f) {
    best_f = f_mid;
    best_t = mid;
  }
  if (f_lo <= best_f) return lo;
  if (f_hi <= best_f) return hi;
  return best_t;
}

// Step size in [0,1] minimizing J(x + lambda (s - x)).
template <class J>
double line_search(J&& objective, const Vec& x, const Vec& s) {
  const Vec d = s - x;
  return line_search_1d([&](double lam) { return objective(Vec(x + lam * d)); }, 0.0, 1.0);
}

struct FrankWolfeConfig {
  std::size_t max_iter = 5000;
  std::optional<double> gap_tol;  // default 1e-8 * max(1, J(x0))
  bool away_steps = true;
  bool pairwise = true;  // with away_steps: shift weight from the away atom straight to the FW vertex
};

struct FrankWolfeResult {
  Vec x;
  SolveDiagnostics diagnostics;
  std::vector<double> trace;  // objective after each iteration
};

// Objectives provide value(x) and gradient(x); an optional segment(x, d)
// returns a callable lambda -> J(x + lambda d) for a cheaper line search.
template <class Obj>
concept HasSegment = requires(const Obj& o, const Vec& x, const Vec& d) { o.segment(x, d); };

template <class Obj>
FrankWolfeResult frank_wolfe(const Obj& objective, LinearProgram& lp, const Polytope& poly, const Vec& x0,
                             const FrankWolfeConfig& cfg = {}) {
  const auto start = std::chrono::steady_clock::now();
  if (!poly.contains(x0, 1e-9)) throw InvalidArgument("frank_wolfe: start point is not feasible");
  FrankWolfeResult out;
  Vec x = x0;
  double fx = objective.value(x);
  if (!std::isfinite(fx)) throw InvalidArgument("frank_wolfe: objective is not finite at the start point");
  const double tol = cfg.gap_tol.value_or(1e-8 * std::max(1.0, std::abs(fx)));

  // Active set: atoms are the columns [0, n_atoms) of `atoms`.
  Mat atoms(x0.size(), 16);
  std::vector<double> alpha{1.0};
  atoms.col(0) = x0;
  std::size_t n_atoms = 1;
  auto remove_atom = [&](std::size_t i) {
    const std::size_t last = n_atoms - 1;
    if (i != last) {
      atoms.col(static_cast<Eigen::Index>(i)) = atoms.col(static_cast<Eigen::Index>(last));
      alpha[i] = alpha[last];
    }
    alpha.pop_back();
    --n_atoms;
  };

  auto restricted = [&](const Vec& base, const Vec& dir) {
    if constexpr (HasSegment<Obj>) {
      return objective.segment(base, dir);
    } else {
      return [&objective, base, dir](double lam) { return objective.value(Vec(base + lam * dir)); };
    }
  };

  double gap = std::numeric_limits<double>::infinity();
  std::size_t it = 0;
  for (; it < cfg.max_iter; ++it) {
    const Vec g = objective.gradient(x);
    if (!g.allFinite()) throw Error("frank_wolfe: non-finite gradient");
    const LpResult s = lp.solve(g);
    const double gx = g.dot(x);
    gap = gx - s.value;
    if (gap <= tol) break;

    const Vec scores = atoms.leftCols(static_cast<Eigen::Index>(n_atoms)).transpose() * g;
    Vec dir;
    double gamma_max = 1.0;
    std::size_t away = n_atoms;
    bool fw_step = true;
    if (cfg.away_steps && n_atoms > 1) {
      Eigen::Index arg = 0;
      const double worst = scores.maxCoeff(&arg);
      away = static_cast<std::size_t>(arg);
      if (cfg.pairwise) {
        fw_step = false;
        dir = s.x - atoms.col(arg);
        gamma_max = alpha[away];
      } else if (worst - gx > gap && alpha[away] < 1.0) {
        fw_step = false;
        dir = x - atoms.col(arg);
        gamma_max = alpha[away] / (1.0 - alpha[away]);
      }
    }
    if (fw_step) dir = s.x - x;

    auto phi = restricted(x, dir);
    double gamma = line_search_1d(phi, 0.0, gamma_max);
    double f_new = phi(gamma);
    if (!(f_new <= fx)) {
      gamma = 0.0;
      f_new = fx;
    }
    if (gamma == 0.0) {
      // No progress along the chosen direction; a zero-length FW step means
      // the optimum is reached up to line-search precision.
      if (fw_step) break;
      // Fall back to the FW direction once.
      dir = s.x - x;
      fw_step = true;
      gamma_max = 1.0;
      auto phi_fw = restricted(x, dir);
      gamma = line_search_1d(phi_fw, 0.0, 1.0);
      f_new = phi_fw(gamma);
      if (!(f_new <= fx) || gamma == 0.0) break;
    }

    if (fw_step) {
      for (double& a : alpha) a *= (1.0 - gamma);
      // An atom equal to the vertex has the same score, so only those are compared.
      std::size_t idx = n_atoms;
      const double scale = 1e-12 * std::max(1.0, std::abs(s.value));
      for (std::size_t i = 0; i < n_atoms && idx == n_atoms; ++i)
        if (std::abs(scores[static_cast<Eigen::Index>(i)] - s.value) <= scale &&
            (atoms.col(static_cast<Eigen::Index>(i)) - s.x).cwiseAbs().maxCoeff() <= 1e-12)
          idx = i;
      if (gamma >= 1.0) {
        atoms.col(0) = s.x;
        alpha.assign(1, 1.0);
        n_atoms = 1;
      } else if (idx == n_atoms) {
        if (static_cast<Eigen::Index>(n_atoms) == atoms.cols()) atoms.conservativeResize(Eigen::NoChange, atoms.cols() * 2);
        atoms.col(static_cast<Eigen::Index>(n_atoms++)) = s.x;
        alpha.push_back(gamma);
      } else {
        alpha[idx] += gamma;
      }
    } else if (cfg.pairwise) {
      std::size_t idx = n_atoms;
      const double scale = 1e-12 * std::max(1.0, std::abs(s.value));
      for (std::size_t i = 0; i < n_atoms && idx == n_atoms; ++i)
        if (std::abs(scores[static_cast<Eigen::Index>(i)] - s.value) <= scale &&
            (atoms.col(static_cast<Eigen::Index>(i)) - s.x).cwiseAbs().maxCoeff() <= 1e-12)
          idx = i;
      if (idx == n_atoms) {
        if (static_cast<Eigen::Index>(n_atoms) == atoms.cols()) atoms.conservativeResize(Eigen::NoChange, atoms.cols() * 2);
        atoms.col(static_cast<Eigen::Index>(n_atoms++)) = s.x;
        alpha.push_back(gamma);
      } else {
        alpha[idx] += gamma;
      }
      alpha[away] -= gamma;
      if (gamma >= gamma_max || alpha[away] <= 1e-15) remove_atom(away);
    } else {
      for (double& a : alpha) a *= (1.0 + gamma);
      alpha[away] -= gamma;
      if (gamma >= gamma_max || alpha[away] <= 1e-15) remove_atom(away);
    }
    x += gamma * dir;
    fx = objective.value(x);
    out.trace.push_back(fx);
  }

  out.x = std::move(x);
  out.diagnostics.iterations = it;
  out.diagnostics.objective = fx;
  out.diagnostics.gap = std::max(0.0, gap);
  out.diagnostics.residual = poly.residual(out.x);
  out.diagnostics.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

template <class Obj>
FrankWolfeResult frank_wolfe(const Obj& objective, const Polytope& poly, const Vec& x0,
                             const FrankWolfeConfig& cfg = {}) {
  LinearProgram lp(poly);
  return frank_wolfe(objective, lp, poly, x0, cfg);
}

}  // namespace sepec::opt
