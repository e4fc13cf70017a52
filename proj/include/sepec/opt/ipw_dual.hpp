#pragma once

// Exact solver for min sum_a w_a / x_a over a Polytope (simplex blocks, lower
// bounds, cuts a^T x >= b) through its Lagrangian dual in the cut multipliers.
//
// For multipliers mu >= 0 let g = A^T mu. The Lagrangian minimizer is, block by
// block, x_a = max(l_a, sqrt(w_a / (nu - g_a))) with nu set so the block sums
// to one. The dual D(mu) is concave and twice differentiable almost everywhere
// with gradient b - A x(mu) and Hessian -A J A^T, J = blockdiag(Q - q q^T / sum q)
// over the free coordinates, q_a = x_a / (2 (nu - g_a)). Projected Newton with
// an Armijo search drives the duality gap and the cut violation to zero.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "sepec/linalg.hpp"
#include "sepec/opt/polytope.hpp"

namespace sepec::opt {

struct IpwDualConfig {
  std::size_t max_iter = 200;
  double tol = 1e-11;  // cut violation (rows scaled to max |a| = 1) and relative duality gap
};

struct IpwDualResult {
  Vec x;
  Vec multipliers;
  double objective = 0.0;
  double gap = 0.0;
  double violation = 0.0;
  std::size_t iterations = 0;
};

namespace detail {

struct BlockSolve {
  Vec x;
  Vec q;  // dx/dg on free coordinates, 0 on coordinates at their floor
};

// Lagrangian minimizer for fixed g. Requires w > 0 on every coordinate.
inline BlockSolve dual_primal(const Vec& w, const Vec& l, const Vec& g, const Polytope& poly) {
  BlockSolve out{Vec::Zero(w.size()), Vec::Zero(w.size())};
  for (const auto& blk : poly.blocks()) {
    const auto o = static_cast<Eigen::Index>(blk.offset);
    const auto n = static_cast<Eigen::Index>(blk.size);
    const double floor_mass = l.segment(o, n).sum();
    if (1.0 - floor_mass <= 1e-15) {
      out.x.segment(o, n) = l.segment(o, n);
      continue;
    }
    double gmax = -std::numeric_limits<double>::infinity(), root_w = 0.0;
    for (Eigen::Index i = o; i < o + n; ++i) {
      gmax = std::max(gmax, g[i]);
      root_w += std::sqrt(w[i]);
    }
    auto mass = [&](double nu, double* slope) {
      double s = 0.0, ds = 0.0;
      for (Eigen::Index i = o; i < o + n; ++i) {
        const double v = std::sqrt(w[i] / (nu - g[i]));
        if (v > l[i]) {
          s += v;
          ds -= v / (2.0 * (nu - g[i]));
        } else {
          s += l[i];
        }
      }
      if (slope) *slope = ds;
      return s - 1.0;
    };
    const double span = std::pow(root_w / (1.0 - floor_mass), 2);
    double lo = gmax, hi = gmax + span;
    double nu = gmax + 0.5 * span;
    for (int it = 0; it < 200; ++it) {
      double slope = 0.0;
      const double f = mass(nu, &slope);
      if (f > 0.0)
        lo = nu;
      else
        hi = nu;
      if (std::abs(f) <= 1e-15 || hi - lo <= 1e-16 * std::max(1.0, std::abs(nu))) break;
      double next = slope < 0.0 ? nu - f / slope : 0.5 * (lo + hi);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      nu = next;
    }
    double total = 0.0;
    for (Eigen::Index i = o; i < o + n; ++i) {
      const double v = std::sqrt(w[i] / (nu - g[i]));
      if (v > l[i]) {
        out.x[i] = v;
        out.q[i] = v / (2.0 * (nu - g[i]));
      } else {
        out.x[i] = l[i];
      }
      total += out.x[i];
    }
    // Absorb the last rounding error on the free coordinates.
    const double qs = out.q.segment(o, n).sum();
    if (qs > 0.0) out.x.segment(o, n) += (1.0 - total) / qs * out.q.segment(o, n);
  }
  return out;
}

}  // namespace detail

// Returns nullopt when some weight is zero or the iteration fails to certify
// optimality; callers fall back to Frank-Wolfe.
inline std::optional<IpwDualResult> ipw_dual_solve(const Vec& w, const Polytope& poly, const Vec& mu0 = Vec(),
                                                   const IpwDualConfig& cfg = {}) {
  if (w.size() != static_cast<Eigen::Index>(poly.dim()) || !(w.array() > 0.0).all()) return std::nullopt;
  const auto& cuts = poly.cuts();
  const auto m = static_cast<Eigen::Index>(cuts.size());
  const Vec& l = poly.lower();
  Mat a(m, w.size());
  Vec b(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const double s = std::max(cuts[static_cast<std::size_t>(j)].a.cwiseAbs().maxCoeff(), 1e-300);
    a.row(j) = cuts[static_cast<std::size_t>(j)].a.transpose() / s;
    b[j] = cuts[static_cast<std::size_t>(j)].b / s;
  }

  Vec mu = Vec::Zero(m);
  if (mu0.size() > 0) mu.head(std::min(m, mu0.size())) = mu0.head(std::min(m, mu0.size())).cwiseMax(0.0);

  struct Eval {
    detail::BlockSolve p;
    double dual = 0.0, primal = 0.0;
    Vec grad;
  };
  auto evaluate = [&](const Vec& u) {
    Eval e;
    e.p = detail::dual_primal(w, l, a.transpose() * u, poly);
    e.primal = (w.array() / e.p.x.array()).sum();
    e.grad = b - a * e.p.x;
    e.dual = e.primal + u.dot(e.grad);
    return e;
  };

  // Optimality residual: violated cuts, and the complementary part of
  // satisfied cuts with positive multipliers.
  auto residual = [&](const Vec& u, const Eval& e) {
    double r = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) r = std::max(r, u[j] > 0.0 ? std::abs(e.grad[j]) : e.grad[j]);
    return r;
  };

  Eval cur = evaluate(mu);
  IpwDualResult out;
  for (std::size_t it = 0; it <= cfg.max_iter; ++it) {
    const double viol = m > 0 ? std::max(0.0, cur.grad.maxCoeff()) : 0.0;
    const double gap = std::abs(cur.primal - cur.dual);
    if (viol <= cfg.tol && gap <= cfg.tol * std::max(1.0, cur.primal)) {
      out.x = cur.p.x;
      out.multipliers = mu;
      out.objective = cur.primal;
      out.gap = gap;
      out.violation = viol;
      out.iterations = it;
      return out;
    }
    if (it == cfg.max_iter) break;

    // Coordinates at the bound whose gradient points outward stay fixed.
    std::vector<Eigen::Index> free;
    for (Eigen::Index j = 0; j < m; ++j)
      if (mu[j] > 0.0 || cur.grad[j] > 0.0) free.push_back(j);
    if (free.empty()) return std::nullopt;

    // H = A J A^T restricted to the free multipliers.
    const auto nf = static_cast<Eigen::Index>(free.size());
    Mat af(nf, w.size());
    for (Eigen::Index i = 0; i < nf; ++i) af.row(i) = a.row(free[static_cast<std::size_t>(i)]);
    Mat h = af * cur.p.q.asDiagonal() * af.transpose();
    for (const auto& blk : poly.blocks()) {
      const auto o = static_cast<Eigen::Index>(blk.offset);
      const auto n = static_cast<Eigen::Index>(blk.size);
      const double qs = cur.p.q.segment(o, n).sum();
      if (qs <= 0.0) continue;
      const Vec aq = af.middleCols(o, n) * cur.p.q.segment(o, n);
      h.noalias() -= aq * aq.transpose() / qs;
    }
    Vec gf(nf);
    for (Eigen::Index i = 0; i < nf; ++i) gf[i] = cur.grad[free[static_cast<std::size_t>(i)]];
    // Many cuts in few dimensions make H singular; a gradient-sized
    // Levenberg term keeps the step bounded and vanishes at the optimum.
    const double reg = 1e-12 * std::max(1e-300, h.diagonal().cwiseAbs().maxCoeff()) + gf.cwiseAbs().maxCoeff();
    h.diagonal().array() += reg;
    Eigen::LDLT<Mat> ldlt(h);
    Vec dir = ldlt.solve(gf);
    if (!dir.allFinite() || gf.dot(dir) <= 0.0) dir = gf;

    // Projected Armijo backtracking on the concave dual.
    double t = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
      Vec trial = mu;
      for (Eigen::Index i = 0; i < nf; ++i) {
        const auto j = free[static_cast<std::size_t>(i)];
        trial[j] = std::max(0.0, mu[j] + t * dir[i]);
      }
      if (trial == mu) break;
      Eval next = evaluate(trial);
      if (!std::isfinite(next.dual)) continue;
      // Near the optimum dual increments fall below rounding, so a clear
      // drop of the optimality residual also counts as progress.
      if (next.dual >= cur.dual + 1e-4 * cur.grad.dot(trial - mu) ||
          residual(trial, next) <= 0.5 * residual(mu, cur)) {
        mu = std::move(trial);
        cur = std::move(next);
        moved = true;
        break;
      }
    }
    if (!moved) {
      // Ascent is exhausted at machine precision; accept if the point is
      // already essentially optimal.
      const double v = m > 0 ? std::max(0.0, cur.grad.maxCoeff()) : 0.0;
      const double gp = std::abs(cur.primal - cur.dual);
      if (v <= 1e3 * cfg.tol && gp <= 1e3 * cfg.tol * std::max(1.0, cur.primal)) {
        out.x = cur.p.x;
        out.multipliers = mu;
        out.objective = cur.primal;
        out.gap = gp;
        out.violation = v;
        out.iterations = it;
        return out;
      }
      return std::nullopt;
    }
  }
  return std::nullopt;
}


struct SupportCut {
  Vec a;
  double b = 0.0;
};

// Supporting cut at the optimum of
//   min sum_i w_i / x_i  s.t. blocks of size `block` sum to one, x >= 0,
//   sum_i phi_i(x_i) >= 0,  phi_i(x) = hi_i (x - f_i) for x < f_i, lo_i (x - f_i) otherwise,
// with 0 <= lo <= hi. This is the worst case of r^T (x - f) over the box
// lo <= r <= hi. The returned member r of the box makes r^T (x - f) >= 0 share
// the optimum, so a cutting-plane loop seeded with it converges at once.
// Returns nullopt when the constraint is slack at the unconstrained optimum,
// when some weight is zero, or when no finite multiplier restores feasibility.
inline std::optional<SupportCut> ipw_box_support_cut(const Vec& w, std::size_t block, const Vec& f, const Vec& lo,
                                                     const Vec& hi) {
  const Eigen::Index n = w.size();
  const auto k = static_cast<Eigen::Index>(block);
  if (k == 0 || n % k != 0 || f.size() != n || lo.size() != n || hi.size() != n) return std::nullopt;
  if (!(w.array() > 0.0).all() || (lo.array() > hi.array()).any() || (lo.array() < 0.0).any()) return std::nullopt;

  // branch: 0 below the kink, 1 above it, 2 at the kink.
  auto coord = [&](Eigen::Index i, double mu, double nu, int* branch) {
    const double da = nu - mu * hi[i];
    const double xa = da > 0.0 ? std::sqrt(w[i] / da) : std::numeric_limits<double>::infinity();
    if (xa < f[i]) {
      *branch = 0;
      return xa;
    }
    const double db = nu - mu * lo[i];
    const double xb = db > 0.0 ? std::sqrt(w[i] / db) : std::numeric_limits<double>::infinity();
    if (xb > f[i]) {
      *branch = 1;
      return xb;
    }
    *branch = 2;
    return f[i];
  };
  struct State {
    Vec x, nu;
    std::vector<int> branch;
  };
  auto solve = [&](double mu) {
    State st{Vec(n), Vec(n / k), std::vector<int>(static_cast<std::size_t>(n))};
    for (Eigen::Index blk = 0; blk < n / k; ++blk) {
      const Eigen::Index o = blk * k;
      double nu_lo = -std::numeric_limits<double>::infinity();
      for (Eigen::Index i = o; i < o + k; ++i) nu_lo = std::max(nu_lo, mu * lo[i]);
      auto mass = [&](double nu) {
        double s = 0.0;
        int br = 0;
        for (Eigen::Index i = o; i < o + k; ++i) s += coord(i, mu, nu, &br);
        return s;
      };
      double step = std::max(1.0, std::abs(nu_lo));
      double nu_hi = nu_lo + step;
      while (mass(nu_hi) > 1.0 && step < 1e300) {
        step *= 2.0;
        nu_hi = nu_lo + step;
      }
      double a = nu_lo, b = nu_hi;
      for (int it = 0; it < 200 && b - a > 1e-16 * std::max(1.0, std::abs(b)); ++it) {
        const double mid = 0.5 * (a + b);
        (mass(mid) > 1.0 ? a : b) = mid;
      }
      st.nu[blk] = b;
      for (Eigen::Index i = o; i < o + k; ++i) st.x[i] = coord(i, mu, b, &st.branch[static_cast<std::size_t>(i)]);
    }
    return st;
  };
  auto margin = [&](const Vec& x) {
    double h = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) h += (x[i] < f[i] ? hi[i] : lo[i]) * (x[i] - f[i]);
    return h;
  };

  if (margin(solve(0.0).x) >= 0.0) return std::nullopt;
  double mu_lo = 0.0, mu_hi = 1.0;
  while (margin(solve(mu_hi).x) < 0.0) {
    mu_lo = mu_hi;
    mu_hi *= 2.0;
    if (mu_hi > 1e30) return std::nullopt;
  }
  for (int it = 0; it < 200 && mu_hi - mu_lo > 1e-15 * mu_hi; ++it) {
    const double mid = 0.5 * (mu_lo + mu_hi);
    (margin(solve(mid).x) < 0.0 ? mu_lo : mu_hi) = mid;
  }
  const State st = solve(mu_hi);
  SupportCut cut{Vec(n), 0.0};
  for (Eigen::Index i = 0; i < n; ++i) {
    switch (st.branch[static_cast<std::size_t>(i)]) {
      case 0: cut.a[i] = hi[i]; break;
      case 1: cut.a[i] = lo[i]; break;
      default:
        cut.a[i] = std::clamp((st.nu[i / k] - w[i] / (f[i] * f[i])) / mu_hi, lo[i], hi[i]);
    }
  }
  cut.b = cut.a.dot(f);
  return cut;
}

}  // namespace sepec::opt
