#pragma once

// Brute-force oracle suite on small instances. Each check compares a library
// routine against an independent computation (grid search, enumeration,
// sampling, finite differences or Monte Carlo).

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "sepec/core.hpp"
#include "sepec/designers.hpp"
#include "sepec/estimators.hpp"
#include "sepec/linalg.hpp"
#include "sepec/opt/objectives.hpp"
#include "sepec/opt/waterfill.hpp"
#include "sepec/random.hpp"
#include "sepec/regions.hpp"
#include "sepec/stats.hpp"

namespace sepec::verify {

struct OracleOutcome {
  std::string name;
  bool pass = false;
  std::string detail;
};

namespace detail {

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// Visits every point of the K-simplex with coordinates on a grid of the given step.
inline void simplex_grid(std::size_t k, int steps, const std::function<void(const Vec&)>& visit) {
  Vec x(static_cast<Eigen::Index>(k));
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int left) {
    if (i + 1 == k) {
      x[static_cast<Eigen::Index>(i)] = static_cast<double>(left) / steps;
      visit(x);
      return;
    }
    for (int n = 0; n <= left; ++n) {
      x[static_cast<Eigen::Index>(i)] = static_cast<double>(n) / steps;
      rec(i + 1, left - n);
    }
  };
  rec(0, steps);
}

inline Vec random_simplex(std::size_t k, Rng& rng) { return flat_dirichlet(k, rng); }

inline Mat random_spd(std::size_t d, Rng& rng) {
  Mat a(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = standard_normal(rng);
  return a * a.transpose() + 0.1 * Mat::Identity(a.rows(), a.cols());
}

}  // namespace detail

// Water-filling against a 1e-3 grid on K=3.
inline OracleOutcome waterfill_grid() {
  Rng rng(11);
  double worst = -1.0;
  for (int trial = 0; trial < 5; ++trial) {
    const Vec pi0 = detail::random_simplex(3, rng), pi1 = detail::random_simplex(3, rng);
    const double eps = 0.05 + 0.5 * uniform01(rng);
    const Vec floor = (1.0 - eps) * pi0;
    const Vec w = (pi1 - pi0).array().square();
    const double got = opt::ipw_surrogate(w, opt::waterfill_simplex(w, floor).weights());
    double best = std::numeric_limits<double>::infinity();
    detail::simplex_grid(3, 1000, [&](const Vec& x) {
      if (((x - floor).array() >= -1e-12).all()) best = std::min(best, opt::ipw_surrogate(w, x));
    });
    worst = std::max(worst, got - best);
  }
  return {"waterfill_vs_grid", worst <= 1e-4, "max excess over grid optimum " + detail::fmt(worst)};
}

// The hand-worked water level: floors (0.48,0.24,0.08) with c = 0.26.
inline OracleOutcome waterfill_hand() {
  const Vec floor = Vec{{0.48, 0.24, 0.08}};
  const Vec w = Vec::Ones(3);
  const Vec x = opt::waterfill_simplex(w, floor).weights();
  const double err = (x - Vec{{0.48, 0.26, 0.26}}).cwiseAbs().maxCoeff();
  return {"waterfill_hand_level", err <= 1e-9, "max abs error " + detail::fmt(err)};
}

// Closed-form optimal variance against the exact variance at pi_e*.
inline OracleOutcome closed_form_variance() {
  Rng rng(12);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t k = 2 + rng() % 8;
    const PolicyVector pi0(detail::random_simplex(k, rng)), pi1(detail::random_simplex(k, rng));
    Vec means(static_cast<Eigen::Index>(k)), sds(static_cast<Eigen::Index>(k));
    for (std::size_t a = 0; a < k; ++a) {
      means[static_cast<Eigen::Index>(a)] = uniform01(rng);
      sds[static_cast<Eigen::Index>(a)] = uniform01(rng);
    }
    const MabInstance inst(means, sds, 10.0);
    const auto delta = SignedPolicyDelta::between(pi1, pi0);
    const double a = lemma1_variance(delta, inst, 500.0);
    const double b = ipw_diff_variance_exact(lemma1_policy(delta), inst, delta, 500.0);
    worst = std::max(worst, std::abs(a - b));
  }
  return {"closed_form_variance", worst <= 1e-12, "max abs difference " + detail::fmt(worst)};
}

// Exact IPW variance against Monte Carlo on the two-arm example.
inline OracleOutcome ipw_variance_mc() {
  const MabInstance inst(Vec{{1.0, 0.0}}, Vec{{1.0, 1.0}}, 10.0);
  const SignedPolicyDelta delta(Vec{{0.5, -0.5}});
  const PolicyVector pe(Vec{{0.5, 0.5}});
  const double exact = ipw_diff_variance_exact(pe, inst, delta, 1.0);
  Rng rng(13);
  const int n = 400000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const std::size_t a = uniform01(rng) < 0.5 ? 0 : 1;
    const double r = inst.means()[static_cast<Eigen::Index>(a)] + standard_normal(rng);
    const double term = delta.deltas()[static_cast<Eigen::Index>(a)] / pe[a] * r;
    s += term;
    s2 += term * term;
  }
  const double var = s2 / n - (s / n) * (s / n);
  const double rel = std::abs(var - exact) / exact;
  return {"ipw_variance_vs_monte_carlo", std::abs(exact - 1.25) <= 1e-12 && rel <= 0.02,
          "exact " + detail::fmt(exact) + ", MC " + detail::fmt(var)};
}

// Box oracle against enumeration of all 2^K corners.
inline OracleOutcome box_oracle_corners() {
  Rng rng(14);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t k = 1 + rng() % 8;
    Vec lo(static_cast<Eigen::Index>(k)), hi(static_cast<Eigen::Index>(k)), d(static_cast<Eigen::Index>(k));
    for (std::size_t a = 0; a < k; ++a) {
      const auto i = static_cast<Eigen::Index>(a);
      lo[i] = 0.5 * uniform01(rng);
      hi[i] = lo[i] + 0.5 * uniform01(rng);
      d[i] = standard_normal(rng);
    }
    const auto got = min_linear_over_box(d, BoxRegion(lo, hi));
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
      double v = 0.0;
      for (std::size_t a = 0; a < k; ++a) {
        const auto i = static_cast<Eigen::Index>(a);
        v += d[i] * ((mask >> a) & 1 ? hi[i] : lo[i]);
      }
      best = std::min(best, v);
    }
    worst = std::max(worst, std::abs(got.value - best));
  }
  return {"box_oracle_vs_corners", worst <= 1e-12, "max abs difference " + detail::fmt(worst)};
}

// Ellipsoid oracle against sampled boundary points.
inline OracleOutcome ellipsoid_oracle_sampling() {
  Rng rng(15);
  double worst = -std::numeric_limits<double>::infinity(), boundary = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t d = 1 + rng() % 5;
    const Mat shape = detail::random_spd(d, rng);
    Vec center(static_cast<Eigen::Index>(d)), v(static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < center.size(); ++i) {
      center[i] = standard_normal(rng);
      v[i] = standard_normal(rng);
    }
    const double radius = 0.5 + 2.0 * uniform01(rng);
    const EllipsoidRegion region(center, shape, radius);
    const auto best = max_linear_over_ellipsoid(v, region);
    const Eigen::LLT<Mat> llt(shape);
    const Mat l = llt.matrixL();
    const Vec off = best.point - center;
    boundary = std::max(boundary, std::abs(off.dot(llt.solve(off)) - radius));
    for (int s = 0; s < 10000; ++s) {
      const Vec theta = center + std::sqrt(radius) * l * uniform_on_sphere(d, rng);
      worst = std::max(worst, v.dot(theta) - best.value);
    }
  }
  return {"ellipsoid_oracle_vs_sampling", worst <= 1e-9 && boundary <= 1e-9,
          "max sampled excess " + detail::fmt(worst) + ", boundary error " + detail::fmt(boundary)};
}

// LB objective gradient against central finite differences.
inline OracleOutcome lb_gradient_fd() {
  Rng rng(16);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t d = 2 + rng() % 3, k = d + 2 + rng() % 4;
    Mat x(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = standard_normal(rng);
    Vec phi(static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < phi.size(); ++i) phi[i] = standard_normal(rng);
    const Vec pi = detail::random_simplex(k, rng);
    const Mat g0 = Mat::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    const auto val = opt::lb_objective(pi, phi, x, g0, 50.0);
    const double h = 1e-6;
    for (Eigen::Index i = 0; i < pi.size(); ++i) {
      Vec p = pi, m = pi;
      p[i] += h;
      m[i] -= h;
      const double fd = (opt::lb_objective(p, phi, x, g0, 50.0).value - opt::lb_objective(m, phi, x, g0, 50.0).value) / (2 * h);
      worst = std::max(worst, std::abs(fd - val.gradient[i]) / std::max(1e-8, std::abs(fd)));
    }
  }
  return {"lb_gradient_vs_finite_differences", worst <= 1e-5, "max relative error " + detail::fmt(worst)};
}

// Box design over [0,1]^K reproduces the worst-case design.
inline OracleOutcome unit_box_matches_worstcase() {
  Rng rng(17);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t k = 2 + rng() % 3;
    const PolicyVector pi0(detail::random_simplex(k, rng)), pi1(detail::random_simplex(k, rng));
    const double eps = 0.05 + 0.4 * uniform01(rng);
    const auto a = design_mab_worstcase(pi0, pi1, eps);
    const auto b = design_mab_with_region(pi0, pi1, eps, BoxRegion::unit_cube(k));
    worst = std::max(worst, std::abs(a.objective - b.objective));
  }
  return {"unit_box_vs_worstcase", worst <= 1e-6, "max objective difference " + detail::fmt(worst)};
}

// Box design against a grid search over the feasible simplex (K=3).
inline OracleOutcome box_design_grid() {
  Rng rng(18);
  double worst = -1.0, cert = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const PolicyVector pi0(detail::random_simplex(3, rng)), pi1(detail::random_simplex(3, rng));
    const double eps = 0.05 + 0.3 * uniform01(rng);
    Vec lo(3), hi(3);
    for (Eigen::Index a = 0; a < 3; ++a) {
      lo[a] = 0.3 * uniform01(rng);
      hi[a] = lo[a] + 0.2 + 0.5 * uniform01(rng);
    }
    const BoxRegion box(lo, hi);
    const auto res = design_mab_with_region(pi0, pi1, eps, box);
    const Vec floor = (1.0 - eps) * pi0.weights();
    const Vec w = (pi1.weights() - pi0.weights()).array().square();
    double best = std::numeric_limits<double>::infinity();
    detail::simplex_grid(3, 500, [&](const Vec& x) {
      if (min_linear_over_box(x - floor, box).value >= 0.0) best = std::min(best, opt::ipw_surrogate(w, x));
    });
    worst = std::max(worst, res.objective - best);
    cert = std::min(cert, res.certificate);
  }
  return {"box_design_vs_grid", worst <= 1e-4 && cert >= -1e-9,
          "max excess " + detail::fmt(worst) + ", min certificate " + detail::fmt(cert)};
}

// Two-context joint design against a per-context grid.
inline OracleOutcome cmab_design_grid() {
  Rng rng(19);
  double worst = -1.0;
  for (int trial = 0; trial < 3; ++trial) {
    std::vector<PolicyVector> p0, p1;
    for (int x = 0; x < 2; ++x) {
      p0.emplace_back(detail::random_simplex(2, rng));
      p1.emplace_back(detail::random_simplex(2, rng));
    }
    const Vec probs = Vec{{0.4, 0.6}};
    const ContextualPolicy pi0(p0, probs), pi1(p1, probs);
    const double eps = 0.1 + 0.2 * uniform01(rng);
    const auto res = design_cmab_worstcase(pi0, pi1, eps);
    // Worst case decouples per context; each context is a one-parameter grid.
    double best = 0.0;
    for (int x = 0; x < 2; ++x) {
      const Vec w = (p1[x].weights() - p0[x].weights()).array().square() * probs[x];
      double b = std::numeric_limits<double>::infinity();
      for (int n = 0; n <= 100000; ++n) {
        const Vec e = Vec{{n / 1e5, 1.0 - n / 1e5}};
        if (((e - (1.0 - eps) * p0[x].weights()).array() >= 0.0).all()) b = std::min(b, opt::ipw_surrogate(w, e));
      }
      best += b;
    }
    worst = std::max(worst, res.objective - best);
  }
  return {"cmab_worstcase_vs_grid", worst <= 1e-4, "max excess " + detail::fmt(worst)};
}

// LB design on a d=2, K=3 toy against a 1e-2 grid over the feasible simplex.
inline OracleOutcome lb_design_grid() {
  Rng rng(20);
  double worst = -1.0, cert = 0.0;
  for (int trial = 0; trial < 3; ++trial) {
    Mat x(3, 2);
    for (Eigen::Index i = 0; i < 3; ++i) {
      const double ang = 0.2 + 1.2 * uniform01(rng);
      x(i, 0) = std::cos(ang);
      x(i, 1) = std::sin(ang);
    }
    const PolicyVector pi0(detail::random_simplex(3, rng)), pi1(detail::random_simplex(3, rng));
    const EllipsoidRegion region(Vec{{0.6, 0.6}}, 0.05 * Mat::Identity(2, 2), 1.0);
    const Mat g0 = Mat::Identity(2, 2);
    const double eps = 0.2;
    const auto res = design_lb(pi0, pi1, eps, x, g0, 100.0, region);
    const Vec phi = x.transpose() * (pi1.weights() - pi0.weights());
    const Vec floor = (1.0 - eps) * pi0.weights();
    double best = std::numeric_limits<double>::infinity();
    detail::simplex_grid(3, 100, [&](const Vec& p) {
      const Vec v = x.transpose() * (p - floor);
      const double margin = v.dot(region.center()) - std::sqrt(region.radius() * v.dot(region.shape() * v));
      if (margin >= 0.0) best = std::min(best, opt::lb_objective(p, phi, x, g0, 100.0).value);
    });
    worst = std::max(worst, (res.objective - best) / best);
    cert = std::min(cert, res.certificate);
  }
  return {"lb_design_vs_grid", worst <= 0.01 && cert >= -1e-9,
          "max relative excess " + detail::fmt(worst) + ", min certificate " + detail::fmt(cert)};
}

// Quantiles against closed-form reference values.
inline OracleOutcome quantiles() {
  const double z = normal_quantile(0.95), c = chi2_quantile(0.95, 1.0);
  const double p = 1.0 - normal_cdf(-1.3551);
  const bool ok = std::abs(z - 1.6448536269514722) <= 1e-8 && std::abs(c - 3.841458820694124) <= 1e-6 &&
                  std::abs(p - 0.9123) <= 1e-4;
  return {"normal_and_chi2_quantiles", ok, "z " + detail::fmt(z) + ", chi2 " + detail::fmt(c)};
}

// The no-dominance construction gives a strictly better alternative.
inline OracleOutcome counterexample_strict() {
  Rng rng(21);
  int violations = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t k = 2 + rng() % 6;
    const PolicyVector pe(detail::random_simplex(k, rng));
    const auto delta = SignedPolicyDelta::between(PolicyVector(detail::random_simplex(k, rng)),
                                                  PolicyVector(detail::random_simplex(k, rng)));
    const auto ce = counterexample(pe, 0, 1);
    const double v_pe = ipw_diff_variance_exact(pe, ce.instance, delta, 1.0);
    const double v_b = ipw_diff_variance_exact(ce.alternative, ce.instance, delta, 1.0);
    if (!(v_pe > v_b)) ++violations;
  }
  return {"counterexample_strict", violations == 0, std::to_string(violations) + " violations"};
}

inline std::vector<std::function<OracleOutcome()>> suite() {
  return {waterfill_hand,     waterfill_grid,            closed_form_variance, ipw_variance_mc,
          box_oracle_corners, ellipsoid_oracle_sampling, lb_gradient_fd,       unit_box_matches_worstcase,
          box_design_grid,    cmab_design_grid,          lb_design_grid,       quantiles,
          counterexample_strict};
}

inline std::vector<OracleOutcome> run_all() {
  std::vector<OracleOutcome> out;
  for (const auto& check : suite()) {
    try {
      out.push_back(check());
    } catch (const std::exception& e) {
      out.push_back({"(exception)", false, e.what()});
    }
  }
  return out;
}

}  // namespace sepec::verify
