// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "sepec/sepec.hpp"

namespace sepec::acceptance {
namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

Vec uniform_vec(std::size_t k, Rng& rng, double lo = 0.0, double hi = 1.0) {
  Vec v(static_cast<Eigen::Index>(k));
  for (auto& x : v) x = lo + (hi - lo) * uniform01(rng);
  return v;
}

Mat unit_rows(std::size_t k, std::size_t d, Rng& rng) {
  Mat m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < m.rows(); ++i) m.row(i) = uniform_on_sphere(d, rng).transpose();
  return m;
}

// Policy with every arm bounded away from zero.
PolicyVector interior_policy(std::size_t k, Rng& rng) {
  return PolicyVector::normalized((flat_dirichlet(k, rng).array() + 0.05).matrix());
}

// Multinomial(n, p) counts by sequential binomials.
std::vector<long> multinomial(long n, const Vec& p, Rng& rng) {
  std::vector<long> out(static_cast<std::size_t>(p.size()), 0);
  double rest = 1.0;
  for (Eigen::Index a = 0; a + 1 < p.size() && n > 0; ++a) {
    const double q = rest > 0.0 ? std::clamp(p[a] / rest, 0.0, 1.0) : 0.0;
    const long c = std::binomial_distribution<long>(n, q)(rng);
    out[static_cast<std::size_t>(a)] = c;
    n -= c;
    rest -= p[a];
  }
  out.back() += n;
  return out;
}

double sample_variance(const std::vector<double>& xs) {
  double m = 0.0;
  for (double x : xs) m += x;
  m /= static_cast<double>(xs.size());
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size() - 1);
}

// sum_a min(c_a lo_a, c_a hi_a), written out independently of the library oracle.
double box_margin(const Vec& c, const Vec& lo, const Vec& hi) {
  double s = 0.0;
  for (Eigen::Index a = 0; a < c.size(); ++a) s += std::min(c[a] * lo[a], c[a] * hi[a]);
  return s;
}

// min over {(t-c)^T S^{-1} (t-c) <= rho} of v^T t.
double ellipsoid_margin(const Vec& v, const EllipsoidRegion& e) {
  return v.dot(e.center()) - std::sqrt(std::max(0.0, e.radius() * v.dot(e.shape() * v)));
}

// Visits every grid point of the K-simplex with the given number of steps.
void simplex_grid(std::size_t k, int steps, const std::function<void(const Vec&)>& visit) {
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

double surrogate(const Vec& w, const Vec& x) {
  double s = 0.0;
  for (Eigen::Index a = 0; a < w.size(); ++a)
    if (w[a] > 0.0) s += x[a] > 0.0 ? w[a] / x[a] : std::numeric_limits<double>::infinity();
  return s;
}

// ---------------------------------------------------------------------------

Outcome closed_form_variance() {
  Rng rng(101);
  const double horizon = 500.0;
  const long reps = 200000;
  double worst_exact = 0.0, worst_rel = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t k = 2 + rng() % 9;
    const PolicyVector pi0(flat_dirichlet(k, rng)), pi1(flat_dirichlet(k, rng));
    const MabInstance inst(uniform_vec(k, rng), uniform_vec(k, rng, 0.5, 1.5), 10.0);
    const auto delta = SignedPolicyDelta::between(pi1, pi0);
    const PolicyVector pe = lemma1_policy(delta);
    const double closed = lemma1_variance(delta, inst, horizon);
    const double exact = ipw_diff_variance_exact(pe, inst, delta, horizon);
    worst_exact = std::max(worst_exact, std::abs(closed - exact));
    // Per-arm reward sums are n_a r_a + sigma_a sqrt(n_a) Z given the counts.
    std::vector<double> est(static_cast<std::size_t>(reps));
    for (long r = 0; r < reps; ++r) {
      const auto n = multinomial(static_cast<long>(horizon), pe.weights(), rng);
      double s = 0.0;
      for (std::size_t a = 0; a < k; ++a) {
        if (n[a] == 0) continue;
        const auto i = static_cast<Eigen::Index>(a);
        const double na = static_cast<double>(n[a]);
        const double sum = na * inst.means()[i] + inst.noise_sds()[i] * std::sqrt(na) * standard_normal(rng);
        s += delta.deltas()[i] / pe[a] * sum;
      }
      est[static_cast<std::size_t>(r)] = s / horizon;
    }
    const double mc = horizon * sample_variance(est);
    worst_rel = std::max(worst_rel, std::abs(mc - horizon * exact) / (horizon * exact));
  }
  return {worst_exact <= 1e-12 && worst_rel <= 0.05,
          "max |closed - exact| " + fmt(worst_exact) + ", max MC relative error " + fmt(worst_rel)};
}

Outcome waterfill_optimality() {
  Rng rng(102);
  double worst = -std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = 2 + rng() % 3;
    const PolicyVector pi0(flat_dirichlet(k, rng)), pi1(flat_dirichlet(k, rng));
    const double eps = 0.02 + 0.9 * uniform01(rng);
    const Vec w = (pi1.weights() - pi0.weights()).array().square();
    const Vec floor = (1.0 - eps) * pi0.weights();
    const auto res = design_mab_worstcase(pi0, pi1, eps);
    const double got = surrogate(w, res.policy);
    double best = std::numeric_limits<double>::infinity();
    simplex_grid(k, 100, [&](const Vec& x) {
      if (((x - floor).array() >= 0.0).all()) best = std::min(best, surrogate(w, x));
    });
    if (std::isfinite(best)) worst = std::max(worst, got - best);
  }
  return {worst <= 1e-4, "max (solver - grid optimum) " + fmt(worst)};
}

Outcome region_consistency() {
  Rng rng(103);
  double worst_unit = 0.0, worst_interior = -std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t k = 2 + rng() % 9;
    const PolicyVector pi0(flat_dirichlet(k, rng)), pi1(flat_dirichlet(k, rng));
    const double eps = 0.02 + 0.5 * uniform01(rng);
    const auto wc = design_mab_worstcase(pi0, pi1, eps);
    const auto unit = design_mab_with_region(pi0, pi1, eps, BoxRegion::unit_cube(k));
    worst_unit = std::max(worst_unit, std::abs(unit.objective - wc.objective));
    Vec lo = uniform_vec(k, rng, 0.05, 0.45), hi = lo + uniform_vec(k, rng, 0.05, 0.5);
    const auto interior = design_mab_with_region(pi0, pi1, eps, BoxRegion(lo, hi));
    worst_interior = std::max(worst_interior, (interior.objective - wc.objective) / std::max(1.0, wc.objective));
  }
  return {worst_unit <= 1e-6 && worst_interior <= 1e-9,
          "max |unit box - worst case| " + fmt(worst_unit) + ", max relative excess of interior box " +
              fmt(worst_interior)};
}

Outcome minimax_and_average() {
  Rng rng(104);
  const double horizon = 100.0;
  int violations = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t k = 2 + rng() % 9;
    const PolicyVector pi0(flat_dirichlet(k, rng)), pi1(flat_dirichlet(k, rng));
    const double eps = 0.02 + 0.5 * uniform01(rng);
    const auto delta = SignedPolicyDelta::between(pi1, pi0);
    const PolicyVector design = design_mab_worstcase(pi0, pi1, eps).as_policy();
    // Corner instance r = 1, sigma_a = sigma.
    const double sigma = 0.5 + uniform01(rng);
    const MabInstance corner(Vec::Ones(static_cast<Eigen::Index>(k)), Vec::Constant(static_cast<Eigen::Index>(k), sigma),
                             10.0);
    // Constant-moment Q: r_a ~ U(0,1) independently, sigma_a = sigma, so
    // E[sigma_a^2 + r_a^2] = sigma^2 + 1/3 for every arm.
    const double m2 = sigma * sigma + 1.0 / 3.0;
    const Vec& d = delta.deltas();
    const double cross = d.squaredNorm() / 12.0 + std::pow(0.5 * d.sum(), 2);
    auto average = [&](const Vec& pe) { return (m2 * surrogate(d.array().square(), pe) - cross) / horizon; };
    const double v_corner = ipw_diff_variance_exact(design, corner, delta, horizon);
    const double v_avg = average(design.weights());
    for (int s = 0; s < 1000; ++s) {
      const PolicyVector pe((1.0 - eps) * pi0.weights() + eps * flat_dirichlet(k, rng));
      const double c = ipw_diff_variance_exact(pe, corner, delta, horizon);
      const double a = average(pe.weights());
      const double tol = 1e-12 * std::max(1.0, std::abs(c));
      worst = std::max({worst, v_corner - c, v_avg - a});
      if (v_corner > c + tol || v_avg > a + tol) ++violations;
    }
  }
  return {violations == 0, std::to_string(violations) + " violations, max excess " + fmt(worst)};
}

// T nu_MC against T nu_surrogate for the pooled DM difference at T = 100 and
// 2000. DM is unbiased given the sampled arms, so the variance is the mean over
// sampled designs of phi^T (Phi^T Phi + Phi_0^T Phi_0)^{-1} phi; that average
// over the replications decides the criterion. The plain sample variance of
// the simulated estimates is reported alongside.
Outcome dm_convergence() {
  Rng rng(105);
  const std::size_t d = 3, k = 20, n0 = 10;
  const long reps = 10000;
  double gap_small = 0.0, gap_large = 0.0, raw_small = 0.0, raw_large = 0.0;
  int shrunk = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const Mat x = unit_rows(k, d, rng);
    const Vec theta = uniform_on_sphere(d, rng);
    const Vec mu = x * theta;
    const PolicyVector pi0(flat_dirichlet(k, rng)), pi1(flat_dirichlet(k, rng));
    const PolicyVector pe = interior_policy(k, rng);
    const Vec phi = x.transpose() * (pi1.weights() - pi0.weights());
    // Logged actions are fixed; their rewards are redrawn every replication.
    const auto c0 = multinomial(static_cast<long>(n0), Vec::Constant(static_cast<Eigen::Index>(k), 1.0 / k), rng);
    Mat g0 = Mat::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t a = 0; a < k; ++a)
      g0 += static_cast<double>(c0[a]) * x.row(static_cast<Eigen::Index>(a)).transpose() * x.row(static_cast<Eigen::Index>(a));
    double gaps[2], raw[2];
    const long horizons[2] = {100, 2000};
    for (int h = 0; h < 2; ++h) {
      const long t = horizons[h];
      std::vector<double> est(static_cast<std::size_t>(reps));
      double cond = 0.0;
      for (long r = 0; r < reps; ++r) {
        const auto n = multinomial(t, pe.weights(), rng);
        Mat g = g0;
        Vec b = Vec::Zero(static_cast<Eigen::Index>(d));
        for (std::size_t a = 0; a < k; ++a) {
          const auto i = static_cast<Eigen::Index>(a);
          const double na = static_cast<double>(n[a]), ma = static_cast<double>(c0[a]);
          const Vec xa = x.row(i).transpose();
          g += na * xa * xa.transpose();
          b += xa * ((na + ma) * mu[i] + std::sqrt(na + ma) * standard_normal(rng));
        }
        const auto f = g.ldlt();
        est[static_cast<std::size_t>(r)] = phi.dot(f.solve(b));
        cond += phi.dot(f.solve(phi));
      }
      const double tt = static_cast<double>(t);
      const double sur = tt * opt::lb_objective(pe.weights(), phi, x, g0, tt).value;
      gaps[h] = std::abs(tt * cond / static_cast<double>(reps) - sur);
      raw[h] = std::abs(tt * sample_variance(est) - sur);
    }
    gap_small += gaps[0];
    gap_large += gaps[1];
    raw_small += raw[0];
    raw_large += raw[1];
    if (gaps[0] >= 3.0 * gaps[1]) ++shrunk;
  }
  const double ratio = gap_small / gap_large;
  return {ratio >= 3.0 && shrunk == 10,
          "mean gap T=100 " + fmt(gap_small / 10) + ", T=2000 " + fmt(gap_large / 10) + ", ratio " + fmt(ratio) + " (" +
              std::to_string(shrunk) + "/10 problems >= 3x); sample-variance ratio " + fmt(raw_small / raw_large)};
}

Outcome gradient_fd() {
  Rng rng(106);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 2 + rng() % 4, k = d + 1 + rng() % 10;
    const Mat x = unit_rows(k, d, rng);
    Vec phi(static_cast<Eigen::Index>(d));
    for (auto& v : phi) v = standard_normal(rng);
    const Vec pi = interior_policy(k, rng).weights();
    const Mat g0 = 0.5 * Mat::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    const double horizon = 50.0 + 500.0 * uniform01(rng);
    const Vec grad = opt::lb_objective(pi, phi, x, g0, horizon).gradient;
    const double h = 1e-6;
    Vec fd(pi.size());
    for (Eigen::Index i = 0; i < pi.size(); ++i) {
      Vec p = pi, m = pi;
      p[i] += h;
      m[i] -= h;
      fd[i] = (opt::lb_objective(p, phi, x, g0, horizon).value - opt::lb_objective(m, phi, x, g0, horizon).value) / (2 * h);
    }
    worst = std::max(worst, (fd - grad).cwiseAbs().maxCoeff() / grad.cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-5, "max relative error " + fmt(worst)};
}

Outcome ellipsoid_oracle() {
  Rng rng(107);
  double worst = -std::numeric_limits<double>::infinity();
  long violations = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 1 + rng() % 6;
    Mat a(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = standard_normal(rng);
    const Mat shape = a * a.transpose() + 0.05 * Mat::Identity(a.rows(), a.cols());
    Vec center(static_cast<Eigen::Index>(d)), v(static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < center.size(); ++i) {
      center[i] = standard_normal(rng);
      v[i] = standard_normal(rng);
    }
    const double radius = 0.1 + 3.0 * uniform01(rng);
    const auto best = max_linear_over_ellipsoid(v, EllipsoidRegion(center, shape, radius));
    const Mat l = Eigen::LLT<Mat>(shape).matrixL();
    for (int s = 0; s < 100000; ++s) {
      const Vec t = center + std::sqrt(radius) * l * uniform_on_sphere(d, rng);
      const double excess = v.dot(t) - best.value;
      worst = std::max(worst, excess);
      if (excess > 1e-9) ++violations;
    }
  }
  return {violations == 0, std::to_string(violations) + " violations, max sampled excess " + fmt(worst)};
}

// Designs on regions built the same way as the simulation harness.
Outcome cutting_plane_feasibility() {
  double min_margin = std::numeric_limits<double>::infinity();
  std::size_t max_cuts = 0, designs = 0;
  auto record = [&](double margin, std::size_t cuts) {
    min_margin = std::min(min_margin, margin);
    max_cuts = std::max(max_cuts, cuts);
    ++designs;
  };
  const std::vector<double> eps_grid{0.05, 0.1, 0.2};
  sim::ExperimentConfig cfg;
  Rng rng(108);

  cfg.setup = Setup::Mab;
  for (int trial = 0; trial < 30; ++trial) {
    const auto b = sim::generate_mab_instance(cfg, rng);
    const auto d0 = collect_dataset(b.instance, b.pi0, cfg.logged_size, rng);
    const auto k = static_cast<Eigen::Index>(cfg.K);
    std::vector<BoxRegion> boxes{
        bayes_mab_box(d0, b.instance.means(), Vec::Constant(k, cfg.prior_sd), b.instance.noise_sds(), cfg.delta).box};
    try {
      boxes.push_back(hoeffding_box(d0, b.instance.noise_sds(), cfg.delta));
    } catch (const SupportError&) {
    }
    for (const auto& box : boxes)
      for (double eps : eps_grid) {
        const auto res = design_mab_with_region(b.pi0, b.pi1, eps, box);
        record(box_margin(res.policy - (1.0 - eps) * b.pi0.weights(), box.lower(), box.upper()), res.diagnostics.cuts);
      }
  }

  cfg.setup = Setup::Cmab;
  for (int trial = 0; trial < 10; ++trial) {
    const auto b = sim::generate_cmab_instance(cfg, rng);
    const auto d0 = collect_dataset(b.instance, b.pi0, cfg.logged_size, rng);
    const auto n = static_cast<Eigen::Index>(cfg.K * cfg.contexts);
    const auto box = bayes_cmab_box(d0, b.instance.stacked_means(), Vec::Constant(n, cfg.prior_sd),
                                    Vec::Constant(n, cfg.sigma), cfg.delta, cfg.K)
                         .box;
    const Vec& probs = b.pi0.context_probs();
    for (double eps : eps_grid) {
      const auto res = design_cmab_with_region(b.pi0, b.pi1, eps, box);
      Vec c = res.policy - (1.0 - eps) * b.pi0.stacked();
      for (Eigen::Index x = 0; x < probs.size(); ++x)
        c.segment(x * static_cast<Eigen::Index>(cfg.K), static_cast<Eigen::Index>(cfg.K)) *= probs[x];
      record(box_margin(c, box.lower(), box.upper()), res.diagnostics.cuts);
    }
  }

  cfg.setup = Setup::Lb;
  cfg.K = 100;
  cfg.T = 200;
  for (int trial = 0; trial < 5; ++trial) {
    const auto b = sim::generate_lb_instance(cfg, rng);
    const Mat& arms = b.instance.arm_features();
    const auto d0 = collect_dataset(b.instance, b.pi0, cfg.logged_size, rng);
    const auto d = static_cast<Eigen::Index>(cfg.d);
    Mat gram0 = Mat::Zero(d, d);
    for (const auto& r : d0.records) {
      const Vec xa = arms.row(static_cast<Eigen::Index>(r.action)).transpose();
      gram0 += xa * xa.transpose();
    }
    const auto region = lb_bayes_ellipsoid(d0, arms, b.instance.theta_star(),
                                           Mat::Identity(d, d) * (cfg.prior_sd * cfg.prior_sd), cfg.sigma, cfg.delta)
                            .region;
    for (double eps : eps_grid) {
      const auto res = design_lb(b.pi0, b.pi1, eps, arms, gram0, static_cast<double>(cfg.T), region);
      record(ellipsoid_margin(arms.transpose() * (res.policy - (1.0 - eps) * b.pi0.weights()), region),
             res.diagnostics.cuts);
    }
  }
  return {min_margin >= -1e-9 && max_cuts <= 200, std::to_string(designs) + " designs, min margin " + fmt(min_margin) +
                                                      ", max cuts " + std::to_string(max_cuts)};
}

// Paired bootstrap standard error of stat(a) - stat(b) over runs.
double bootstrap_se(const std::vector<double>& a, const std::vector<double>& b,
                    const std::function<double(const std::vector<double>&)>& stat, Rng& rng) {
  const std::size_t n = a.size();
  std::vector<double> diffs;
  std::vector<double> ra(n), rb(n);
  for (int s = 0; s < 1000; ++s) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = rng() % n;
      ra[i] = a[j];
      rb[i] = b[j];
    }
    diffs.push_back(stat(ra) - stat(rb));
  }
  return std::sqrt(sample_variance(diffs));
}

double rmse_of(const std::vector<double>& sq) {
  double s = 0.0;
  for (double v : sq) s += v;
  return std::sqrt(s / static_cast<double>(sq.size()));
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

struct SetupReport {
  bool pass = true;
  std::string detail;
};

SetupReport check_protocol(const sim::ExperimentConfig& cfg, std::size_t jobs) {
  const auto res = sim::run_experiment(cfg, jobs);
  // (method, eps) -> seed -> record
  std::map<std::pair<std::string, double>, std::map<std::uint64_t, sim::RunRecord>> cells;
  for (const auto& r : res.records) cells[{r.method, r.eps}][r.seed] = r;
  Rng rng(109);
  SetupReport out;
  std::ostringstream os;
  double worst_loss = 0.0, worst_size = 0.0, worst_rmse = -1e300, worst_power = -1e300;
  for (double eps : cfg.eps_grid) {
    const auto& s = cells[{"sepec", eps}];
    double loss = 0.0, budget = 0.0;
    for (const auto& [seed, r] : s) {
      loss += r.safety_loss;
      budget += r.budget;
    }
    worst_loss = std::max(worst_loss, loss / budget);
    if (loss > 0.005 * budget) out.pass = false;

    for (const char* other : {"mixture", "safeod"}) {
      const auto& o = cells[{other, eps}];
      std::vector<double> se_s, se_o, pw_s, pw_o;
      for (const auto& [seed, r] : s) {
        auto it = o.find(seed);
        if (it == o.end()) continue;
        se_s.push_back(std::pow(r.estimate - r.true_diff, 2));
        se_o.push_back(std::pow(it->second.estimate - it->second.true_diff, 2));
        if (r.h1) {
          pw_s.push_back(r.rejected);
          pw_o.push_back(it->second.rejected);
        }
      }
      const double d_rmse = rmse_of(se_s) - rmse_of(se_o);
      const double se_rmse = bootstrap_se(se_s, se_o, rmse_of, rng);
      worst_rmse = std::max(worst_rmse, d_rmse / se_rmse);
      if (d_rmse > se_rmse) {
        out.pass = false;
        os << " [rmse vs " << other << " eps " << eps << ": " << fmt(d_rmse) << " > SE " << fmt(se_rmse) << "]";
      }
      if (std::string(other) == "mixture" && !pw_s.empty()) {
        const double d_pow = mean_of(pw_o) - mean_of(pw_s);
        const double se_pow = bootstrap_se(pw_o, pw_s, mean_of, rng);
        worst_power = std::max(worst_power, se_pow > 0.0 ? d_pow / se_pow : (d_pow > 0.0 ? 1e300 : 0.0));
        if (d_pow > se_pow) {
          out.pass = false;
          os << " [power vs mixture eps " << eps << ": deficit " << fmt(d_pow) << " > SE " << fmt(se_pow) << "]";
        }
      }
    }
    for (const auto& m : cfg.methods) {
      std::size_t h0 = 0, rej = 0;
      for (const auto& [seed, r] : cells[{m, eps}])
        if (!r.h1) {
          ++h0;
          rej += r.rejected;
        }
      const double size = h0 ? static_cast<double>(rej) / static_cast<double>(h0) : 0.0;
      worst_size = std::max(worst_size, size);
      if (size > cfg.alpha + 0.02) {
        out.pass = false;
        os << " [size " << m << " eps " << eps << ": " << fmt(size) << "]";
      }
    }
  }
  out.detail = "runs " + std::to_string(cfg.num_runs) + ", skipped " + std::to_string(res.skipped.size()) +
               ", max loss/budget " + fmt(worst_loss) + ", max rmse diff/SE " + fmt(worst_rmse) +
               ", max power deficit/SE " + fmt(worst_power) + ", max null size " + fmt(worst_size) + os.str();
  return out;
}

Outcome protocol_replication() {
  const std::size_t jobs = std::max(1u, std::thread::hardware_concurrency());
  sim::ExperimentConfig base;
  base.methods = {"sepec", "mixture", "safeod"};
  base.eps_grid = {0.05, 0.1, 0.2};

  sim::ExperimentConfig mab = base;
  mab.setup = Setup::Mab;
  mab.K = 10;
  mab.T = 500;
  mab.num_runs = 500;
  mab.seed = 11;

  sim::ExperimentConfig cmab = base;
  cmab.setup = Setup::Cmab;
  cmab.K = 10;
  cmab.T = 500;
  cmab.contexts = 30;
  cmab.num_runs = 500;
  cmab.seed = 12;

  sim::ExperimentConfig lb = base;
  lb.setup = Setup::Lb;
  lb.K = 100;
  lb.T = 200;
  lb.d = 5;
  lb.num_runs = 200;
  lb.seed = 13;

  Outcome out{true, ""};
  for (const auto& [name, cfg] : {std::pair{"MAB", mab}, std::pair{"CMAB", cmab}, std::pair{"LB", lb}}) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = check_protocol(cfg, jobs);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.pass = out.pass && r.pass;
    out.detail += std::string(out.detail.empty() ? "" : "; ") + name + (r.pass ? " ok" : " FAILED") + " (" + r.detail +
                  ", " + fmt(secs) + " s)";
  }
  return out;
}

Outcome counterexample_property() {
  Rng rng(110);
  int violations = 0;
  double min_gap = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t k = 2 + rng() % 9;
    const PolicyVector pe = interior_policy(k, rng);
    const std::size_t a1 = rng() % k;
    std::size_t a2 = rng() % (k - 1);
    if (a2 >= a1) ++a2;
    const auto ce = counterexample(pe, a1, a2);
    // Target and baseline differ on every arm, a1 and a2 included.
    const auto delta = SignedPolicyDelta::between(interior_policy(k, rng), interior_policy(k, rng));
    const double v_pe = ipw_diff_variance_exact(pe, ce.instance, delta, 1.0);
    const double v_b = ipw_diff_variance_exact(ce.alternative, ce.instance, delta, 1.0);
    min_gap = std::min(min_gap, v_pe - v_b);
    if (!(v_pe > v_b)) ++violations;
  }
  return {violations == 0, std::to_string(violations) + " violations, min nu(pi_e) - nu(b') " + fmt(min_gap)};
}

Outcome coverage() {
  const std::size_t reps = 2000;
  const double delta = 0.1;
  std::ostringstream os;
  bool pass = true;
  auto report = [&](const char* name, std::size_t hit) {
    const double freq = static_cast<double>(hit) / static_cast<double>(reps);
    pass = pass && freq >= 1.0 - delta - 0.02;
    os << (os.tellp() ? ", " : "") << name << " " << fmt(freq);
  };

  {
    Rng rng(111);
    const std::size_t k = 5;
    std::size_t hit = 0;
    for (std::size_t i = 0; i < reps; ++i) {
      const auto inst = MabInstance::gaussian(uniform_vec(k, rng), 1.0);
      // Every arm observed: stratified logging keeps the box well defined.
      std::vector<Record> rec;
      for (std::size_t t = 0; t < 100; ++t) {
        const std::size_t a = t % k;
        rec.push_back(Record{std::nullopt, a, inst.means()[static_cast<Eigen::Index>(a)] + standard_normal(rng)});
      }
      const BanditDataset ds(rec, PolicyVector::uniform(k), rec.size());
      hit += hoeffding_box(ds, Vec::Ones(static_cast<Eigen::Index>(k)), delta).contains(inst.means(), 0.0);
    }
    report("hoeffding", hit);
  }
  {
    Rng rng(112);
    const std::size_t k = 4;
    const double prior_sd = 0.1;
    const Vec mu = Vec::Constant(static_cast<Eigen::Index>(k), 0.5);
    std::size_t hit = 0;
    for (std::size_t i = 0; i < reps; ++i) {
      Vec r(static_cast<Eigen::Index>(k));
      for (auto& v : r) v = 0.5 + prior_sd * standard_normal(rng);
      std::vector<Record> rec;
      for (int t = 0; t < 40; ++t) {
        const std::size_t a = rng() % k;
        rec.push_back(Record{std::nullopt, a, r[static_cast<Eigen::Index>(a)] + standard_normal(rng)});
      }
      const BanditDataset ds(rec, PolicyVector::uniform(k), rec.size());
      const auto res = bayes_mab_box(ds, mu, Vec::Constant(static_cast<Eigen::Index>(k), prior_sd),
                                     Vec::Ones(static_cast<Eigen::Index>(k)), delta);
      hit += res.box.contains(r, 0.0);
    }
    report("bayes box", hit);
  }
  {
    Rng rng(113);
    const std::size_t d = 3, k = 8;
    const Mat x = unit_rows(k, d, rng);
    std::size_t hit = 0;
    for (std::size_t i = 0; i < reps; ++i) {
      Vec theta(static_cast<Eigen::Index>(d));
      for (auto& v : theta) v = standard_normal(rng);
      const auto ds = collect_dataset(LinearInstance(theta, x, 1.0), PolicyVector::uniform(k), 30, rng);
      const auto res = lb_bayes_ellipsoid(ds, x, Vec::Zero(static_cast<Eigen::Index>(d)),
                                          Mat::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)), 1.0,
                                          delta);
      hit += res.region.contains(theta);
    }
    report("bayes ellipsoid", hit);
  }
  return {pass, os.str() + " (need >= " + fmt(1.0 - delta - 0.02) + ")"};
}

}  // namespace
}  // namespace sepec::acceptance

int main() {
  using namespace sepec::acceptance;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"closed-form optimal variance", closed_form_variance},
      {"water-filling optimality", waterfill_optimality},
      {"worst-case/region consistency", region_consistency},
      {"minimax and average case", minimax_and_average},
      {"direct-method convergence", dm_convergence},
      {"gradient correctness", gradient_fd},
      {"ellipsoid oracle", ellipsoid_oracle},
      {"cutting-plane feasibility", cutting_plane_feasibility},
      {"scaled protocol replication", protocol_replication},
      {"counter-example property", counterexample_property},
      {"coverage", coverage},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << (i + 1) << " " << criteria[i].first << ": " << o.detail
              << " [" << fmt(secs) << " s]" << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
