#pragma once

// Monte-Carlo experiment harness: instance generators, per-run design /
// collection / estimation, metrics and aggregation.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "sepec/core.hpp"
#include "sepec/designers.hpp"
#include "sepec/error.hpp"
#include "sepec/estimators.hpp"
#include "sepec/problem.hpp"
#include "sepec/random.hpp"
#include "sepec/regions.hpp"

namespace sepec::sim {

using sepec::Setup;
using sepec::parse_setup;
using sepec::to_string;

struct ExperimentConfig {
  Setup setup = Setup::Mab;
  std::size_t K = 10;
  std::size_t T = 500;
  std::size_t d = 5;
  std::size_t contexts = 30;
  std::size_t logged_size = 100;
  std::string logging_policy = "pi0";  // policy that collects the logged data: "pi0" or "uniform"
  std::vector<double> eps_grid{0.05, 0.1, 0.2};
  double delta = 0.05;
  double alpha = 0.05;
  double sigma = 3.0;
  double prior_sd = 0.2;
  double prior_offset = 0.0;
  std::size_t num_runs = 500;
  std::uint64_t seed = 0;
  std::vector<std::string> methods{"sepec", "mixture", "safeod"};
  std::string output = "runs.csv";
  WeightMode weights = WeightMode::Unit;
  DesignConfig design;

  void validate() const {
    if (num_runs < 1) throw InvalidArgument("config: num_runs must be at least 1");
    if (eps_grid.empty()) throw InvalidArgument("config: eps grid is empty");
    for (double e : eps_grid)
      if (!(e > 0.0 && e <= 1.0)) throw InvalidArgument("config: every epsilon must lie in (0,1]");
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("config: alpha must lie in (0,1)");
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("config: delta must lie in (0,1)");
    if (K < 2) throw InvalidArgument("config: K must be at least 2");
    if (T < 1) throw InvalidArgument("config: T must be at least 1");
    if (!(sigma > 0.0) || !(prior_sd > 0.0)) throw InvalidArgument("config: sigma and prior_sd must be positive");
    if (setup == Setup::Cmab && contexts < 1) throw InvalidArgument("config: contexts must be at least 1");
    if (setup == Setup::Lb && d < 1) throw InvalidArgument("config: d must be at least 1");
    if (logging_policy != "pi0" && logging_policy != "uniform")
      throw InvalidArgument("config: logging_policy must be 'pi0' or 'uniform'");
    if (methods.empty()) throw InvalidArgument("config: method list is empty");
    for (const auto& m : methods)
      if (!method_known(m)) throw InvalidArgument("config: unknown method '" + m + "'");
  }

  bool method_known(const std::string& m) const {
    static const std::vector<std::string> common{"sepec", "mixture", "safeod", "uniform", "ab", "oracle-truth"};
    if (std::find(common.begin(), common.end(), m) != common.end()) return true;
    if (m == "sepec_worstcase") return setup != Setup::Lb;
    if (m == "sepec_pi") return setup == Setup::Lb;
    return false;
  }
};

struct RunRecord {
  std::string method;
  double eps = 0.0;
  std::uint64_t seed = 0;
  bool h1 = false;
  double estimate = 0.0;
  double true_diff = 0.0;
  bool rejected = false;
  double safety_loss = 0.0;
  // Not serialized: T * V(pi_0) for relative safety checks.
  double budget = 0.0;
};

struct SkipRecord {
  std::string method;
  double eps = 0.0;
  std::uint64_t seed = 0;
  std::string reason;
};

// ---------------------------------------------------------------------------
// Instance generators

struct MabBundle {
  MabInstance instance;
  PolicyVector pi0;
  PolicyVector pi1;
  bool h1;
};

struct CmabBundle {
  CmabInstance instance;
  ContextualPolicy pi0;
  ContextualPolicy pi1;
  bool h1;
};

struct LbBundle {
  LinearInstance instance;
  PolicyVector pi0;
  PolicyVector pi1;
  bool h1;
};

namespace detail {

inline PolicyVector logging_policy_for(const ExperimentConfig& cfg, const PolicyVector& pi0) {
  return cfg.logging_policy == "uniform" ? PolicyVector::uniform(pi0.size()) : pi0;
}

inline ContextualPolicy logging_policy_for(const ExperimentConfig& cfg, const ContextualPolicy& pi0) {
  if (cfg.logging_policy != "uniform") return pi0;
  return ContextualPolicy(std::vector<PolicyVector>(pi0.num_contexts(), PolicyVector::uniform(pi0.num_arms())),
                          pi0.context_probs());
}

}  // namespace detail

namespace detail {

inline Vec uniform_vector(std::size_t k, Rng& rng) {
  Vec v(static_cast<Eigen::Index>(k));
  for (auto& x : v) x = uniform01(rng);
  return v;
}

// r ~ U(0,1)^K, r~ ~ U(0,1)^K; the "informed" policy is proportional to
// 0.5 r~ + 0.5 r and the other to r~. Under H1 the target is the informed one.
inline std::pair<Vec, std::pair<PolicyVector, PolicyVector>> mab_draw(std::size_t k, bool h1, Rng& rng) {
  Vec r = uniform_vector(k, rng);
  Vec noise_policy;
  do {
    noise_policy = uniform_vector(k, rng);
  } while (!(noise_policy.sum() > 0.0));
  PolicyVector random_pi = PolicyVector::normalized(noise_policy);
  PolicyVector informed = PolicyVector::normalized(0.5 * noise_policy + 0.5 * r);
  if (h1) return {r, {random_pi, informed}};
  return {r, {informed, random_pi}};
}

}  // namespace detail

inline MabBundle generate_mab_instance(const ExperimentConfig& cfg, Rng& rng) {
  if (cfg.K < 2) throw InvalidArgument("generate_mab_instance: K must be at least 2");
  const bool h1 = uniform01(rng) < 0.5;
  auto [r, pols] = detail::mab_draw(cfg.K, h1, rng);
  return MabBundle{MabInstance::gaussian(r, cfg.sigma), pols.first, pols.second, h1};
}

inline CmabBundle generate_cmab_instance(const ExperimentConfig& cfg, Rng& rng) {
  if (cfg.K < 2 || cfg.contexts < 1) throw InvalidArgument("generate_cmab_instance: bad sizes");
  const bool h1 = uniform01(rng) < 0.5;
  const Vec probs = flat_dirichlet(cfg.contexts, rng);
  std::vector<MabInstance> inst;
  std::vector<PolicyVector> p0, p1;
  for (std::size_t x = 0; x < cfg.contexts; ++x) {
    auto [r, pols] = detail::mab_draw(cfg.K, h1, rng);
    inst.push_back(MabInstance::gaussian(r, cfg.sigma));
    p0.push_back(pols.first);
    p1.push_back(pols.second);
  }
  return CmabBundle{CmabInstance(std::move(inst), probs), ContextualPolicy(std::move(p0), probs),
                    ContextualPolicy(std::move(p1), probs), h1};
}

// Policy proportional to max(x^T theta, 0); redrawn by the caller if every
// arm gets zero weight.
inline std::optional<PolicyVector> clipped_linear_policy(const Mat& arms, const Vec& theta) {
  const Vec w = (arms * theta).cwiseMax(0.0);
  if (!(w.sum() > 0.0)) return std::nullopt;
  return PolicyVector(w / w.sum());
}

inline LbBundle generate_lb_instance(const ExperimentConfig& cfg, Rng& rng) {
  const std::size_t k = cfg.K, d = cfg.d;
  if (k < 1 || d < 1) throw InvalidArgument("generate_lb_instance: bad sizes");
  const bool h1 = uniform01(rng) < 0.5;
  Vec theta(static_cast<Eigen::Index>(d));
  do {
    for (auto& t : theta) t = standard_normal(rng);
  } while (!(theta.norm() > 0.0));
  Mat arms(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(d));
  for (std::size_t a = 0; a < k; ++a) {
    Vec x;
    double s = 0.0;
    do {
      x = uniform_on_sphere(d, rng);
      s = x.dot(theta);
    } while (s == 0.0);
    // The sphere is symmetric, so flipping the sign is the same as resampling
    // until x^T theta > 0.
    arms.row(static_cast<Eigen::Index>(a)) = (s > 0.0 ? x : Vec(-x)).transpose();
  }
  for (int attempt = 0; attempt < 10000; ++attempt) {
    Vec tilde(static_cast<Eigen::Index>(d));
    for (auto& t : tilde) t = standard_normal(rng);
    auto random_pi = clipped_linear_policy(arms, tilde);
    auto informed = clipped_linear_policy(arms, Vec(0.5 * tilde + 0.5 * theta));
    if (!random_pi || !informed) continue;
    LinearInstance inst(theta, arms, cfg.sigma);
    if (h1) return LbBundle{std::move(inst), *random_pi, *informed, h1};
    return LbBundle{std::move(inst), *informed, *random_pi, h1};
  }
  throw Error("generate_lb_instance: could not draw policies with positive support");
}

// ---------------------------------------------------------------------------
// Safety loss

// max(0, T (1 - eps) V(pi_0) - sum_t E[R_t | A_t]).
inline double safety_loss(double sum_conditional_means, std::size_t horizon, double baseline_value, double eps) {
  return std::max(0.0, static_cast<double>(horizon) * (1.0 - eps) * baseline_value - sum_conditional_means);
}

inline double safety_loss(const std::vector<std::size_t>& actions, const MabInstance& instance,
                          const PolicyVector& pi0, double eps) {
  double s = 0.0;
  for (std::size_t a : actions) s += instance.means()[static_cast<Eigen::Index>(a)];
  return safety_loss(s, actions.size(), policy_value(instance, pi0), eps);
}

inline double safety_loss(const BanditDataset& ds, const MabInstance& instance, const PolicyVector& pi0, double eps) {
  double s = 0.0;
  for (const auto& r : ds.records) s += instance.means()[static_cast<Eigen::Index>(r.action)];
  return safety_loss(s, ds.records.size(), policy_value(instance, pi0), eps);
}

inline double safety_loss(const BanditDataset& ds, const CmabInstance& instance, const ContextualPolicy& pi0,
                          double eps) {
  double s = 0.0;
  for (const auto& r : ds.records) s += instance.at(r.context.value_or(0)).means()[static_cast<Eigen::Index>(r.action)];
  return safety_loss(s, ds.records.size(), policy_value(instance, pi0), eps);
}

inline double safety_loss(const BanditDataset& ds, const LinearInstance& instance, const PolicyVector& pi0,
                          double eps) {
  const Vec means = instance.arm_means();
  double s = 0.0;
  for (const auto& r : ds.records) s += means[static_cast<Eigen::Index>(r.action)];
  return safety_loss(s, ds.records.size(), linear_policy_value(instance, pi0), eps);
}

// ---------------------------------------------------------------------------
// Runs

struct RunOutput {
  std::vector<RunRecord> records;
  std::vector<SkipRecord> skipped;
};

namespace detail {

inline std::uint64_t run_seed(std::uint64_t seed, std::size_t run) { return derive_seed(seed, run, 0); }

inline std::string stream_name(const std::string& method, std::size_t eps_index) {
  return method + "#" + std::to_string(eps_index);
}

inline void finish_record(RunRecord& rec, const EstimateReport& rep, double horizon, double alpha) {
  rec.estimate = rep.value;
  const double sd = rep.plug_in_sd.value_or(0.0);
  if (sd > 0.0 && std::isfinite(sd))
    rec.rejected = z_test(rep.value, sd, horizon, alpha).reject;
  else
    rec.rejected = rep.value > 0.0;
}

template <class Body>
void guarded(RunOutput& out, const std::string& method, double eps, std::uint64_t seed, Body&& body) {
  try {
    out.records.push_back(body());
  } catch (const std::exception& e) {
    out.skipped.push_back(SkipRecord{method, eps, seed, e.what()});
  }
}

inline RunOutput run_mab(const ExperimentConfig& cfg, std::size_t run) {
  RunOutput out;
  const std::uint64_t seed = run_seed(cfg.seed, run);
  Rng inst_rng = derive_rng(seed, 0, stream_tag("instance"));
  const MabBundle b = generate_mab_instance(cfg, inst_rng);
  Rng log_rng = derive_rng(seed, 0, stream_tag("logged"));
  const BanditDataset d0 = collect_dataset(b.instance, detail::logging_policy_for(cfg, b.pi0), cfg.logged_size, log_rng);
  const auto k = static_cast<Eigen::Index>(cfg.K);
  const auto region = bayes_mab_box(d0, (b.instance.means().array() + cfg.prior_offset).matrix(),
                                    Vec::Constant(k, cfg.prior_sd), b.instance.noise_sds(), cfg.delta);
  const Vec moments = region.posterior.expected_noise_var() + region.posterior.expected_reward_sq();
  const SignedPolicyDelta delta = SignedPolicyDelta::between(b.pi1, b.pi0);
  const double true_diff = policy_value(b.instance, delta);
  const double budget = static_cast<double>(cfg.T) * policy_value(b.instance, b.pi0);

  for (std::size_t e = 0; e < cfg.eps_grid.size(); ++e) {
    const double eps = cfg.eps_grid[e];
    for (const auto& method : cfg.methods) {
      guarded(out, method, eps, seed, [&] {
        RunRecord rec{method, eps, seed, b.h1, 0.0, true_diff, false, 0.0, budget};
        if (method == "oracle-truth") {
          rec.estimate = true_diff;
          rec.rejected = true_diff > 0.0;
          return rec;
        }
        PolicyVector pe = [&] {
          if (method == "sepec")
            return design_mab_with_region(b.pi0, b.pi1, eps, region.box, cfg.weights, moments, cfg.design).as_policy();
          if (method == "sepec_worstcase") return design_mab_worstcase(b.pi0, b.pi1, eps, cfg.weights, moments).as_policy();
          if (method == "mixture") return baseline_mixture(b.pi0, b.pi1, eps);
          if (method == "safeod") return baseline_safe_od(b.pi0, eps);
          if (method == "uniform") return baseline_uniform(cfg.K);
          return baseline_ab(b.pi0, b.pi1);
        }();
        Rng rng = derive_rng(seed, 0, stream_tag(stream_name(method, e)));
        const BanditDataset de = collect_dataset(b.instance, pe, cfg.T, rng);
        finish_record(rec, ipw_value(de, delta), static_cast<double>(cfg.T), cfg.alpha);
        rec.safety_loss = safety_loss(de, b.instance, b.pi0, eps);
        return rec;
      });
    }
  }
  return out;
}

inline RunOutput run_cmab(const ExperimentConfig& cfg, std::size_t run) {
  RunOutput out;
  const std::uint64_t seed = run_seed(cfg.seed, run);
  Rng inst_rng = derive_rng(seed, 0, stream_tag("instance"));
  const CmabBundle b = generate_cmab_instance(cfg, inst_rng);
  Rng log_rng = derive_rng(seed, 0, stream_tag("logged"));
  const BanditDataset d0 = collect_dataset(b.instance, detail::logging_policy_for(cfg, b.pi0), cfg.logged_size, log_rng);
  const auto n = static_cast<Eigen::Index>(cfg.K * cfg.contexts);
  const Vec means = b.instance.stacked_means();
  const auto region = bayes_cmab_box(d0, (means.array() + cfg.prior_offset).matrix(), Vec::Constant(n, cfg.prior_sd),
                                     Vec::Constant(n, cfg.sigma), cfg.delta, cfg.K);
  const Vec moments = region.posterior.expected_noise_var() + region.posterior.expected_reward_sq();
  std::vector<Vec> delta_rows;
  for (std::size_t x = 0; x < cfg.contexts; ++x) delta_rows.push_back(b.pi1.at(x).weights() - b.pi0.at(x).weights());
  const Target delta(delta_rows);
  const double true_diff = policy_value(b.instance, b.pi1) - policy_value(b.instance, b.pi0);
  const double budget = static_cast<double>(cfg.T) * policy_value(b.instance, b.pi0);
  const Vec& probs = b.pi0.context_probs();

  for (std::size_t e = 0; e < cfg.eps_grid.size(); ++e) {
    const double eps = cfg.eps_grid[e];
    for (const auto& method : cfg.methods) {
      guarded(out, method, eps, seed, [&] {
        RunRecord rec{method, eps, seed, b.h1, 0.0, true_diff, false, 0.0, budget};
        if (method == "oracle-truth") {
          rec.estimate = true_diff;
          rec.rejected = true_diff > 0.0;
          return rec;
        }
        ContextualPolicy pe = [&] {
          if (method == "sepec")
            return design_cmab_with_region(b.pi0, b.pi1, eps, region.box, cfg.weights, moments, cfg.design)
                .as_contextual(probs);
          if (method == "sepec_worstcase")
            return design_cmab_worstcase(b.pi0, b.pi1, eps, cfg.weights, moments).as_contextual(probs);
          if (method == "mixture") return baseline_mixture(b.pi0, b.pi1, eps);
          if (method == "safeod") return baseline_safe_od(b.pi0, eps);
          std::vector<PolicyVector> rows;
          for (std::size_t x = 0; x < cfg.contexts; ++x)
            rows.push_back(method == "uniform" ? baseline_uniform(cfg.K) : baseline_ab(b.pi0.at(x), b.pi1.at(x)));
          return ContextualPolicy(std::move(rows), probs);
        }();
        Rng rng = derive_rng(seed, 0, stream_tag(stream_name(method, e)));
        const BanditDataset de = collect_dataset(b.instance, pe, cfg.T, rng);
        finish_record(rec, ipw_value(de, delta), static_cast<double>(cfg.T), cfg.alpha);
        rec.safety_loss = safety_loss(de, b.instance, b.pi0, eps);
        return rec;
      });
    }
  }
  return out;
}

inline RunOutput run_lb(const ExperimentConfig& cfg, std::size_t run) {
  RunOutput out;
  const std::uint64_t seed = run_seed(cfg.seed, run);
  Rng inst_rng = derive_rng(seed, 0, stream_tag("instance"));
  const LbBundle b = generate_lb_instance(cfg, inst_rng);
  const Mat& arms = b.instance.arm_features();
  Rng log_rng = derive_rng(seed, 0, stream_tag("logged"));
  const BanditDataset d0 = collect_dataset(b.instance, detail::logging_policy_for(cfg, b.pi0), cfg.logged_size, log_rng);
  const auto d = static_cast<Eigen::Index>(cfg.d);
  const Vec prior_mean = (b.instance.theta_star().array() + cfg.prior_offset).matrix();
  const Mat prior_cov = Mat::Identity(d, d) * (cfg.prior_sd * cfg.prior_sd);
  std::optional<EllipsoidWithPosterior> region;
  std::string region_error;
  try {
    region.emplace(lb_bayes_ellipsoid(d0, arms, prior_mean, prior_cov, cfg.sigma, cfg.delta));
  } catch (const std::exception& ex) {
    region_error = ex.what();
  }
  Vec counts = Vec::Zero(arms.rows());
  for (const auto& r : d0.records) counts[static_cast<Eigen::Index>(r.action)] += 1.0;
  const Mat gram0 = arms.transpose() * counts.asDiagonal() * arms;
  const SignedPolicyDelta delta = SignedPolicyDelta::between(b.pi1, b.pi0);
  const double true_diff = linear_policy_value(b.instance, b.pi1) - linear_policy_value(b.instance, b.pi0);
  const double budget = static_cast<double>(cfg.T) * linear_policy_value(b.instance, b.pi0);
  const double horizon = static_cast<double>(cfg.T);

  for (std::size_t e = 0; e < cfg.eps_grid.size(); ++e) {
    const double eps = cfg.eps_grid[e];
    for (const auto& method : cfg.methods) {
      guarded(out, method, eps, seed, [&] {
        RunRecord rec{method, eps, seed, b.h1, 0.0, true_diff, false, 0.0, budget};
        if (method == "oracle-truth") {
          rec.estimate = true_diff;
          rec.rejected = true_diff > 0.0;
          return rec;
        }
        const bool needs_region = method == "sepec" || method == "sepec_pi" || method == "safeod";
        if (needs_region && !region) throw Error("region construction failed: " + region_error);
        PolicyVector pe = [&] {
          if (method == "sepec")
            return design_lb(b.pi0, b.pi1, eps, arms, gram0, horizon, region->region, cfg.design).as_policy();
          if (method == "sepec_pi") return design_lb_pi(b.pi1, eps, arms, region->region, b.pi0, cfg.design).as_policy();
          if (method == "safeod")
            return baseline_safe_od_lb(b.pi0, eps, arms, gram0, horizon, region->region, cfg.design).as_policy();
          if (method == "mixture") return baseline_mixture(b.pi0, b.pi1, eps);
          if (method == "uniform") return baseline_uniform(cfg.K);
          return baseline_ab(b.pi0, b.pi1);
        }();
        Rng rng = derive_rng(seed, 0, stream_tag(stream_name(method, e)));
        const BanditDataset de = collect_dataset(b.instance, pe, cfg.T, rng);
        const EstimateReport rep = dm_lb_report({d0, de}, delta, arms);
        finish_record(rec, rep, static_cast<double>(rep.n), cfg.alpha);
        rec.safety_loss = safety_loss(de, b.instance, b.pi0, eps);
        return rec;
      });
    }
  }
  return out;
}

}  // namespace detail

inline RunOutput run_single(const ExperimentConfig& cfg, std::size_t run) {
  switch (cfg.setup) {
    case Setup::Mab: return detail::run_mab(cfg, run);
    case Setup::Cmab: return detail::run_cmab(cfg, run);
    case Setup::Lb: return detail::run_lb(cfg, run);
  }
  return {};
}

// ---------------------------------------------------------------------------
// Aggregation

struct AggregateRow {
  std::string method;
  double eps = 0.0;
  double rmse = 0.0;
  double power = 0.0;
  double mean_safety_loss = 0.0;
  std::size_t n_runs = 0;
};

// Per (method, eps) cell in first-appearance order: RMSE over all runs, power
// as the rejection rate among H1 runs (NaN if there are none), mean safety loss.
inline std::vector<AggregateRow> aggregate(const std::vector<RunRecord>& records) {
  struct Acc {
    double se = 0.0, loss = 0.0;
    std::size_t n = 0, h1 = 0, rej = 0;
  };
  std::vector<std::pair<std::string, double>> order;
  std::map<std::pair<std::string, double>, Acc> cells;
  for (const auto& r : records) {
    const auto key = std::make_pair(r.method, r.eps);
    auto it = cells.find(key);
    if (it == cells.end()) {
      order.push_back(key);
      it = cells.emplace(key, Acc{}).first;
    }
    Acc& a = it->second;
    a.se += (r.estimate - r.true_diff) * (r.estimate - r.true_diff);
    a.loss += r.safety_loss;
    ++a.n;
    if (r.h1) {
      ++a.h1;
      if (r.rejected) ++a.rej;
    }
  }
  std::vector<AggregateRow> rows;
  for (const auto& key : order) {
    const Acc& a = cells.at(key);
    const double n = static_cast<double>(a.n);
    rows.push_back(AggregateRow{key.first, key.second, std::sqrt(a.se / n),
                                a.h1 ? static_cast<double>(a.rej) / static_cast<double>(a.h1)
                                     : std::numeric_limits<double>::quiet_NaN(),
                                a.loss / n, a.n});
  }
  return rows;
}

struct ExperimentResult {
  std::vector<RunRecord> records;
  std::vector<SkipRecord> skipped;
  std::vector<AggregateRow> aggregates;
};

// Runs are independent: each derives its streams from (seed, run index), and
// records are merged in run-index order so the output does not depend on jobs.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg, std::size_t jobs = 1,
                                       const std::function<void(std::size_t)>& progress = {}) {
  cfg.validate();
  std::vector<RunOutput> outputs(cfg.num_runs);
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t run = next.fetch_add(1);
      if (run >= cfg.num_runs) return;
      try {
        outputs[run] = run_single(cfg, run);
      } catch (const std::exception& e) {
        for (const auto& m : cfg.methods)
          for (double eps : cfg.eps_grid)
            outputs[run].skipped.push_back(SkipRecord{m, eps, detail::run_seed(cfg.seed, run), e.what()});
      }
      const std::size_t finished = ++done;
      if (progress) {
        std::lock_guard<std::mutex> lock(progress_mutex);
        progress(finished);
      }
    }
  };
  jobs = std::max<std::size_t>(1, std::min(jobs, cfg.num_runs));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  ExperimentResult res;
  for (auto& o : outputs) {
    for (auto& r : o.records) res.records.push_back(std::move(r));
    for (auto& s : o.skipped) res.skipped.push_back(std::move(s));
  }
  res.aggregates = aggregate(res.records);
  return res;
}

}  // namespace sepec::sim
