#pragma once

// Value estimators (IPW, DM, DR, PI), exact variance functionals and the
// one-sided z-test used to compare two policies.

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sepec/core.hpp"
#include "sepec/error.hpp"
#include "sepec/linalg.hpp"
#include "sepec/stats.hpp"

namespace sepec {

struct EstimateReport {
  double value = 0.0;
  std::optional<double> plug_in_sd;  // none only when n < 2
  std::size_t n = 0;
  bool singular = false;  // PI estimator fell back to a pseudo-inverse
};

struct TestOutcome {
  double z_stat = 0.0;
  bool reject = false;
  double alpha = 0.05;
};

// Target weights per (context, arm). Signed entries are allowed so that a
// difference pi_1 - pi_0 is estimated in one pass. A non-contextual target has
// a single row that is used for every record.
class Target {
 public:
  Target(const Vec& weights) : rows_{weights} {}  // NOLINT(google-explicit-constructor)
  Target(const PolicyVector& p) : rows_{p.weights()} {}  // NOLINT
  Target(const SignedPolicyDelta& d) : rows_{d.deltas()} {}  // NOLINT
  Target(const ContextualPolicy& cp) {  // NOLINT
    for (const auto& p : cp.per_context()) rows_.push_back(p.weights());
  }
  explicit Target(std::vector<Vec> per_context) : rows_(std::move(per_context)) {
    if (rows_.empty()) throw InvalidArgument("Target: no contexts");
  }

  double operator()(const Record& r) const {
    const Vec& row = rows_.size() == 1 ? rows_.front() : rows_.at(r.context.value_or(0));
    if (r.action >= static_cast<std::size_t>(row.size()))
      throw DimensionError("Target: action index", static_cast<std::size_t>(row.size()), r.action);
    return row[static_cast<Eigen::Index>(r.action)];
  }

  bool contextual() const noexcept { return rows_.size() > 1; }
  std::size_t num_arms() const { return static_cast<std::size_t>(rows_.front().size()); }
  const std::vector<Vec>& rows() const noexcept { return rows_; }

 private:
  std::vector<Vec> rows_;
};

namespace detail {

inline EstimateReport summarize_terms(const std::vector<double>& terms) {
  EstimateReport rep;
  rep.n = terms.size();
  if (terms.empty()) return rep;
  double mean = 0.0;
  for (double t : terms) mean += t;
  mean /= static_cast<double>(terms.size());
  rep.value = mean;
  if (terms.size() >= 2) {
    double ss = 0.0;
    for (double t : terms) ss += (t - mean) * (t - mean);
    rep.plug_in_sd = std::sqrt(ss / static_cast<double>(terms.size() - 1));
  }
  return rep;
}

// pi(A)/pi_e(A) for one record; zero target weight needs no coverage.
inline double importance_weight(const BanditDataset& ds, const Record& r, const Target& target) {
  const double w = target(r);
  if (w == 0.0) return 0.0;
  const double logging = ds.logging_prob(r);
  if (!(logging > 0.0))
    throw SupportError("importance weight: target puts mass on an arm the logger never plays", r.action);
  return w / logging;
}

inline void append_ipw_terms(const BanditDataset& ds, const Target& target, double shift,
                             std::vector<double>& terms) {
  for (const auto& r : ds.records) terms.push_back(importance_weight(ds, r, target) * (r.reward - shift));
}

inline double ratio_or_zero(double num, double den, std::size_t arm) {
  if (num == 0.0) return 0.0;
  if (!(den > 0.0)) throw SupportError("exploration policy has no mass where the target differs", arm);
  return num / den;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// IPW family

inline EstimateReport ipw_value(const BanditDataset& ds, const Target& target) {
  std::vector<double> terms;
  terms.reserve(ds.records.size());
  detail::append_ipw_terms(ds, target, 0.0, terms);
  return detail::summarize_terms(terms);
}

// Pools several datasets, weighting each record by its own logging policy.
inline EstimateReport ipw_multi_logger_value(const std::vector<BanditDataset>& datasets,
                                             const Target& target) {
  std::vector<double> terms;
  for (const auto& ds : datasets) detail::append_ipw_terms(ds, target, 0.0, terms);
  return detail::summarize_terms(terms);
}

inline EstimateReport dr_value(const BanditDataset& ds, const Target& target, double dm_estimate) {
  std::vector<double> terms;
  terms.reserve(ds.records.size());
  detail::append_ipw_terms(ds, target, dm_estimate, terms);
  EstimateReport rep = detail::summarize_terms(terms);
  rep.value += dm_estimate;
  return rep;
}

// ---------------------------------------------------------------------------
// Exact variance functionals

// T^{-1} [ sum_a w(a)^2 (s_a^2 + m_a^2) / pi_e(a) - (sum_a w(a) m_a)^2 ]: the
// variance of the mean of T i.i.d. terms w(A)/pi_e(A) * R with A ~ pi_e.
inline double ipw_variance_general(const Vec& pi_e, const Vec& w, const Vec& second_moment,
                                   double mean_value, double horizon) {
  if (!(horizon > 0.0)) throw InvalidArgument("variance: T must be positive");
  double s = 0.0;
  for (Eigen::Index a = 0; a < w.size(); ++a)
    s += detail::ratio_or_zero(w[a] * w[a] * second_moment[a], pi_e[a], static_cast<std::size_t>(a));
  return (s - mean_value * mean_value) / horizon;
}

inline Vec second_moments(const MabInstance& instance) {
  Vec m(instance.means().size());
  for (Eigen::Index a = 0; a < m.size(); ++a)
    m[a] = instance.reward_variance(static_cast<std::size_t>(a)) + instance.means()[a] * instance.means()[a];
  return m;
}

inline double ipw_diff_variance_exact(const PolicyVector& pi_e, const MabInstance& instance,
                                      const SignedPolicyDelta& delta, double horizon) {
  detail::require_same_size(instance.num_arms(), pi_e.size(), "ipw_diff_variance_exact pi_e");
  detail::require_same_size(instance.num_arms(), delta.size(), "ipw_diff_variance_exact delta");
  return ipw_variance_general(pi_e.weights(), delta.deltas(), second_moments(instance),
                              policy_value(instance, delta), horizon);
}

// pi_e*(a) = |pi_Delta(a)| / sum |pi_Delta|.
inline PolicyVector lemma1_policy(const SignedPolicyDelta& delta) {
  const Vec mag = delta.deltas().cwiseAbs();
  if (!(mag.sum() > 0.0)) throw InvalidArgument("lemma1_policy: pi_Delta is identically zero");
  return PolicyVector(mag / mag.sum());
}

// Closed form of the variance at pi_e*.
inline double lemma1_variance(const SignedPolicyDelta& delta, const MabInstance& instance, double horizon) {
  detail::require_same_size(instance.num_arms(), delta.size(), "lemma1_variance");
  if (!(horizon > 0.0)) throw InvalidArgument("lemma1_variance: T must be positive");
  const Vec mag = delta.deltas().cwiseAbs();
  const double l1 = mag.sum();
  if (!(l1 > 0.0)) throw InvalidArgument("lemma1_variance: pi_Delta is identically zero");
  const double dv = policy_value(instance, delta);
  return (l1 * mag.dot(second_moments(instance)) - dv * dv) / horizon;
}

inline double dr_asymptotic_variance(const PolicyVector& pi_e, const MabInstance& instance,
                                     const PolicyVector& target, double horizon) {
  detail::require_same_size(instance.num_arms(), pi_e.size(), "dr_asymptotic_variance pi_e");
  detail::require_same_size(instance.num_arms(), target.size(), "dr_asymptotic_variance target");
  if (!(horizon > 0.0)) throw InvalidArgument("dr_asymptotic_variance: T must be positive");
  const double v1 = policy_value(instance, target);
  double s = 0.0;
  for (std::size_t a = 0; a < instance.num_arms(); ++a) {
    const auto i = static_cast<Eigen::Index>(a);
    const double centered = instance.means()[i] - v1;
    const double w2 = target[a] * target[a];
    s += detail::ratio_or_zero(w2 * (instance.reward_variance(a) + centered * centered), pi_e[a], a);
  }
  return s / horizon;
}

// Instance and alternative policy b' from the no-dominance construction: r = 0,
// sigma = 0 on arm a1 and 1 on arm a2, and b' moves half of pi_e(a1) onto a2.
struct Counterexample {
  MabInstance instance;
  PolicyVector alternative;
};

inline Counterexample counterexample(const PolicyVector& pi_e, std::size_t a1, std::size_t a2) {
  const std::size_t k = pi_e.size();
  if (a1 >= k || a2 >= k || a1 == a2) throw InvalidArgument("counterexample: need two distinct arms");
  if (!(pi_e[a1] > 0.0 && pi_e[a2] > 0.0))
    throw SupportError("counterexample: pi_e must be positive on both arms", pi_e[a1] > 0.0 ? a2 : a1);
  Vec sds = Vec::Zero(static_cast<Eigen::Index>(k));
  sds[static_cast<Eigen::Index>(a2)] = 1.0;
  Vec b = pi_e.weights();
  b[static_cast<Eigen::Index>(a1)] = 0.5 * pi_e[a1];
  b[static_cast<Eigen::Index>(a2)] = 0.5 * pi_e[a1] + pi_e[a2];
  return Counterexample{MabInstance(Vec::Zero(static_cast<Eigen::Index>(k)), sds, 1.0), PolicyVector(b)};
}

// ---------------------------------------------------------------------------
// Direct method

// sum_a target(a) * (sample mean on arm a). The plug-in sd uses the equivalent
// IPW form with empirical propensities n_a / n.
inline EstimateReport dm_mab_value(const BanditDataset& ds, const Target& target) {
  if (target.contextual()) throw InvalidArgument("dm_mab_value: contextual targets are not supported");
  const std::size_t k = target.num_arms();
  std::vector<double> sums(k, 0.0);
  std::vector<std::size_t> counts(k, 0);
  for (const auto& r : ds.records) {
    if (r.action >= k) throw DimensionError("dm_mab_value: action index", k, r.action);
    sums[r.action] += r.reward;
    ++counts[r.action];
  }
  const Vec& w = target.rows().front();
  double value = 0.0;
  for (std::size_t a = 0; a < k; ++a) {
    const double wa = w[static_cast<Eigen::Index>(a)];
    if (wa == 0.0) continue;
    if (counts[a] == 0) throw SupportError("dm_mab_value: target arm has no observations", a);
    value += wa * sums[a] / static_cast<double>(counts[a]);
  }
  std::vector<double> terms;
  terms.reserve(ds.records.size());
  const double n = static_cast<double>(ds.records.size());
  for (const auto& r : ds.records) {
    const double wa = w[static_cast<Eigen::Index>(r.action)];
    terms.push_back(wa == 0.0 ? 0.0 : wa * n / static_cast<double>(counts[r.action]) * r.reward);
  }
  EstimateReport rep = detail::summarize_terms(terms);
  rep.value = value;
  return rep;
}

struct LeastSquaresFit {
  Vec theta;
  Mat gram;             // sum x x^T (without ridge)
  Vec moment;           // sum x R
  std::size_t n = 0;
  double residual_ss = 0.0;
};

// Pools every dataset's (x_{A_t}, R_t) pairs and solves (G + ridge I)^+ b.
inline LeastSquaresFit fit_least_squares_full(const std::vector<BanditDataset>& datasets,
                                              const Mat& arm_features, double ridge) {
  if (ridge < 0.0) throw InvalidArgument("fit_least_squares: ridge must be non-negative");
  const auto d = arm_features.cols();
  const auto k = static_cast<std::size_t>(arm_features.rows());
  // Accumulate by arm counts first: O(K d^2) rather than O(n d^2).
  Vec count = Vec::Zero(arm_features.rows());
  Vec reward_sum = Vec::Zero(arm_features.rows());
  for (const auto& ds : datasets)
    for (const auto& r : ds.records) {
      if (r.action >= k) throw DimensionError("fit_least_squares: action index", k, r.action);
      count[static_cast<Eigen::Index>(r.action)] += 1.0;
      reward_sum[static_cast<Eigen::Index>(r.action)] += r.reward;
    }
  LeastSquaresFit fit;
  fit.gram = arm_features.transpose() * count.asDiagonal() * arm_features;
  fit.moment = arm_features.transpose() * reward_sum;
  fit.n = static_cast<std::size_t>(count.sum());
  Mat reg = fit.gram;
  reg.diagonal().array() += ridge;
  fit.theta = pseudo_inverse(reg) * fit.moment;
  if (fit.theta.size() != d) fit.theta = Vec::Zero(d);
  for (const auto& ds : datasets)
    for (const auto& r : ds.records) {
      const double e = r.reward - arm_features.row(static_cast<Eigen::Index>(r.action)).dot(fit.theta);
      fit.residual_ss += e * e;
    }
  return fit;
}

inline Vec fit_least_squares(const std::vector<BanditDataset>& datasets, const Mat& arm_features,
                             double ridge) {
  return fit_least_squares_full(datasets, arm_features, ridge).theta;
}

inline double dm_lb_value(const Vec& theta_hat, const Target& target, const Mat& arm_features) {
  if (target.contextual()) throw InvalidArgument("dm_lb_value: contextual targets are not supported");
  detail::require_same_size(static_cast<std::size_t>(arm_features.cols()),
                            static_cast<std::size_t>(theta_hat.size()), "dm_lb_value theta");
  return mean_feature(target.rows().front(), arm_features).dot(theta_hat);
}

// Pooled DM estimate of a (possibly signed) target with a plug-in sd scaled
// so that sd / sqrt(n) is the standard error sigma_hat * sqrt(phi^T G^+ phi).
inline EstimateReport dm_lb_report(const std::vector<BanditDataset>& datasets, const Target& target,
                                   const Mat& arm_features) {
  const LeastSquaresFit fit = fit_least_squares_full(datasets, arm_features, 0.0);
  EstimateReport rep;
  rep.n = fit.n;
  const Vec phi = mean_feature(target.rows().front(), arm_features);
  rep.value = phi.dot(fit.theta);
  const auto d = static_cast<std::size_t>(arm_features.cols());
  if (fit.n > d) {
    const double sigma2 = fit.residual_ss / static_cast<double>(fit.n - d);
    const double se2 = sigma2 * phi.dot(pseudo_inverse(fit.gram) * phi);
    rep.plug_in_sd = std::sqrt(std::max(0.0, se2 * static_cast<double>(fit.n)));
  }
  return rep;
}

// G(pi) = sum_x pi(x) x x^T.
inline Mat policy_gram(const Vec& weights, const Mat& arm_features) {
  detail::require_same_size(static_cast<std::size_t>(arm_features.rows()),
                            static_cast<std::size_t>(weights.size()), "policy_gram");
  return arm_features.transpose() * weights.asDiagonal() * arm_features;
}

// |D|^{-1} phi_pi^T G(pi)^{-1} sum_i R_i x_i, with G built from the dataset's
// logging policy.
inline EstimateReport pi_value(const BanditDataset& ds, const Target& target, const Mat& arm_features) {
  const auto* logger = std::get_if<PolicyVector>(&ds.logging_policy);
  if (!logger) throw InvalidArgument("pi_value: needs a non-contextual logging policy");
  if (target.contextual()) throw InvalidArgument("pi_value: contextual targets are not supported");
  const Mat g = policy_gram(logger->weights(), arm_features);
  const Vec phi = mean_feature(target.rows().front(), arm_features);
  Vec u;
  bool singular = false;
  try {
    u = SymFactor(g).solve(phi);
  } catch (const SingularMatrixError&) {
    u = pseudo_inverse(g) * phi;
    singular = true;
  }
  std::vector<double> terms;
  terms.reserve(ds.records.size());
  for (const auto& r : ds.records)
    terms.push_back(r.reward * arm_features.row(static_cast<Eigen::Index>(r.action)).dot(u));
  EstimateReport rep = detail::summarize_terms(terms);
  rep.singular = singular;
  return rep;
}

// ---------------------------------------------------------------------------
// Testing

inline TestOutcome z_test(double diff_estimate, double plug_in_sd, double horizon, double alpha) {
  if (!(plug_in_sd > 0.0)) throw InvalidArgument("z_test: plug-in sd must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("z_test: alpha must lie in (0,1)");
  TestOutcome out;
  out.alpha = alpha;
  out.z_stat = std::sqrt(horizon) * diff_estimate / plug_in_sd;
  out.reject = out.z_stat >= normal_quantile(1.0 - alpha);
  return out;
}

inline double asymptotic_power(double delta, double sigma_pe, double alpha) {
  if (!(sigma_pe > 0.0)) throw InvalidArgument("asymptotic_power: sigma must be positive");
  return 1.0 - normal_cdf(normal_quantile(1.0 - alpha) - delta / sigma_pe);
}

}  // namespace sepec
