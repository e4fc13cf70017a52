#pragma once

// Domain types for policies, bandit instances and logged datasets, plus
// environment sampling and exact policy values.

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "sepec/error.hpp"
#include "sepec/linalg.hpp"
#include "sepec/random.hpp"

namespace sepec {

inline constexpr double kSimplexTol = 1e-9;

namespace detail {

inline void require_probability_vector(const Vec& w, const char* what) {
  if (w.size() < 1) throw InvalidArgument(std::string(what) + ": needs at least one entry");
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (!std::isfinite(w[i]) || w[i] < 0.0)
      throw InvalidArgument(std::string(what) + ": entry " + std::to_string(i) +
                            " is negative or non-finite");
  }
  if (std::abs(w.sum() - 1.0) > kSimplexTol)
    throw InvalidArgument(std::string(what) + ": entries sum to " + std::to_string(w.sum()));
}

inline void require_same_size(std::size_t expected, std::size_t got, const char* what) {
  if (expected != got) throw DimensionError(what, expected, got);
}

}  // namespace detail

// Probability distribution over K arms.
class PolicyVector {
 public:
  explicit PolicyVector(Vec weights) : weights_(std::move(weights)) {
    detail::require_probability_vector(weights_, "PolicyVector");
  }

  static PolicyVector uniform(std::size_t k) {
    if (k == 0) throw InvalidArgument("PolicyVector::uniform: K must be positive");
    return PolicyVector(Vec::Constant(static_cast<Eigen::Index>(k), 1.0 / static_cast<double>(k)));
  }

  static PolicyVector point_mass(std::size_t k, std::size_t arm) {
    if (arm >= k) throw InvalidArgument("PolicyVector::point_mass: arm out of range");
    Vec w = Vec::Zero(static_cast<Eigen::Index>(k));
    w[static_cast<Eigen::Index>(arm)] = 1.0;
    return PolicyVector(std::move(w));
  }

  // Normalizes a non-negative weight vector with positive total.
  static PolicyVector normalized(const Vec& unnormalized) {
    const double total = unnormalized.sum();
    if (!(total > 0.0) || (unnormalized.array() < 0.0).any())
      throw InvalidArgument("PolicyVector::normalized: weights must be non-negative with positive sum");
    return PolicyVector(unnormalized / total);
  }

  const Vec& weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(weights_.size()); }
  double operator[](std::size_t a) const { return weights_[static_cast<Eigen::Index>(a)]; }

 private:
  Vec weights_;
};

// pi_1 - pi_0 for two policies over the same arms.
class SignedPolicyDelta {
 public:
  explicit SignedPolicyDelta(Vec deltas) : deltas_(std::move(deltas)) {
    if (deltas_.size() < 1) throw InvalidArgument("SignedPolicyDelta: empty");
    if (!deltas_.allFinite()) throw InvalidArgument("SignedPolicyDelta: non-finite entry");
    if (std::abs(deltas_.sum()) > kSimplexTol)
      throw InvalidArgument("SignedPolicyDelta: entries must sum to zero");
    if (deltas_.cwiseAbs().maxCoeff() > 1.0 + kSimplexTol)
      throw InvalidArgument("SignedPolicyDelta: entries must lie in [-1, 1]");
  }

  static SignedPolicyDelta between(const PolicyVector& target, const PolicyVector& baseline) {
    detail::require_same_size(baseline.size(), target.size(), "SignedPolicyDelta::between");
    return SignedPolicyDelta(target.weights() - baseline.weights());
  }

  const Vec& deltas() const noexcept { return deltas_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(deltas_.size()); }
  bool is_zero() const { return deltas_.cwiseAbs().maxCoeff() == 0.0; }

 private:
  Vec deltas_;
};

// One PolicyVector per context id (dense ids 0..|X|-1) plus the context law p(x).
class ContextualPolicy {
 public:
  ContextualPolicy(std::vector<PolicyVector> per_context, Vec context_probs)
      : per_context_(std::move(per_context)), context_probs_(std::move(context_probs)) {
    detail::require_probability_vector(context_probs_, "ContextualPolicy.context_probs");
    detail::require_same_size(static_cast<std::size_t>(context_probs_.size()), per_context_.size(),
                              "ContextualPolicy: contexts");
    for (const auto& p : per_context_)
      detail::require_same_size(per_context_.front().size(), p.size(), "ContextualPolicy: arms");
  }

  // Rebuilds from a context-major stacked vector of length |X| * K.
  static ContextualPolicy from_stacked(const Vec& stacked, std::size_t arms, const Vec& probs) {
    const auto contexts = static_cast<std::size_t>(probs.size());
    detail::require_same_size(contexts * arms, static_cast<std::size_t>(stacked.size()),
                              "ContextualPolicy::from_stacked");
    std::vector<PolicyVector> rows;
    rows.reserve(contexts);
    for (std::size_t x = 0; x < contexts; ++x) {
      Vec w = stacked.segment(static_cast<Eigen::Index>(x * arms), static_cast<Eigen::Index>(arms));
      w = w.cwiseMax(0.0);
      rows.emplace_back(w / w.sum());
    }
    return ContextualPolicy(std::move(rows), probs);
  }

  std::size_t num_contexts() const noexcept { return per_context_.size(); }
  std::size_t num_arms() const noexcept { return per_context_.front().size(); }
  const PolicyVector& at(std::size_t x) const { return per_context_.at(x); }
  const std::vector<PolicyVector>& per_context() const noexcept { return per_context_; }
  const Vec& context_probs() const noexcept { return context_probs_; }

  Vec stacked() const {
    Vec out(static_cast<Eigen::Index>(num_contexts() * num_arms()));
    for (std::size_t x = 0; x < num_contexts(); ++x)
      out.segment(static_cast<Eigen::Index>(x * num_arms()), static_cast<Eigen::Index>(num_arms())) =
          per_context_[x].weights();
    return out;
  }

 private:
  std::vector<PolicyVector> per_context_;
  Vec context_probs_;
};

enum class NoiseKind { Gaussian, Bernoulli };

class MabInstance {
 public:
  MabInstance(Vec means, Vec noise_sds, double noise_cap, NoiseKind noise_kind = NoiseKind::Gaussian)
      : means_(std::move(means)),
        noise_sds_(std::move(noise_sds)),
        noise_cap_(noise_cap),
        noise_kind_(noise_kind) {
    if (means_.size() < 1) throw InvalidArgument("MabInstance: needs at least one arm");
    detail::require_same_size(static_cast<std::size_t>(means_.size()),
                              static_cast<std::size_t>(noise_sds_.size()), "MabInstance.noise_sds");
    for (Eigen::Index a = 0; a < means_.size(); ++a) {
      if (!(means_[a] >= 0.0 && means_[a] <= 1.0))
        throw InvalidArgument("MabInstance: mean reward outside [0,1] at arm " + std::to_string(a));
      if (!(noise_sds_[a] >= 0.0 && noise_sds_[a] <= noise_cap_ + 1e-12))
        throw InvalidArgument("MabInstance: noise sd outside [0, noise_cap] at arm " +
                              std::to_string(a));
    }
  }

  // Homoscedastic Gaussian instance with sigma_a == sigma.
  static MabInstance gaussian(Vec means, double sigma) {
    const auto k = means.size();
    return MabInstance(std::move(means), Vec::Constant(k, sigma), sigma, NoiseKind::Gaussian);
  }

  const Vec& means() const noexcept { return means_; }
  const Vec& noise_sds() const noexcept { return noise_sds_; }
  double noise_cap() const noexcept { return noise_cap_; }
  NoiseKind noise_kind() const noexcept { return noise_kind_; }
  std::size_t num_arms() const noexcept { return static_cast<std::size_t>(means_.size()); }

  // Per-arm reward variance implied by the noise model.
  double reward_variance(std::size_t a) const {
    const auto i = static_cast<Eigen::Index>(a);
    if (noise_kind_ == NoiseKind::Bernoulli) return means_[i] * (1.0 - means_[i]);
    return noise_sds_[i] * noise_sds_[i];
  }

  double sample_reward(std::size_t a, Rng& rng) const {
    const auto i = static_cast<Eigen::Index>(a);
    if (noise_kind_ == NoiseKind::Bernoulli) return uniform01(rng) < means_[i] ? 1.0 : 0.0;
    if (noise_sds_[i] == 0.0) return means_[i];
    return means_[i] + noise_sds_[i] * standard_normal(rng);
  }

 private:
  Vec means_;
  Vec noise_sds_;
  double noise_cap_;
  NoiseKind noise_kind_;
};

class CmabInstance {
 public:
  CmabInstance(std::vector<MabInstance> per_context, Vec context_probs)
      : per_context_(std::move(per_context)), context_probs_(std::move(context_probs)) {
    detail::require_probability_vector(context_probs_, "CmabInstance.context_probs");
    detail::require_same_size(static_cast<std::size_t>(context_probs_.size()), per_context_.size(),
                              "CmabInstance: contexts");
    for (const auto& m : per_context_)
      detail::require_same_size(per_context_.front().num_arms(), m.num_arms(), "CmabInstance: arms");
  }

  std::size_t num_contexts() const noexcept { return per_context_.size(); }
  std::size_t num_arms() const noexcept { return per_context_.front().num_arms(); }
  const MabInstance& at(std::size_t x) const { return per_context_.at(x); }
  const std::vector<MabInstance>& per_context() const noexcept { return per_context_; }
  const Vec& context_probs() const noexcept { return context_probs_; }

  // Context-major stacked mean rewards r(a|x).
  Vec stacked_means() const {
    const auto k = static_cast<Eigen::Index>(num_arms());
    Vec out(static_cast<Eigen::Index>(num_contexts()) * k);
    for (std::size_t x = 0; x < num_contexts(); ++x)
      out.segment(static_cast<Eigen::Index>(x) * k, k) = per_context_[x].means();
    return out;
  }

 private:
  std::vector<MabInstance> per_context_;
  Vec context_probs_;
};

// Linear bandit: arm a has mean reward x_a^T theta*, homoscedastic noise.
class LinearInstance {
 public:
  LinearInstance(Vec theta_star, Mat arm_features, double noise_sd)
      : theta_star_(std::move(theta_star)), arm_features_(std::move(arm_features)), noise_sd_(noise_sd) {
    if (theta_star_.size() < 1) throw InvalidArgument("LinearInstance: d must be at least 1");
    detail::require_same_size(static_cast<std::size_t>(theta_star_.size()),
                              static_cast<std::size_t>(arm_features_.cols()),
                              "LinearInstance.arm_features columns");
    if (arm_features_.rows() < 1) throw InvalidArgument("LinearInstance: needs at least one arm");
    if (!arm_features_.allFinite() || !theta_star_.allFinite())
      throw InvalidArgument("LinearInstance: non-finite features or parameter");
    if (!(noise_sd_ >= 0.0)) throw InvalidArgument("LinearInstance: noise_sd must be non-negative");
  }

  const Vec& theta_star() const noexcept { return theta_star_; }
  const Mat& arm_features() const noexcept { return arm_features_; }
  double noise_sd() const noexcept { return noise_sd_; }
  std::size_t num_arms() const noexcept { return static_cast<std::size_t>(arm_features_.rows()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(theta_star_.size()); }
  Vec arm_means() const { return arm_features_ * theta_star_; }

  double sample_reward(std::size_t a, Rng& rng) const {
    const double mean = arm_features_.row(static_cast<Eigen::Index>(a)).dot(theta_star_);
    if (noise_sd_ == 0.0) return mean;
    return mean + noise_sd_ * standard_normal(rng);
  }

 private:
  Vec theta_star_;
  Mat arm_features_;
  double noise_sd_;
};

struct Record {
  std::optional<std::size_t> context;
  std::size_t action = 0;
  double reward = 0.0;
};

using LoggingPolicy = std::variant<PolicyVector, ContextualPolicy>;

// Logged (context?, action, reward) tuples with the policy that produced them.
struct BanditDataset {
  std::vector<Record> records;
  LoggingPolicy logging_policy;
  std::size_t horizon = 0;

  BanditDataset(std::vector<Record> recs, LoggingPolicy logger, std::size_t t)
      : records(std::move(recs)), logging_policy(std::move(logger)), horizon(t) {}

  explicit BanditDataset(LoggingPolicy logger) : logging_policy(std::move(logger)) {}

  std::size_t num_arms() const {
    return std::visit(
        [](const auto& p) -> std::size_t {
          if constexpr (std::is_same_v<std::decay_t<decltype(p)>, PolicyVector>)
            return p.size();
          else
            return p.num_arms();
        },
        logging_policy);
  }

  bool contextual() const { return std::holds_alternative<ContextualPolicy>(logging_policy); }

  double logging_prob(const Record& r) const {
    if (const auto* p = std::get_if<PolicyVector>(&logging_policy)) {
      if (r.action >= p->size()) throw DimensionError("BanditDataset: action index", p->size(), r.action);
      return (*p)[r.action];
    }
    const auto& cp = std::get<ContextualPolicy>(logging_policy);
    if (!r.context) throw InvalidArgument("BanditDataset: contextual logger needs record contexts");
    if (*r.context >= cp.num_contexts())
      throw DimensionError("BanditDataset: context id", cp.num_contexts(), *r.context);
    if (r.action >= cp.num_arms()) throw DimensionError("BanditDataset: action index", cp.num_arms(), r.action);
    return cp.at(*r.context)[r.action];
  }

  // Every record's action must have positive logging probability.
  void validate() const {
    for (const auto& r : records) {
      if (!(logging_prob(r) > 0.0))
        throw SupportError("BanditDataset: record action has zero logging probability", r.action);
    }
  }
};

// ---------------------------------------------------------------------------
// Policy values

inline double policy_value(const MabInstance& instance, const PolicyVector& policy) {
  detail::require_same_size(instance.num_arms(), policy.size(), "policy_value");
  return policy.weights().dot(instance.means());
}

// V(pi_1) - V(pi_0) computed from the signed difference directly.
inline double policy_value(const MabInstance& instance, const SignedPolicyDelta& delta) {
  detail::require_same_size(instance.num_arms(), delta.size(), "policy_value");
  return delta.deltas().dot(instance.means());
}

inline double policy_value(const CmabInstance& instance, const ContextualPolicy& policy) {
  detail::require_same_size(instance.num_contexts(), policy.num_contexts(), "policy_value contexts");
  double v = 0.0;
  for (std::size_t x = 0; x < instance.num_contexts(); ++x)
    v += instance.context_probs()[static_cast<Eigen::Index>(x)] *
         policy_value(instance.at(x), policy.at(x));
  return v;
}

// Weighted row sum sum_a w(a) x_a; w may be a policy or a signed delta.
inline Vec mean_feature(const Vec& weights, const Mat& arm_features) {
  detail::require_same_size(static_cast<std::size_t>(arm_features.rows()),
                            static_cast<std::size_t>(weights.size()), "mean_feature");
  return arm_features.transpose() * weights;
}

inline Vec mean_feature(const PolicyVector& policy, const Mat& arm_features) {
  return mean_feature(policy.weights(), arm_features);
}

inline Vec mean_feature(const SignedPolicyDelta& delta, const Mat& arm_features) {
  return mean_feature(delta.deltas(), arm_features);
}

inline double linear_policy_value(const LinearInstance& instance, const PolicyVector& policy) {
  detail::require_same_size(instance.num_arms(), policy.size(), "linear_policy_value");
  return mean_feature(policy, instance.arm_features()).dot(instance.theta_star());
}

// ---------------------------------------------------------------------------
// Sampling

// T actions whose counts are one Multinomial(T, pi) draw (T i.i.d. categorical draws).
inline std::vector<std::size_t> sample_allocation(const PolicyVector& policy, std::size_t horizon, Rng& rng) {
  std::vector<std::size_t> actions;
  actions.reserve(horizon);
  if (horizon == 0) return actions;
  const CategoricalSampler sampler(policy.weights());
  for (std::size_t t = 0; t < horizon; ++t) actions.push_back(sampler(rng));
  return actions;
}

inline BanditDataset collect_dataset(const MabInstance& instance, const PolicyVector& policy,
                                     std::size_t horizon, Rng& rng) {
  detail::require_same_size(instance.num_arms(), policy.size(), "collect_dataset");
  std::vector<Record> records;
  records.reserve(horizon);
  for (std::size_t a : sample_allocation(policy, horizon, rng))
    records.push_back(Record{std::nullopt, a, instance.sample_reward(a, rng)});
  return BanditDataset(std::move(records), policy, horizon);
}

inline BanditDataset collect_dataset(const CmabInstance& instance, const ContextualPolicy& policy,
                                     std::size_t horizon, Rng& rng) {
  detail::require_same_size(instance.num_contexts(), policy.num_contexts(), "collect_dataset contexts");
  detail::require_same_size(instance.num_arms(), policy.num_arms(), "collect_dataset arms");
  const CategoricalSampler context_sampler(instance.context_probs());
  std::vector<CategoricalSampler> action_samplers;
  action_samplers.reserve(policy.num_contexts());
  for (const auto& p : policy.per_context()) action_samplers.emplace_back(p.weights());
  std::vector<Record> records;
  records.reserve(horizon);
  for (std::size_t t = 0; t < horizon; ++t) {
    const std::size_t x = context_sampler(rng);
    const std::size_t a = action_samplers[x](rng);
    records.push_back(Record{x, a, instance.at(x).sample_reward(a, rng)});
  }
  return BanditDataset(std::move(records), policy, horizon);
}

inline BanditDataset collect_dataset(const LinearInstance& instance, const PolicyVector& policy,
                                     std::size_t horizon, Rng& rng) {
  detail::require_same_size(instance.num_arms(), policy.size(), "collect_dataset");
  std::vector<Record> records;
  records.reserve(horizon);
  for (std::size_t a : sample_allocation(policy, horizon, rng))
    records.push_back(Record{std::nullopt, a, instance.sample_reward(a, rng)});
  return BanditDataset(std::move(records), policy, horizon);
}

}  // namespace sepec
