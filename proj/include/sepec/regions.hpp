#pragma once

// Confidence and credible regions built from logged data, and the linear
// optimization oracles over them used as cut generators.

#include <cmath>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "sepec/core.hpp"
#include "sepec/error.hpp"
#include "sepec/linalg.hpp"
#include "sepec/stats.hpp"

namespace sepec {

// Per-coordinate interval [lower, upper] inside [0,1]. For contextual
// problems coordinates are stacked context-major (x * K + a).
class BoxRegion {
 public:
  BoxRegion(Vec lower, Vec upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
    detail::require_same_size(static_cast<std::size_t>(lower_.size()), static_cast<std::size_t>(upper_.size()),
                              "BoxRegion");
    if (lower_.size() < 1) throw InvalidArgument("BoxRegion: empty");
    for (Eigen::Index a = 0; a < lower_.size(); ++a) {
      if (!(lower_[a] >= 0.0 && upper_[a] <= 1.0 && lower_[a] <= upper_[a]))
        throw InvalidArgument("BoxRegion: need 0 <= lower <= upper <= 1 at coordinate " + std::to_string(a));
    }
  }

  static BoxRegion unit_cube(std::size_t k) {
    return BoxRegion(Vec::Zero(static_cast<Eigen::Index>(k)), Vec::Ones(static_cast<Eigen::Index>(k)));
  }

  // Clips [center - half, center + half] to [0,1]; an interval entirely
  // outside [0,1] collapses onto the nearest endpoint.
  static BoxRegion clipped(const Vec& center, const Vec& half_width) {
    Vec lo = (center - half_width).cwiseMax(0.0).cwiseMin(1.0);
    Vec hi = (center + half_width).cwiseMin(1.0).cwiseMax(0.0);
    return BoxRegion(lo, hi.cwiseMax(lo));
  }

  const Vec& lower() const noexcept { return lower_; }
  const Vec& upper() const noexcept { return upper_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(lower_.size()); }

  bool contains(const Vec& r, double tol = 0.0) const {
    return r.size() == lower_.size() && (r.array() >= lower_.array() - tol).all() &&
           (r.array() <= upper_.array() + tol).all();
  }

 private:
  Vec lower_;
  Vec upper_;
};

// {theta : (theta - center)^T shape^{-1} (theta - center) <= radius}; the
// radius is on the squared scale.
class EllipsoidRegion {
 public:
  EllipsoidRegion(Vec center, Mat shape, double radius)
      : center_(std::move(center)), shape_(std::move(shape)), radius_(radius) {
    detail::require_same_size(static_cast<std::size_t>(center_.size()), static_cast<std::size_t>(shape_.rows()),
                              "EllipsoidRegion shape rows");
    detail::require_same_size(static_cast<std::size_t>(shape_.rows()), static_cast<std::size_t>(shape_.cols()),
                              "EllipsoidRegion shape cols");
    if (!is_symmetric(shape_)) throw InvalidArgument("EllipsoidRegion: shape must be symmetric");
    if (!(min_eigenvalue(shape_) > 0.0)) throw InvalidArgument("EllipsoidRegion: shape must be positive definite");
    if (!(radius_ > 0.0)) throw InvalidArgument("EllipsoidRegion: radius must be positive");
    shape_ = 0.5 * (shape_ + shape_.transpose());
  }

  const Vec& center() const noexcept { return center_; }
  const Mat& shape() const noexcept { return shape_; }
  double radius() const noexcept { return radius_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(center_.size()); }

  // Squared Mahalanobis distance of theta from the center.
  double distance2(const Vec& theta) const { return SymFactor(shape_).inv_quad(theta - center_); }
  bool contains(const Vec& theta, double tol = 0.0) const { return distance2(theta) <= radius_ * (1.0 + tol); }

 private:
  Vec center_;
  Mat shape_;
  double radius_;
};

// Gaussian beliefs over the instance. MAB: independent per-arm normals plus
// the (known) noise sds. LB: a normal over theta.
struct InstancePosterior {
  Vec means;
  Vec sds;
  Vec noise_sds;
  std::optional<Mat> covariance;

  Vec expected_noise_var() const { return noise_sds.array().square(); }
  Vec expected_reward_sq() const { return means.array().square() + sds.array().square(); }
};

namespace detail {

struct ArmStats {
  std::vector<std::size_t> counts;
  std::vector<double> sums;
};

// Per-coordinate counts and reward sums. With contexts > 0 records are keyed by
// context * K + action.
inline ArmStats arm_stats(const BanditDataset& ds, std::size_t coords, std::size_t arms) {
  ArmStats s{std::vector<std::size_t>(coords, 0), std::vector<double>(coords, 0.0)};
  for (const auto& r : ds.records) {
    const std::size_t idx = r.context.value_or(0) * arms + r.action;
    if (r.action >= arms || idx >= coords) throw DimensionError("arm statistics: coordinate", coords, idx);
    ++s.counts[idx];
    s.sums[idx] += r.reward;
  }
  return s;
}

inline Vec split_delta(double delta, std::size_t coords, const std::optional<Vec>& split) {
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("region: delta must lie in (0,1)");
  if (!split) return Vec::Constant(static_cast<Eigen::Index>(coords), delta / static_cast<double>(coords));
  require_same_size(coords, static_cast<std::size_t>(split->size()), "region: delta split");
  if ((split->array() <= 0.0).any()) throw InvalidArgument("region: delta split weights must be positive");
  return delta * *split / split->sum();
}

}  // namespace detail

// Sample mean +- sigma_a sqrt((2/n_a) log(2/delta_a)), delta_a = delta/K by default.
inline BoxRegion hoeffding_box(const BanditDataset& ds, const Vec& noise_sds, double delta,
                               const std::optional<Vec>& delta_split = std::nullopt) {
  const auto k = static_cast<std::size_t>(noise_sds.size());
  const auto stats = detail::arm_stats(ds, k, k);
  const Vec deltas = detail::split_delta(delta, k, delta_split);
  Vec center(noise_sds.size()), half(noise_sds.size());
  for (std::size_t a = 0; a < k; ++a) {
    if (stats.counts[a] == 0) throw SupportError("hoeffding_box: arm has no observations", a);
    const auto i = static_cast<Eigen::Index>(a);
    const double n = static_cast<double>(stats.counts[a]);
    center[i] = stats.sums[a] / n;
    half[i] = noise_sds[i] * std::sqrt(2.0 / n * std::log(2.0 / deltas[i]));
  }
  return BoxRegion::clipped(center, half);
}

struct BoxWithPosterior {
  BoxRegion box;
  InstancePosterior posterior;
};

// Conjugate normal update per coordinate with known noise sd, then the
// credible box mean +- z_{1 - delta_a/2} sd clipped to [0,1]. Works for both
// MAB (contexts == 0) and stacked CMAB coordinates.
inline BoxWithPosterior bayes_box(const BanditDataset& ds, const Vec& prior_means, const Vec& prior_sds,
                                  const Vec& noise_sds, double delta, std::size_t arms,
                                  const std::optional<Vec>& delta_split = std::nullopt) {
  const auto coords = static_cast<std::size_t>(prior_means.size());
  detail::require_same_size(coords, static_cast<std::size_t>(prior_sds.size()), "bayes_box prior sds");
  detail::require_same_size(coords, static_cast<std::size_t>(noise_sds.size()), "bayes_box noise sds");
  if (arms == 0 || coords % arms != 0) throw InvalidArgument("bayes_box: coordinate count must be a multiple of K");
  const auto stats = detail::arm_stats(ds, coords, arms);
  const Vec deltas = detail::split_delta(delta, coords, delta_split);
  InstancePosterior post{Vec(prior_means.size()), Vec(prior_means.size()), noise_sds, std::nullopt};
  Vec half(prior_means.size());
  for (std::size_t a = 0; a < coords; ++a) {
    const auto i = static_cast<Eigen::Index>(a);
    if (!(prior_sds[i] > 0.0)) throw InvalidArgument("bayes_box: prior sd must be positive");
    const double n = static_cast<double>(stats.counts[a]);
    double precision = 1.0 / (prior_sds[i] * prior_sds[i]);
    double weighted = prior_means[i] * precision;
    if (n > 0.0) {
      if (!(noise_sds[i] > 0.0)) throw InvalidArgument("bayes_box: noise sd must be positive");
      const double noise_prec = 1.0 / (noise_sds[i] * noise_sds[i]);
      precision += n * noise_prec;
      weighted += stats.sums[a] * noise_prec;
    }
    const double var = 1.0 / precision;
    post.means[i] = var * weighted;
    post.sds[i] = std::sqrt(var);
    half[i] = normal_quantile(1.0 - 0.5 * deltas[i]) * post.sds[i];
  }
  return BoxWithPosterior{BoxRegion::clipped(post.means, half), std::move(post)};
}

inline BoxWithPosterior bayes_mab_box(const BanditDataset& ds, const Vec& prior_means, const Vec& prior_sds,
                                      const Vec& noise_sds, double delta,
                                      const std::optional<Vec>& delta_split = std::nullopt) {
  return bayes_box(ds, prior_means, prior_sds, noise_sds, delta, static_cast<std::size_t>(prior_means.size()),
                   delta_split);
}

// Contextual variant: coordinates stacked context-major, delta split over K * |X|.
inline BoxWithPosterior bayes_cmab_box(const BanditDataset& ds, const Vec& prior_means, const Vec& prior_sds,
                                       const Vec& noise_sds, double delta, std::size_t arms) {
  return bayes_box(ds, prior_means, prior_sds, noise_sds, delta, arms);
}

// Ridge regression region. The returned shape is V^{-1}, so membership reads
// (theta - theta_hat)^T V (theta - theta_hat) <= S_delta.
inline EllipsoidRegion lb_frequentist_ellipsoid(const BanditDataset& ds, const Mat& arm_features, double lambda,
                                                double s_delta) {
  const auto d = arm_features.cols();
  Mat v = Mat::Identity(d, d) * lambda;
  Vec b = Vec::Zero(d);
  for (const auto& r : ds.records) {
    const Vec x = arm_features.row(static_cast<Eigen::Index>(r.action)).transpose();
    v.noalias() += x * x.transpose();
    b += r.reward * x;
  }
  SymFactor f(v);
  if (f.jittered()) throw SingularMatrixError("lb_frequentist_ellipsoid: design matrix is singular");
  return EllipsoidRegion(f.solve(b), f.inverse(), s_delta);
}

// Squared radius (sigma sqrt(d log((1 + n/lambda)/delta)) + sqrt(lambda) theta_cap)^2
// for arm features of norm at most one.
inline double abbasi_yadkori_radius(double sigma, std::size_t d, std::size_t n, double lambda, double delta,
                                    double theta_cap) {
  if (!(lambda > 0.0 && delta > 0.0 && delta < 1.0)) throw InvalidArgument("abbasi_yadkori_radius: bad arguments");
  const double r = sigma * std::sqrt(static_cast<double>(d) *
                                     std::log((1.0 + static_cast<double>(n) / lambda) / delta)) +
                   std::sqrt(lambda) * theta_cap;
  return r * r;
}

struct EllipsoidWithPosterior {
  EllipsoidRegion region;
  InstancePosterior posterior;
};

// Gaussian prior on theta, known noise sd; radius chi^2_d(1 - delta).
inline EllipsoidWithPosterior lb_bayes_ellipsoid(const BanditDataset& ds, const Mat& arm_features,
                                                 const Vec& prior_mean, const Mat& prior_cov, double sigma,
                                                 double delta) {
  const auto d = arm_features.cols();
  detail::require_same_size(static_cast<std::size_t>(d), static_cast<std::size_t>(prior_mean.size()),
                            "lb_bayes_ellipsoid prior mean");
  if (!(sigma > 0.0)) throw InvalidArgument("lb_bayes_ellipsoid: noise sd must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("lb_bayes_ellipsoid: delta must lie in (0,1)");
  if (!is_symmetric(prior_cov) || !(min_eigenvalue(prior_cov) > 0.0))
    throw InvalidArgument("lb_bayes_ellipsoid: prior covariance must be symmetric positive definite");
  const SymFactor prior_f(prior_cov);
  Mat precision = prior_f.inverse();
  Vec weighted = prior_f.solve(prior_mean);
  const double inv_var = 1.0 / (sigma * sigma);
  Vec count = Vec::Zero(arm_features.rows());
  Vec sums = Vec::Zero(arm_features.rows());
  for (const auto& r : ds.records) {
    count[static_cast<Eigen::Index>(r.action)] += 1.0;
    sums[static_cast<Eigen::Index>(r.action)] += r.reward;
  }
  precision += inv_var * arm_features.transpose() * count.asDiagonal() * arm_features;
  weighted += inv_var * arm_features.transpose() * sums;
  const SymFactor post_f(precision);
  Mat cov = post_f.inverse();
  cov = 0.5 * (cov + cov.transpose());
  Vec mean = post_f.solve(weighted);
  InstancePosterior post{mean, cov.diagonal().cwiseSqrt(), Vec::Constant(1, sigma), cov};
  return EllipsoidWithPosterior{EllipsoidRegion(mean, cov, chi2_quantile(1.0 - delta, static_cast<double>(d))),
                                std::move(post)};
}

// ---------------------------------------------------------------------------
// Linear oracles

struct LinearOracleResult {
  Vec point;
  double value = 0.0;
};

// argmin over the box of r^T d; ties (d_a == 0) take the lower end.
inline LinearOracleResult min_linear_over_box(const Vec& d, const BoxRegion& box) {
  detail::require_same_size(box.size(), static_cast<std::size_t>(d.size()), "min_linear_over_box");
  Vec r(d.size());
  for (Eigen::Index a = 0; a < d.size(); ++a) r[a] = d[a] < 0.0 ? box.upper()[a] : box.lower()[a];
  return {r, r.dot(d)};
}

// argmax over the ellipsoid of v^T theta.
inline LinearOracleResult max_linear_over_ellipsoid(const Vec& v, const EllipsoidRegion& region) {
  detail::require_same_size(region.dim(), static_cast<std::size_t>(v.size()), "max_linear_over_ellipsoid");
  const Vec sv = region.shape() * v;
  const double q = v.dot(sv);
  if (!(q > 0.0)) return {region.center(), v.dot(region.center())};
  Vec theta = region.center() + sv * std::sqrt(region.radius() / q);
  return {theta, v.dot(theta)};
}

}  // namespace sepec
