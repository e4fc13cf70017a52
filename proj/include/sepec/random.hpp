#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "sepec/error.hpp"
#include "sepec/linalg.hpp"

namespace sepec {

// All sampling takes an explicit generator; draws below only depend on the raw
// 64-bit output so results are identical across standard libraries.
using Rng = std::mt19937_64;

inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Marsaglia polar method; the second variate is discarded so no state is kept.
inline double standard_normal(Rng& rng) {
  for (;;) {
    const double u = 2.0 * uniform01(rng) - 1.0;
    const double v = 2.0 * uniform01(rng) - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

inline double standard_exponential(Rng& rng) {
  double u;
  do {
    u = uniform01(rng);
  } while (u <= 0.0);
  return -std::log(u);
}

// Flat Dirichlet(1,...,1) via normalized unit-rate exponentials.
inline Vec flat_dirichlet(std::size_t n, Rng& rng) {
  Vec out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = standard_exponential(rng);
  out /= out.sum();
  return out;
}

inline Vec uniform_on_sphere(std::size_t d, Rng& rng) {
  Vec v(d);
  double norm = 0.0;
  do {
    for (std::size_t i = 0; i < d; ++i) v[i] = standard_normal(rng);
    norm = v.norm();
  } while (norm == 0.0);
  return v / norm;
}

// Inverse-CDF sampler over a fixed discrete distribution.
class CategoricalSampler {
 public:
  explicit CategoricalSampler(const Vec& probs) : cumulative_(probs.size()) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < probs.size(); ++i) {
      if (!(probs[i] >= 0.0)) throw InvalidArgument("CategoricalSampler: negative probability");
      acc += probs[i];
      cumulative_[i] = acc;
    }
    if (!(acc > 0.0)) throw InvalidArgument("CategoricalSampler: zero total mass");
    total_ = acc;
  }

  std::size_t operator()(Rng& rng) const {
    const double u = uniform01(rng) * total_;
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    std::size_t idx = static_cast<std::size_t>(it - cumulative_.begin());
    // upper_bound lands on a slot with positive mass; only rounding at the top
    // end can overflow, in which case take the last positive-mass slot.
    if (idx >= cumulative_.size()) {
      idx = cumulative_.size() - 1;
      while (idx > 0 && cumulative_[idx] == cumulative_[idx - 1]) --idx;
    }
    return idx;
  }

 private:
  std::vector<double> cumulative_;
  double total_ = 0.0;
};

// Counter-based stream derivation: a run's generator is seeded from
// splitmix64(seed, run index, stream tag) so the order in which consumers
// draw never shifts another consumer's randomness.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t stream_tag(std::string_view name) {
  // FNV-1a
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t run, std::uint64_t tag) {
  return splitmix64(splitmix64(splitmix64(seed) ^ run) ^ tag);
}

inline Rng derive_rng(std::uint64_t seed, std::uint64_t run, std::uint64_t tag) {
  return Rng(derive_seed(seed, run, tag));
}

}  // namespace sepec
