#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "sepec/error.hpp"
#include "sepec/linalg.hpp"

namespace sepec::opt {

// Product of simplices {x : sum over each block = 1, x >= lower} intersected
// with extra half-spaces a^T x >= b. A single block covering every coordinate
// is the plain probability simplex.
class Polytope {
 public:
  struct Block {
    std::size_t offset;
    std::size_t size;
  };

  struct Cut {
    Vec a;
    double b;
  };

  explicit Polytope(std::size_t dim) : Polytope(dim, 1) {}

  // num_blocks equal consecutive blocks of dim / num_blocks coordinates.
  Polytope(std::size_t dim, std::size_t num_blocks) : dim_(dim), lower_(Vec::Zero(static_cast<Eigen::Index>(dim))) {
    if (dim == 0 || num_blocks == 0 || dim % num_blocks != 0)
      throw InvalidArgument("Polytope: dimension must split evenly into blocks");
    const std::size_t size = dim / num_blocks;
    for (std::size_t b = 0; b < num_blocks; ++b) blocks_.push_back({b * size, size});
  }

  std::size_t dim() const noexcept { return dim_; }
  const std::vector<Block>& blocks() const noexcept { return blocks_; }
  const Vec& lower() const noexcept { return lower_; }
  const std::vector<Cut>& cuts() const noexcept { return cuts_; }

  void set_lower(Vec lower) {
    if (static_cast<std::size_t>(lower.size()) != dim_) throw DimensionError("Polytope lower bounds", dim_, lower.size());
    if (!lower.allFinite() || (lower.array() < 0.0).any())
      throw InvalidArgument("Polytope: lower bounds must be finite and non-negative");
    lower_ = std::move(lower);
  }

  void add_cut(Vec a, double b) {
    if (static_cast<std::size_t>(a.size()) != dim_) throw DimensionError("Polytope cut", dim_, a.size());
    if (!a.allFinite() || !std::isfinite(b)) throw InvalidArgument("Polytope: cut coefficients must be finite");
    cuts_.push_back({std::move(a), b});
  }

  // Most negative constraint residual at x (0 when every constraint holds
  // with slack or equality).
  double residual(const Vec& x) const {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) worst = std::min(worst, x[i] - lower_[i]);
    for (const auto& blk : blocks_) {
      const double s = x.segment(static_cast<Eigen::Index>(blk.offset), static_cast<Eigen::Index>(blk.size)).sum();
      worst = std::min(worst, -std::abs(s - 1.0));
    }
    for (const auto& c : cuts_) worst = std::min(worst, c.a.dot(x) - c.b);
    return worst;
  }

  bool contains(const Vec& x, double tol = 1e-9) const {
    return static_cast<std::size_t>(x.size()) == dim_ && residual(x) >= -tol;
  }

 private:
  std::size_t dim_;
  std::vector<Block> blocks_;
  Vec lower_;
  std::vector<Cut> cuts_;
};

}  // namespace sepec::opt
