#pragma once

// Dense two-phase tableau simplex over a Polytope.
//
// Variables are shifted to y = x - lower >= 0. Each simplex block gives an
// equality row, each cut a^T x >= b gives a row with a surplus column, and
// every row starts on an artificial. Entering columns follow Dantzig's rule
// (lowest index on ties) and switch to Bland's rule for good after a run of
// degenerate pivots, so the method cannot cycle.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "sepec/error.hpp"
#include "sepec/linalg.hpp"
#include "sepec/opt/polytope.hpp"

namespace sepec::opt {

struct LpResult {
  Vec x;
  double value = 0.0;
};

class LinearProgram {
 public:
  static constexpr double kPivotTol = 1e-11;
  static constexpr int kDegenerateRunForBland = 50;

  explicit LinearProgram(const Polytope& poly) : poly_(poly) {
    const double lower_mass_excess = [&] {
      double worst = -1.0;
      for (const auto& blk : poly_.blocks())
        worst = std::max(worst, poly_.lower()
                                        .segment(static_cast<Eigen::Index>(blk.offset),
                                                 static_cast<Eigen::Index>(blk.size))
                                        .sum() -
                                    1.0);
      return worst;
    }();
    if (lower_mass_excess > 1e-12) throw InfeasibleError("lp: lower bounds exceed the simplex mass");
    if (!poly_.cuts().empty()) build_and_phase1();
  }

  std::size_t num_cuts() const noexcept { return poly_.cuts().size(); }
  std::size_t pivots() const noexcept { return pivots_; }

  // Some vertex of the polytope (the phase-1 basis, or the lower bounds
  // padded on the first coordinate of every block when there are no cuts).
  Vec feasible_point() const {
    if (poly_.cuts().empty()) return closed_form(Vec::Zero(static_cast<Eigen::Index>(poly_.dim())));
    return current_x();
  }

  // min c^T x. Reuses the previous optimal basis as the starting point.
  LpResult solve(const Vec& c) {
    if (static_cast<std::size_t>(c.size()) != poly_.dim()) throw DimensionError("lp cost", poly_.dim(), c.size());
    if (!c.allFinite()) throw InvalidArgument("lp: non-finite cost");
    Vec x;
    if (poly_.cuts().empty()) {
      x = closed_form(c);
    } else {
      phase2(c);
      x = current_x();
      if (poly_.residual(x) < -1e-9) {
        // Accumulated round-off: rebuild the tableau once and re-solve.
        build_and_phase1();
        phase2(c);
        x = current_x();
      }
    }
    return {x, c.dot(x)};
  }

 private:
  // Lower bounds everywhere, leftover block mass on the cheapest coordinate.
  Vec closed_form(const Vec& c) const {
    Vec x = poly_.lower();
    for (const auto& blk : poly_.blocks()) {
      const auto off = static_cast<Eigen::Index>(blk.offset);
      const auto n = static_cast<Eigen::Index>(blk.size);
      Eigen::Index best = 0;
      for (Eigen::Index i = 1; i < n; ++i)
        if (c[off + i] < c[off + best]) best = i;
      x[off + best] += std::max(0.0, 1.0 - x.segment(off, n).sum());
    }
    return x;
  }

  void build_and_phase1() {
    const auto& blocks = poly_.blocks();
    const auto& cuts = poly_.cuts();
    const std::size_t k = poly_.dim();
    rows_ = blocks.size() + cuts.size();
    n_struct_ = k + cuts.size();
    cols_ = n_struct_ + rows_;
    tab_ = Mat::Zero(static_cast<Eigen::Index>(rows_ + 1), static_cast<Eigen::Index>(cols_ + 1));
    const auto rhs = static_cast<Eigen::Index>(cols_);
    const Vec& l = poly_.lower();
    std::size_t r = 0;
    for (const auto& blk : blocks) {
      for (std::size_t j = 0; j < blk.size; ++j) tab_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(blk.offset + j)) = 1.0;
      tab_(static_cast<Eigen::Index>(r), rhs) =
          1.0 - l.segment(static_cast<Eigen::Index>(blk.offset), static_cast<Eigen::Index>(blk.size)).sum();
      ++r;
    }
    for (std::size_t c = 0; c < cuts.size(); ++c) {
      const auto ri = static_cast<Eigen::Index>(r);
      const double scale = std::max(1e-300, cuts[c].a.cwiseAbs().maxCoeff());
      tab_.row(ri).head(static_cast<Eigen::Index>(k)) = cuts[c].a.transpose() / scale;
      tab_(ri, static_cast<Eigen::Index>(k + c)) = -1.0;
      tab_(ri, rhs) = (cuts[c].b - cuts[c].a.dot(l)) / scale;
      ++r;
    }
    basis_.assign(rows_, 0);
    banned_.assign(cols_, false);
    row_alive_.assign(rows_, true);
    for (std::size_t i = 0; i < rows_; ++i) {
      const auto ri = static_cast<Eigen::Index>(i);
      if (tab_(ri, rhs) < 0.0) tab_.row(ri) *= -1.0;
      tab_(ri, static_cast<Eigen::Index>(n_struct_ + i)) = 1.0;
      basis_[i] = n_struct_ + i;
    }
    // Phase 1: minimize the sum of artificials.
    const auto obj = static_cast<Eigen::Index>(rows_);
    tab_.row(obj).setZero();
    for (std::size_t i = 0; i < rows_; ++i) tab_.row(obj) -= tab_.row(static_cast<Eigen::Index>(i));
    for (std::size_t i = 0; i < rows_; ++i) tab_(obj, static_cast<Eigen::Index>(n_struct_ + i)) = 0.0;
    run_simplex();
    const double infeas = -tab_(obj, rhs);
    if (infeas > 1e-9) throw InfeasibleError("lp: constraint set is empty (phase-1 residual " + std::to_string(infeas) + ")");
    // Drive remaining artificials out of the basis or retire their rows.
    for (std::size_t i = 0; i < rows_; ++i) {
      if (basis_[i] < n_struct_) continue;
      const auto ri = static_cast<Eigen::Index>(i);
      std::size_t enter = cols_;
      for (std::size_t j = 0; j < n_struct_; ++j)
        if (std::abs(tab_(ri, static_cast<Eigen::Index>(j))) > 1e-9) {
          enter = j;
          break;
        }
      if (enter == cols_)
        row_alive_[i] = false;
      else
        pivot(i, enter);
    }
    for (std::size_t j = n_struct_; j < cols_; ++j) banned_[j] = true;
    for (std::size_t i = 0; i < rows_; ++i)
      if (!row_alive_[i]) tab_.row(static_cast<Eigen::Index>(i)).setZero();
  }

  void phase2(const Vec& c) {
    const double scale = c.cwiseAbs().maxCoeff();
    const auto obj = static_cast<Eigen::Index>(rows_);
    tab_.row(obj).setZero();
    if (scale == 0.0) return;
    for (std::size_t j = 0; j < poly_.dim(); ++j) tab_(obj, static_cast<Eigen::Index>(j)) = c[static_cast<Eigen::Index>(j)] / scale;
    for (std::size_t i = 0; i < rows_; ++i) {
      if (!row_alive_[i]) continue;
      const double cb = tab_(obj, static_cast<Eigen::Index>(basis_[i]));
      if (cb != 0.0) tab_.row(obj) -= cb * tab_.row(static_cast<Eigen::Index>(i));
    }
    run_simplex();
  }

  // Once Bland's rule takes over it stays on for the rest of the solve, which
  // keeps its no-cycling guarantee. The feasible set is bounded, so an entering
  // column without a pivot row only arises from round-off in its reduced cost;
  // such a column is passed over until the next pivot.
  void run_simplex() {
    const auto obj = static_cast<Eigen::Index>(rows_);
    const auto rhs = static_cast<Eigen::Index>(cols_);
    int degenerate_run = 0;
    bool bland = false;
    std::vector<bool> passed(cols_, false);
    const std::size_t max_pivots = 50 * (rows_ + cols_) + 1000;
    for (std::size_t it = 0; it < max_pivots;) {
      bland = bland || degenerate_run >= kDegenerateRunForBland;
      std::size_t enter = cols_;
      double best = -kPivotTol;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (banned_[j] || passed[j]) continue;
        const double rc = tab_(obj, static_cast<Eigen::Index>(j));
        if (rc < best) {
          enter = j;
          if (bland) break;
          best = rc;
        }
      }
      if (enter == cols_) return;
      const auto ej = static_cast<Eigen::Index>(enter);
      std::size_t leave = rows_;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < rows_; ++i) {
        if (!row_alive_[i]) continue;
        const double a = tab_(static_cast<Eigen::Index>(i), ej);
        if (a <= 1e-12) continue;
        const double ratio = std::max(0.0, tab_(static_cast<Eigen::Index>(i), rhs)) / a;
        if (leave == rows_ || ratio < best_ratio - 1e-14) {
          leave = i;
          best_ratio = ratio;
        } else if (ratio <= best_ratio + 1e-14) {
          const bool better = bland ? basis_[i] < basis_[leave]
                                    : a > tab_(static_cast<Eigen::Index>(leave), ej);
          if (better) {
            leave = i;
            best_ratio = std::min(best_ratio, ratio);
          }
        }
      }
      if (leave == rows_) {
        passed[enter] = true;
        continue;
      }
      // A pivot counts as degenerate when it does not move the objective by a
      // meaningful amount; round-off sized steps must not reset the count.
      const double gain = -tab_(obj, ej) * best_ratio;
      degenerate_run = gain <= 1e-12 * (1.0 + std::abs(tab_(obj, rhs))) ? degenerate_run + 1 : 0;
      pivot(leave, enter);
      std::fill(passed.begin(), passed.end(), false);
      ++it;
    }
    throw Error("lp: pivot limit reached");
  }

  void pivot(std::size_t row, std::size_t col) {
    ++pivots_;
    const auto r = static_cast<Eigen::Index>(row);
    const auto c = static_cast<Eigen::Index>(col);
    tab_.row(r) /= tab_(r, c);
    for (Eigen::Index i = 0; i < tab_.rows(); ++i) {
      if (i == r) continue;
      const double f = tab_(i, c);
      if (f != 0.0) tab_.row(i) -= f * tab_.row(r);
    }
    basis_[row] = col;
  }

  Vec current_x() const {
    Vec x = poly_.lower();
    const auto rhs = static_cast<Eigen::Index>(cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
      if (!row_alive_[i] || basis_[i] >= poly_.dim()) continue;
      const double y = tab_(static_cast<Eigen::Index>(i), rhs);
      x[static_cast<Eigen::Index>(basis_[i])] += y > 0.0 ? y : 0.0;
    }
    return x;
  }

  Polytope poly_;
  Mat tab_;
  std::vector<std::size_t> basis_;
  std::vector<bool> banned_;
  std::vector<bool> row_alive_;
  std::size_t rows_ = 0;
  std::size_t n_struct_ = 0;
  std::size_t cols_ = 0;
  std::size_t pivots_ = 0;
};

inline LpResult lp_solve(const Vec& c, const Polytope& poly) { return LinearProgram(poly).solve(c); }

}  // namespace sepec::opt
