#pragma once

// Convex design objectives in the form Frank-Wolfe expects.

#include <cmath>
#include <functional>
#include <limits>
#include <utility>

#include "sepec/error.hpp"
#include "sepec/linalg.hpp"
#include "sepec/opt/waterfill.hpp"

namespace sepec::opt {

// J(x) = sum_a w_a / x_a.
class IpwSurrogate {
 public:
  explicit IpwSurrogate(Vec weights) : w_(std::move(weights)) {
    if ((w_.array() < 0.0).any() || !w_.allFinite()) throw InvalidArgument("IpwSurrogate: weights must be >= 0");
  }

  const Vec& weights() const noexcept { return w_; }
  double value(const Vec& x) const { return ipw_surrogate(w_, x); }

  Vec gradient(const Vec& x) const {
    Vec g = Vec::Zero(x.size());
    for (Eigen::Index a = 0; a < x.size(); ++a) {
      if (w_[a] == 0.0) continue;
      g[a] = x[a] > 0.0 ? -w_[a] / (x[a] * x[a]) : -std::numeric_limits<double>::infinity();
    }
    return g;
  }

  // Only coordinates with positive weight matter along a segment.
  auto segment(const Vec& x, const Vec& d) const {
    std::vector<double> xs, ds, ws;
    for (Eigen::Index a = 0; a < x.size(); ++a) {
      if (w_[a] == 0.0) continue;
      xs.push_back(x[a]);
      ds.push_back(d[a]);
      ws.push_back(w_[a]);
    }
    return [xs = std::move(xs), ds = std::move(ds), ws = std::move(ws)](double lam) {
      double s = 0.0;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        const double v = xs[i] + lam * ds[i];
        if (!(v > 0.0)) return std::numeric_limits<double>::infinity();
        s += ws[i] / v;
      }
      return s;
    };
  }

 private:
  Vec w_;
};

struct LbValue {
  double value = 0.0;
  Vec gradient;
};

// J = phi^T (T G(x) + G0)^{-1} phi with G(x) = sum_i x_i x_i x_i^T, and
// dJ/dx_i = -T (phi^T (T G + G0)^{-1} x_i)^2. Both come from one factorization.
inline LbValue lb_objective(const Vec& pi_e, const Vec& phi, const Mat& arm_features, const Mat& gram0,
                            double horizon) {
  if (pi_e.size() != arm_features.rows())
    throw DimensionError("lb_objective policy", static_cast<std::size_t>(arm_features.rows()), pi_e.size());
  if (phi.size() != arm_features.cols())
    throw DimensionError("lb_objective phi", static_cast<std::size_t>(arm_features.cols()), phi.size());
  Mat m = horizon * arm_features.transpose() * pi_e.asDiagonal() * arm_features + gram0;
  const SymFactor f(m);
  const Vec u = f.solve(phi);
  LbValue out;
  out.value = phi.dot(u);
  out.gradient = -horizon * (arm_features * u).array().square().matrix();
  return out;
}

class LbObjective {
 public:
  LbObjective(Vec phi, Mat arm_features, Mat gram0, double horizon)
      : phi_(std::move(phi)), x_(std::move(arm_features)), g0_(std::move(gram0)), t_(horizon) {}

  double value(const Vec& pi) const {
    try {
      return lb_objective(pi, phi_, x_, g0_, t_).value;
    } catch (const SingularMatrixError&) {
      return std::numeric_limits<double>::infinity();
    }
  }

  Vec gradient(const Vec& pi) const { return lb_objective(pi, phi_, x_, g0_, t_).gradient; }

  // The Gram matrix is affine along a segment, B + lambda S. With B = L L^T and
  // L^{-1} S L^{-T} = Q diag(ev) Q^T the restriction is sum_i c_i^2 / (1 + lambda ev_i),
  // c = Q^T L^{-1} phi, so each evaluation costs O(d).
  std::function<double(double)> segment(const Vec& pi, const Vec& d) const {
    const Mat base = t_ * x_.transpose() * pi.asDiagonal() * x_ + g0_;
    const Mat slope = t_ * x_.transpose() * d.asDiagonal() * x_;
    const Eigen::LLT<Mat> llt(base);
    if (llt.info() == Eigen::Success) {
      const Mat l_inv = llt.matrixL().solve(Mat::Identity(base.rows(), base.cols()));
      const Mat reduced = l_inv * slope * l_inv.transpose();
      const Eigen::SelfAdjointEigenSolver<Mat> eig(0.5 * (reduced + reduced.transpose()));
      if (eig.info() == Eigen::Success) {
        const Vec c2 = (eig.eigenvectors().transpose() * (l_inv * phi_)).array().square();
        return [c2, ev = Vec(eig.eigenvalues())](double lam) {
          double s = 0.0;
          for (Eigen::Index i = 0; i < ev.size(); ++i) {
            const double den = 1.0 + lam * ev[i];
            if (!(den > 1e-14)) return std::numeric_limits<double>::infinity();
            s += c2[i] / den;
          }
          return s;
        };
      }
    }
    return [base, slope, phi = phi_](double lam) {
      Mat m = base + lam * slope;
      Eigen::LDLT<Mat> ldlt(m);
      if (ldlt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
      const auto dd = ldlt.vectorD();
      const double scale = std::max(1.0, m.diagonal().cwiseAbs().maxCoeff());
      for (Eigen::Index i = 0; i < dd.size(); ++i)
        if (!(dd[i] > 1e-14 * scale)) return std::numeric_limits<double>::infinity();
      return phi.dot(ldlt.solve(phi));
    };
  }

 private:
  Vec phi_;
  Mat x_;
  Mat g0_;
  double t_;
};

// max_x x^T (T G(pi) + G0)^{-1} x, the largest predictive variance over the arms.
// The gradient is the derivative for the maximizing arm (a subgradient).
class MaxUncertaintyObjective {
 public:
  MaxUncertaintyObjective(Mat arm_features, Mat gram0, double horizon)
      : x_(std::move(arm_features)), g0_(std::move(gram0)), t_(horizon) {}

  double value(const Vec& pi) const {
    try {
      const SymFactor f(gram(pi));
      return (x_ * f.inverse()).cwiseProduct(x_).rowwise().sum().maxCoeff();
    } catch (const SingularMatrixError&) {
      return std::numeric_limits<double>::infinity();
    }
  }

  Vec gradient(const Vec& pi) const {
    const SymFactor f(gram(pi));
    const Mat inv = f.inverse();
    Eigen::Index arg = 0;
    (x_ * inv).cwiseProduct(x_).rowwise().sum().maxCoeff(&arg);
    const Vec u = inv * x_.row(arg).transpose();
    return -t_ * (x_ * u).array().square().matrix();
  }

 private:
  Mat gram(const Vec& pi) const { return t_ * x_.transpose() * pi.asDiagonal() * x_ + g0_; }

  Mat x_;
  Mat g0_;
  double t_;
};

// c^T x.
class LinearObjective {
 public:
  explicit LinearObjective(Vec c) : c_(std::move(c)) {}
  double value(const Vec& x) const { return c_.dot(x); }
  Vec gradient(const Vec&) const { return c_; }

 private:
  Vec c_;
};

}  // namespace sepec::opt
