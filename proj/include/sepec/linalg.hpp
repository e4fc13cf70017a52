#pragma once

#include <cmath>
#include <algorithm>
#include <limits>

#include <Eigen/Dense>

#include "sepec/error.hpp"

namespace sepec {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Factorization of a symmetric positive-definite matrix. If the plain LDLT
// has a pivot at or below 1e-10 of the largest diagonal entry, one retry is made
// with 1e-12 * trace added to the diagonal; the retry is accepted only if
// every pivot clears ten times that shift, so an exact null direction (whose
// pivot would be the shift itself) is still reported as singular.
class SymFactor {
 public:
  explicit SymFactor(const Mat& m) {
    if (m.rows() != m.cols()) throw DimensionError("SymFactor: square matrix", m.rows(), m.cols());
    if (!m.allFinite()) throw SingularMatrixError("SymFactor: non-finite entries");
    const double scale = m.diagonal().cwiseAbs().maxCoeff();
    if (try_factor(m, 1e-10 * scale)) return;
    const double trace = m.trace();
    if (!(trace > 0.0)) throw SingularMatrixError("SymFactor: matrix is not positive definite");
    const double jitter = 1e-12 * trace;
    Mat shifted = m;
    shifted.diagonal().array() += jitter;
    if (try_factor(shifted, 10.0 * jitter)) {
      jittered_ = true;
      return;
    }
    throw SingularMatrixError("SymFactor: matrix is not positive definite");
  }

  Vec solve(const Vec& b) const { return ldlt_.solve(b); }
  Mat solve(const Mat& b) const { return ldlt_.solve(b); }
  Mat inverse() const { return ldlt_.solve(Mat::Identity(dim_, dim_)); }
  bool jittered() const noexcept { return jittered_; }

  // b^T M^{-1} b
  double inv_quad(const Vec& b) const { return b.dot(ldlt_.solve(b)); }

 private:
  bool try_factor(const Mat& m, double min_pivot) {
    dim_ = m.rows();
    ldlt_.compute(m);
    if (ldlt_.info() != Eigen::Success) return false;
    const auto d = ldlt_.vectorD();
    for (Eigen::Index i = 0; i < d.size(); ++i) {
      if (!(d[i] > min_pivot)) return false;
    }
    return true;
  }

  Eigen::LDLT<Mat> ldlt_;
  Eigen::Index dim_ = 0;
  bool jittered_ = false;
};

// Moore-Penrose pseudo-inverse via SVD with the usual relative cutoff.
inline Mat pseudo_inverse(const Mat& m) {
  if (m.size() == 0) return Mat(m.cols(), m.rows());
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double tol =
      static_cast<double>(std::max(m.rows(), m.cols())) * std::numeric_limits<double>::epsilon() *
      (s.size() > 0 ? s[0] : 0.0);
  Vec inv = Vec::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s[i] > tol) inv[i] = 1.0 / s[i];
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

inline bool is_symmetric(const Mat& m, double tol = 1e-9) {
  return m.rows() == m.cols() && (m - m.transpose()).cwiseAbs().maxCoeff() <= tol;
}

// Smallest eigenvalue of a symmetric matrix.
inline double min_eigenvalue(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace sepec
