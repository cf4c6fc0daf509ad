#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "omnicorr/types.hpp"

namespace omnicorr {

/// Top-d eigenpairs of a symmetric matrix selected by eigenvalue magnitude.
/// `values` are the absolute eigenvalues (descending), `signs` the original
/// signs. Columns follow a fixed sign convention: the largest-|.| entry of
/// each eigenvector is nonnegative, so results are deterministic.
struct SpectralPair {
  Vector values;           // |lambda|, descending
  Matrix vectors;          // order x d, orthonormal columns
  std::vector<int> signs;  // +1 / -1
};

namespace detail {

inline void apply_sign_convention(Matrix& vectors) {
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    Eigen::Index imax = 0;
    vectors.col(c).cwiseAbs().maxCoeff(&imax);
    if (vectors(imax, c) < 0) vectors.col(c) = -vectors.col(c);
  }
}

}  // namespace detail

inline SpectralPair eig_top_by_magnitude(const Matrix& m, Eigen::Index d) {
  require_symmetric(m, "eig_top_by_magnitude");
  require(d >= 1 && d <= m.rows(), "eig_top_by_magnitude: d out of range");

  Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
  require(solver.info() == Eigen::Success, "eig_top_by_magnitude: no convergence");
  const Vector& evals = solver.eigenvalues();
  const Matrix& evecs = solver.eigenvectors();

  // Stable sort by (|lambda| descending, original index ascending).
  std::vector<Eigen::Index> order(static_cast<std::size_t>(m.rows()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return std::abs(evals[a]) > std::abs(evals[b]);
  });

  SpectralPair out;
  out.values.resize(d);
  out.vectors.resize(m.rows(), d);
  out.signs.resize(static_cast<std::size_t>(d));
  for (Eigen::Index k = 0; k < d; ++k) {
    const Eigen::Index j = order[static_cast<std::size_t>(k)];
    out.values[k] = std::abs(evals[j]);
    out.signs[static_cast<std::size_t>(k)] = evals[j] < 0 ? -1 : +1;
    out.vectors.col(k) = evecs.col(j);
  }
  detail::apply_sign_convention(out.vectors);
  return out;
}

/// Adjacency spectral embedding: U_A S_A^{1/2} with the top-d eigenpairs
/// of |A| (magnitude ordering).
inline Embedding ase(const Matrix& a, Eigen::Index d) {
  SpectralPair pair = eig_top_by_magnitude(a, d);
  return Embedding(pair.vectors * pair.values.cwiseSqrt().asDiagonal());
}

/// Orthogonal W minimizing ||X W - Y||_F, via SVD of X^T Y. Rank-deficient
/// X^T Y is completed from the SVD bases under the same sign convention,
/// which keeps the output deterministic.
inline Matrix procrustes(const Embedding& x, const Embedding& y) {
  require(x.rows == y.rows && x.dim == y.dim, "procrustes: shape mismatch");
  require(x.dim >= 1, "procrustes: empty dimension");
  Matrix cross = x.coords.transpose() * y.coords;
  Eigen::JacobiSVD<Matrix> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Matrix u = svd.matrixU();
  Matrix v = svd.matrixV();
  // Fix null-direction sign ambiguity jointly, preserving W = U V^T.
  for (Eigen::Index c = 0; c < u.cols(); ++c) {
    Eigen::Index imax = 0;
    u.col(c).cwiseAbs().maxCoeff(&imax);
    if (u(imax, c) < 0) {
      u.col(c) = -u.col(c);
      v.col(c) = -v.col(c);
    }
  }
  return u * v.transpose();
}

/// Classical MDS of a hollow symmetric distance matrix: double-center
/// -1/2 J (D o D) J and embed with the top-d nonnegative eigenpairs.
inline Embedding cmds(const Matrix& dist, Eigen::Index d) {
  require_symmetric(dist, "cmds");
  require((dist.array() >= 0.0).all(), "cmds: negative entries");
  require(dist.diagonal().isZero(0.0), "cmds: nonzero diagonal");
  require(d >= 1 && d <= dist.rows(), "cmds: d out of range");

  const Eigen::Index n = dist.rows();
  Matrix sq = dist.cwiseProduct(dist);
  Matrix centering = Matrix::Identity(n, n) - Matrix::Constant(n, n, 1.0 / n);
  Matrix lifted = -0.5 * centering * sq * centering;
  Matrix gram = 0.5 * (lifted + lifted.transpose());  // re-symmetrize round-off

  SpectralPair pair = eig_top_by_magnitude(gram, d);
  Vector scale(d);
  for (Eigen::Index k = 0; k < d; ++k) {
    // Negative eigenvalues mean the configuration is not Euclidean-realizable
    // in that direction; contribute nothing.
    scale[k] = pair.signs[static_cast<std::size_t>(k)] > 0
                   ? std::sqrt(pair.values[k])
                   : 0.0;
  }
  return Embedding(pair.vectors * scale.asDiagonal());
}

/// Zhu-Ghodsi profile-likelihood elbow: split the descending spectrum into
/// two Gaussian groups with a shared variance and return the split
/// maximizing the profile log-likelihood. Ties break toward the smaller
/// dimension.
inline Eigen::Index elbow_dimension(const Vector& values) {
  const Eigen::Index p = values.size();
  require(p >= 2, "elbow_dimension: need at least 2 values");
  for (Eigen::Index i = 0; i + 1 < p; ++i) {
    require(values[i] >= values[i + 1], "elbow_dimension: not descending");
  }
  require((values.array() >= 0.0).all(), "elbow_dimension: negative values");

  Eigen::Index best_q = 1;
  double best_ll = -std::numeric_limits<double>::infinity();
  for (Eigen::Index q = 1; q < p; ++q) {
    const double mu1 = values.head(q).mean();
    const double mu2 = values.tail(p - q).mean();
    double ss = (values.head(q).array() - mu1).square().sum() +
                (values.tail(p - q).array() - mu2).square().sum();
    // Pooled MLE variance, floored so a perfect two-level split wins outright.
    const double var = std::max(ss / static_cast<double>(p), 1e-300);
    const double ll = -0.5 * static_cast<double>(p) * std::log(var);
    if (ll > best_ll) {  // strict: ties keep the smaller q
      best_ll = ll;
      best_q = q;
    }
  }
  return best_q;
}

}  // namespace omnicorr
