#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "omnicorr/omnibus.hpp"
#include "omnicorr/rng.hpp"
#include "omnicorr/spectral.hpp"
#include "omnicorr/types.hpp"

namespace omnicorr {

/// Edge-probability estimate with entries trimmed into [eps, 1-eps].
struct ProbabilityEstimate {
  Eigen::Index n = 0;
  Matrix phat;
  double epsilon = 0.0;
};

struct ClusteringResult {
  std::vector<int> assignments;
  std::vector<Vector> means;
  std::vector<Matrix> covariances;
  double log_likelihood = -std::numeric_limits<double>::infinity();
  std::optional<double> error_vs_truth;
};

/// Signed rank-d reconstruction of A, trimmed into [eps, 1-eps]:
/// P_tilde = U diag(sign) S U^T, then clamp.
inline ProbabilityEstimate estimate_p(const Matrix& a, Eigen::Index d,
                                      double epsilon = 1e-4) {
  require(epsilon > 0.0 && epsilon < 0.5, "estimate_p: epsilon outside (0, 1/2)");
  SpectralPair pair = eig_top_by_magnitude(a, d);
  Vector signed_values(d);
  for (Eigen::Index k = 0; k < d; ++k) {
    signed_values[k] = pair.signs[static_cast<std::size_t>(k)] * pair.values[k];
  }
  Matrix p = pair.vectors * signed_values.asDiagonal() * pair.vectors.transpose();
  p = 0.5 * (p + p.transpose());
  p = p.cwiseMax(epsilon).cwiseMin(1.0 - epsilon);
  return ProbabilityEstimate{a.rows(), std::move(p), epsilon};
}

/// Plug-in edge-correlation estimator: standardized residual products
/// averaged over the upper triangle, using trimmed rank-d estimates of both
/// edge-probability matrices.
inline double edge_correlation_estimate(const Matrix& a, const Matrix& b,
                                        Eigen::Index d, double epsilon = 1e-4) {
  require(a.rows() == b.rows() && a.cols() == b.cols(),
          "edge_correlation_estimate: shape mismatch");
  const Matrix pa = estimate_p(a, d, epsilon).phat;
  const Matrix pb = estimate_p(b, d, epsilon).phat;
  const Eigen::Index n = a.rows();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double va = pa(i, j) * (1.0 - pa(i, j));
      const double vb = pb(i, j) * (1.0 - pb(i, j));
      sum += (a(i, j) - pa(i, j)) * (b(i, j) - pb(i, j)) / std::sqrt(va * vb);
    }
  }
  return sum * 2.0 / (static_cast<double>(n) * static_cast<double>(n - 1));
}

/// Pearson correlation of the vectorized upper triangles.
inline double pearson_correlation(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(),
          "pearson_correlation: shape mismatch");
  const Eigen::Index n = a.rows();
  const double count = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  double mean_a = 0.0, mean_b = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      mean_a += a(i, j);
      mean_b += b(i, j);
    }
  }
  mean_a /= count;
  mean_b /= count;
  double saa = 0.0, sbb = 0.0, sab = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double da = a(i, j) - mean_a;
      const double db = b(i, j) - mean_b;
      saa += da * da;
      sbb += db * db;
      sab += da * db;
    }
  }
  require(saa > 0.0 && sbb > 0.0, "pearson_correlation: constant graph");
  return sab / std::sqrt(saa * sbb);
}

/// ASE of the mean graph.
inline Embedding mean_graph_embedding(const std::vector<Matrix>& graphs,
                                      Eigen::Index d) {
  require(!graphs.empty(), "mean_graph_embedding: empty collection");
  Matrix mean = graphs[0];
  for (std::size_t k = 1; k < graphs.size(); ++k) mean += graphs[k];
  mean /= static_cast<double>(graphs.size());
  return ase(mean, d);
}

/// Embed each graph separately, align all to the first via Procrustes,
/// and average the aligned embeddings.
inline Embedding procrustes_average_embedding(const std::vector<Matrix>& graphs,
                                              Eigen::Index d) {
  require(graphs.size() >= 2, "procrustes_average_embedding: need m >= 2");
  Embedding hub = ase(graphs[0], d);
  Matrix sum = hub.coords;
  for (std::size_t k = 1; k < graphs.size(); ++k) {
    Embedding e = ase(graphs[k], d);
    sum += e.coords * procrustes(e, hub);
  }
  return Embedding(sum / static_cast<double>(graphs.size()));
}

/// Classical omnibus embedding, blocks averaged row-wise.
inline Embedding omnibus_average_embedding(const std::vector<Matrix>& graphs,
                                           Eigen::Index d) {
  require(graphs.size() >= 2, "omnibus_average_embedding: need m >= 2");
  const Eigen::Index m = static_cast<Eigen::Index>(graphs.size());
  Matrix omni = build_omnibus(classical_coeffs(m), graphs);
  BlockEmbedding be = omni_embed(omni, d, m);
  Matrix sum = Matrix::Zero(be.n, be.d);
  for (Eigen::Index s = 0; s < m; ++s) sum += be.block(s);
  return Embedding(sum / static_cast<double>(m));
}

/// Hollow symmetric matrix of Frobenius distances between blocks.
inline Matrix block_distance_matrix(const BlockEmbedding& e) {
  Matrix out = Matrix::Zero(e.m, e.m);
  for (Eigen::Index k = 0; k < e.m; ++k) {
    for (Eigen::Index l = k + 1; l < e.m; ++l) {
      out(k, l) = out(l, k) = (e.block(k) - e.block(l)).norm();
    }
  }
  return out;
}

namespace detail {

/// O(K^3) Hungarian algorithm on a square cost matrix; returns the
/// assignment column for each row.
inline std::vector<int> hungarian(const Matrix& cost) {
  const int n = static_cast<int>(cost.rows());
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, std::numeric_limits<double>::infinity());
    std::vector<char> used(n + 1, false);
    do {
      used[j0] = true;
      int i0 = p[j0], j1 = -1;
      double delta = std::numeric_limits<double>::infinity();
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> match(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= n; ++j) {
    if (p[j] > 0) match[static_cast<std::size_t>(p[j] - 1)] = j - 1;
  }
  return match;
}

inline double permuted_error(const std::vector<int>& found,
                             const std::vector<int>& truth, int k) {
  const double n = static_cast<double>(found.size());
  // Count agreement per (found label, true label) pair.
  Matrix agree = Matrix::Zero(k, k);
  for (std::size_t i = 0; i < found.size(); ++i) {
    agree(found[i], truth[i]) += 1.0;
  }
  if (k <= 6) {
    std::vector<int> perm(static_cast<std::size_t>(k));
    std::iota(perm.begin(), perm.end(), 0);
    double best = 0.0;
    do {
      double hits = 0.0;
      for (int c = 0; c < k; ++c) hits += agree(c, perm[static_cast<std::size_t>(c)]);
      best = std::max(best, hits);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return 1.0 - best / n;
  }
  const std::vector<int> match = hungarian(-agree);  // maximize agreement
  double hits = 0.0;
  for (int c = 0; c < k; ++c) hits += agree(c, match[static_cast<std::size_t>(c)]);
  return 1.0 - hits / n;
}

}  // namespace detail

/// Full-covariance Gaussian mixture fit by EM with k-means++ initialization,
/// run over independent restarts; the best log-likelihood wins (ties to the
/// earlier restart). Degenerate covariances are regularized with 1e-6 I.
inline ClusteringResult gmm_cluster(const Embedding& points, int k, int restarts,
                                    Rng& rng,
                                    const std::vector<int>* truth = nullptr) {
  require(k >= 1, "gmm_cluster: k must be positive");
  require(points.rows >= k, "gmm_cluster: fewer rows than clusters");
  const Eigen::Index n = points.rows;
  const Eigen::Index d = points.dim;
  const Matrix& x = points.coords;

  ClusteringResult best;
  for (int restart = 0; restart < restarts; ++restart) {
    // k-means++ seeding.
    std::vector<Vector> means;
    means.push_back(x.row(static_cast<Eigen::Index>(rng.below(n))).transpose());
    Vector dist2 = Vector::Constant(n, std::numeric_limits<double>::infinity());
    while (static_cast<int>(means.size()) < k) {
      for (Eigen::Index i = 0; i < n; ++i) {
        const double dd = (x.row(i).transpose() - means.back()).squaredNorm();
        dist2[i] = std::min(dist2[i], dd);
      }
      const double total = dist2.sum();
      Eigen::Index pick = 0;
      if (total > 0.0) {
        double u = rng.uniform() * total;
        double acc = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
          acc += dist2[i];
          if (u < acc) {
            pick = i;
            break;
          }
        }
      } else {
        pick = static_cast<Eigen::Index>(rng.below(n));
      }
      means.push_back(x.row(pick).transpose());
    }

    std::vector<Matrix> covs(static_cast<std::size_t>(k), Matrix::Identity(d, d));
    Vector weights = Vector::Constant(k, 1.0 / k);
    Matrix resp = Matrix::Zero(n, k);
    double ll = -std::numeric_limits<double>::infinity();

    for (int iter = 0; iter < 200; ++iter) {
      // E-step with log-sum-exp.
      Matrix logp(n, k);
      for (int c = 0; c < k; ++c) {
        Matrix cov = covs[static_cast<std::size_t>(c)];
        Eigen::LLT<Matrix> llt(cov);
        if (llt.info() != Eigen::Success ||
            cov.determinant() < 1e-9) {
          cov += 1e-6 * Matrix::Identity(d, d);
          llt.compute(cov);
        }
        const double logdet =
            2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
        for (Eigen::Index i = 0; i < n; ++i) {
          const Vector diff = x.row(i).transpose() - means[static_cast<std::size_t>(c)];
          const double quad = diff.dot(llt.solve(diff));
          logp(i, c) = std::log(weights[c]) -
                       0.5 * (quad + logdet + d * std::log(2.0 * M_PI));
        }
      }
      double new_ll = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double mx = logp.row(i).maxCoeff();
        const double lse = mx + std::log((logp.row(i).array() - mx).exp().sum());
        new_ll += lse;
        resp.row(i) = (logp.row(i).array() - lse).exp();
      }
      // M-step.
      for (int c = 0; c < k; ++c) {
        const double nc = resp.col(c).sum();
        weights[c] = std::max(nc / static_cast<double>(n), 1e-12);
        Vector mu = (resp.col(c).transpose() * x).transpose() / std::max(nc, 1e-12);
        Matrix cov = Matrix::Zero(d, d);
        for (Eigen::Index i = 0; i < n; ++i) {
          const Vector diff = x.row(i).transpose() - mu;
          cov += resp(i, c) * diff * diff.transpose();
        }
        cov /= std::max(nc, 1e-12);
        if (cov.determinant() < 1e-9) cov += 1e-6 * Matrix::Identity(d, d);
        means[static_cast<std::size_t>(c)] = std::move(mu);
        covs[static_cast<std::size_t>(c)] = std::move(cov);
      }
      if (std::abs(new_ll - ll) < 1e-8 * (1.0 + std::abs(new_ll))) {
        ll = new_ll;
        break;
      }
      ll = new_ll;
    }

    if (ll > best.log_likelihood) {
      best.log_likelihood = ll;
      best.means = means;
      best.covariances = covs;
      best.assignments.assign(static_cast<std::size_t>(n), 0);
      for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::Index c = 0;
        resp.row(i).maxCoeff(&c);
        best.assignments[static_cast<std::size_t>(i)] = static_cast<int>(c);
      }
    }
  }

  if (truth != nullptr) {
    require(truth->size() == best.assignments.size(),
            "gmm_cluster: truth size mismatch");
    const int k_err = std::max(
        k, 1 + *std::max_element(truth->begin(), truth->end()));
    best.error_vs_truth = detail::permuted_error(best.assignments, *truth, k_err);
  }
  return best;
}

/// 1-nearest-neighbor classification; ties go to the smaller training index.
inline std::vector<int> knn_classify(const Matrix& train,
                                     const std::vector<int>& train_labels,
                                     const Matrix& test) {
  require(train.rows() > 0, "knn_classify: empty training set");
  require(static_cast<std::size_t>(train.rows()) == train_labels.size(),
          "knn_classify: label count mismatch");
  std::vector<int> out(static_cast<std::size_t>(test.rows()));
  for (Eigen::Index i = 0; i < test.rows(); ++i) {
    Eigen::Index arg = 0;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < train.rows(); ++j) {
      const double dd = (test.row(i) - train.row(j)).squaredNorm();
      if (dd < best) {  // strict: ties keep the smaller index
        best = dd;
        arg = j;
      }
    }
    out[static_cast<std::size_t>(i)] = train_labels[static_cast<std::size_t>(arg)];
  }
  return out;
}

}  // namespace omnicorr
