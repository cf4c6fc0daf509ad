#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <utility>
#include <vector>

#include "omnicorr/rng.hpp"
#include "omnicorr/spectral.hpp"
#include "omnicorr/types.hpp"

namespace omnicorr {

/// Finite latent-position distribution F = sum_k pi_k delta_{xi_k}.
/// All expectations over F reduce to finite sums.
struct PointMassMixture {
  Matrix atoms;     // K x d, one atom per row
  Vector weights;   // K, sums to 1

  PointMassMixture(Matrix a, Vector w) : atoms(std::move(a)), weights(std::move(w)) {
    require(atoms.rows() == weights.size(), "PointMassMixture: size mismatch");
    require(atoms.rows() >= 1, "PointMassMixture: empty");
    require((weights.array() >= 0.0).all(), "PointMassMixture: negative weight");
    require(std::abs(weights.sum() - 1.0) <= 1e-12,
            "PointMassMixture: weights do not sum to 1");
    Matrix gram = atoms * atoms.transpose();
    require((gram.array() >= -1e-12).all() && (gram.array() <= 1.0 + 1e-12).all(),
            "PointMassMixture: atom inner products must lie in [0,1]");
    Matrix second_moment = atoms.transpose() * weights.asDiagonal() * atoms;
    Eigen::SelfAdjointEigenSolver<Matrix> es(second_moment);
    require(es.eigenvalues().minCoeff() > 1e-10,
            "PointMassMixture: E[XX^T] is rank deficient");
  }

  Eigen::Index dim() const { return atoms.cols(); }
  Eigen::Index size() const { return atoms.rows(); }
};

/// i.i.d. draws from a mixture, with the generating atom of each row kept.
struct LatentPositions {
  Eigen::Index n = 0;
  Eigen::Index d = 0;
  Matrix positions;         // n x d
  std::vector<int> labels;  // atom index per row

  Matrix edge_probabilities() const { return positions * positions.transpose(); }
};

/// Symmetric m x m inherent-correlation matrix with unit diagonal.
/// Negative correlation is rejected at construction.
struct CorrelationSpec {
  Eigen::Index m = 0;
  Matrix r;

  CorrelationSpec() = default;
  explicit CorrelationSpec(Matrix mat) : m(mat.rows()), r(std::move(mat)) {
    require_symmetric(r, "CorrelationSpec");
    require(r.diagonal().isApproxToConstant(1.0, 1e-12),
            "CorrelationSpec: diagonal must be 1");
    require((r.array() >= 0.0).all() && (r.array() <= 1.0 + 1e-12).all(),
            "CorrelationSpec: entries must lie in [0,1]");
  }

  static CorrelationSpec identity(Eigen::Index m) {
    return CorrelationSpec(Matrix::Identity(m, m));
  }
};

/// m adjacency matrices on a shared vertex set plus the latent positions
/// that generated them.
struct GraphCollection {
  Eigen::Index m = 0;
  Eigen::Index n = 0;
  std::vector<Matrix> graphs;
  LatentPositions latent;
  CorrelationSpec spec;
  Matrix generator;  // A^(0) for the single-generator model; empty otherwise
};

/// Latent mixture whose atoms reproduce a PSD SBM block matrix:
/// atoms = rows of U_B S_B^{1/2}, so xi_a . xi_b = B_{ab}.
inline PointMassMixture sbm_to_mixture(const Matrix& block, const Vector& pi) {
  require_symmetric(block, "sbm_to_mixture");
  require((block.array() >= 0.0).all() && (block.array() <= 1.0).all(),
          "sbm_to_mixture: block entries must lie in [0,1]");
  Eigen::SelfAdjointEigenSolver<Matrix> es(block);
  require(es.eigenvalues().minCoeff() >= -1e-10, "sbm_to_mixture: B is not PSD");
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < block.rows(); ++i) {
    if (es.eigenvalues()[i] > 1e-10) ++rank;
  }
  require(rank >= 1, "sbm_to_mixture: B is zero");
  SpectralPair pair = eig_top_by_magnitude(block, rank);
  return PointMassMixture(pair.vectors * pair.values.cwiseSqrt().asDiagonal(), pi);
}

inline LatentPositions sample_latent(const PointMassMixture& f, Eigen::Index n,
                                     Rng& rng) {
  require(n >= 1, "sample_latent: n must be positive");
  LatentPositions out;
  out.n = n;
  out.d = f.dim();
  out.positions.resize(n, f.dim());
  out.labels.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    double u = rng.uniform();
    int k = 0;
    double acc = f.weights[0];
    while (u >= acc && k + 1 < f.size()) acc += f.weights[++k];
    out.positions.row(i) = f.atoms.row(k);
    out.labels[static_cast<std::size_t>(i)] = k;
  }
  return out;
}

/// A_{ij} ~ Bern(X_i . X_j) independently above the diagonal, mirrored,
/// hollow.
inline Matrix sample_rdpg(const LatentPositions& x, Rng& rng) {
  const Eigen::Index n = x.n;
  Matrix p = x.edge_probabilities();
  Matrix a = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      a(i, j) = rng.bernoulli(p(i, j)) ? 1.0 : 0.0;
      a(j, i) = a(i, j);
    }
  }
  return a;
}

/// R_for: entry (k1,k2) is the product of the step correlations between them.
inline CorrelationSpec corr_forward(const Vector& rho_seq) {
  require((rho_seq.array() >= 0.0).all() && (rho_seq.array() <= 1.0).all(),
          "corr_forward: entries must lie in [0,1]");
  const Eigen::Index m = rho_seq.size() + 1;
  Matrix r = Matrix::Identity(m, m);
  for (Eigen::Index k1 = 0; k1 < m; ++k1) {
    double prod = 1.0;
    for (Eigen::Index k2 = k1 + 1; k2 < m; ++k2) {
      prod *= rho_seq[k2 - 1];
      r(k1, k2) = prod;
      r(k2, k1) = prod;
    }
  }
  return CorrelationSpec(std::move(r));
}

/// R_gen = nu nu^T + diag(I - nu nu^T).
inline CorrelationSpec corr_generator(const Vector& nu) {
  require((nu.array() >= 0.0).all() && (nu.array() <= 1.0).all(),
          "corr_generator: entries must lie in [0,1]");
  Matrix r = nu * nu.transpose();
  r.diagonal().setOnes();
  return CorrelationSpec(std::move(r));
}

namespace detail {

inline double conditional_edge(double p, double rho, bool prev, Rng& rng) {
  // Both conditional parameters lie in [0,1] algebraically; assert anyway.
  const double q = prev ? p + rho * (1.0 - p) : p * (1.0 - rho);
  require(q >= 0.0 && q <= 1.0, "conditional Bernoulli parameter out of range");
  return rng.bernoulli(q) ? 1.0 : 0.0;
}

}  // namespace detail

/// Forward-propagation sampler: A^(1) ~ RDPG(X), then each graph is drawn
/// edge-wise conditionally on its predecessor.
inline GraphCollection sample_forward(LatentPositions x, const Vector& rho_seq,
                                      std::uint64_t seed, std::uint64_t replicate = 0) {
  CorrelationSpec spec = corr_forward(rho_seq);
  const Eigen::Index m = rho_seq.size() + 1;
  const Eigen::Index n = x.n;
  Matrix p = x.edge_probabilities();

  GraphCollection out;
  out.m = m;
  out.n = n;
  out.spec = std::move(spec);
  out.graphs.reserve(static_cast<std::size_t>(m));

  Rng rng0 = Rng::stream(seed, replicate, 0);
  out.graphs.push_back(sample_rdpg(x, rng0));
  for (Eigen::Index l = 1; l < m; ++l) {
    Rng rng = Rng::stream(seed, replicate, static_cast<std::uint64_t>(l));
    const Matrix& prev = out.graphs.back();
    Matrix a = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        a(i, j) = detail::conditional_edge(p(i, j), rho_seq[l - 1],
                                           prev(i, j) > 0.5, rng);
        a(j, i) = a(i, j);
      }
    }
    out.graphs.push_back(std::move(a));
  }
  out.latent = std::move(x);
  return out;
}

/// Single-generator sampler: every graph is drawn edge-wise conditionally on
/// one hidden generator A^(0), which is retained.
inline GraphCollection sample_generator(LatentPositions x, const Vector& nu,
                                        std::uint64_t seed,
                                        std::uint64_t replicate = 0) {
  CorrelationSpec spec = corr_generator(nu);
  const Eigen::Index m = nu.size();
  const Eigen::Index n = x.n;
  Matrix p = x.edge_probabilities();

  GraphCollection out;
  out.m = m;
  out.n = n;
  out.spec = std::move(spec);
  out.graphs.reserve(static_cast<std::size_t>(m));

  Rng rng0 = Rng::stream(seed, replicate, 0);
  out.generator = sample_rdpg(x, rng0);
  for (Eigen::Index l = 0; l < m; ++l) {
    Rng rng = Rng::stream(seed, replicate, static_cast<std::uint64_t>(l) + 1);
    Matrix a = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        a(i, j) = detail::conditional_edge(p(i, j), nu[l],
                                           out.generator(i, j) > 0.5, rng);
        a(j, i) = a(i, j);
      }
    }
    out.graphs.push_back(std::move(a));
  }
  out.latent = std::move(x);
  return out;
}

/// Sample correlation of the standardized edge indicators of two graphs
/// sharing known latent positions; averages (A-P)(B-P)/(P(1-P)) over the
/// informative upper-triangle entries.
inline double empirical_edge_correlation(const Matrix& a, const Matrix& b,
                                         const LatentPositions& x) {
  require(a.rows() == b.rows() && a.rows() == x.n,
          "empirical_edge_correlation: shape mismatch");
  Matrix p = x.edge_probabilities();
  double sum = 0.0;
  Eigen::Index count = 0;
  for (Eigen::Index i = 0; i < x.n; ++i) {
    for (Eigen::Index j = i + 1; j < x.n; ++j) {
      const double pij = p(i, j);
      if (pij <= 0.0 || pij >= 1.0) continue;
      sum += (a(i, j) - pij) * (b(i, j) - pij) / (pij * (1.0 - pij));
      ++count;
    }
  }
  require(count > 0, "empirical_edge_correlation: no informative edges");
  return sum / static_cast<double>(count);
}

}  // namespace omnicorr
