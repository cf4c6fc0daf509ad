#include <gtest/gtest.h>

#include "omnicorr/models.hpp"
#include "omnicorr/omnibus.hpp"

namespace omnicorr {
namespace {

std::vector<Matrix> random_graphs(Eigen::Index m, Eigen::Index n, Rng& rng) {
  std::vector<Matrix> out;
  for (Eigen::Index g = 0; g < m; ++g) {
    Matrix a = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        a(i, j) = a(j, i) = rng.bernoulli(0.4) ? 1.0 : 0.0;
      }
    }
    out.push_back(std::move(a));
  }
  return out;
}

// Random valid coefficient tensor: convex, block-symmetric, with a boosted
// own-graph weight so strict row dominance holds.
OmnibusCoefficients random_valid_coeffs(Eigen::Index m, Rng& rng) {
  OmnibusCoefficients out;
  out.m = m;
  out.c.assign(static_cast<std::size_t>(m), Matrix::Zero(m, m));
  for (Eigen::Index k = 0; k < m; ++k) {
    for (Eigen::Index l = k; l < m; ++l) {
      Vector w(m);
      for (Eigen::Index q = 0; q < m; ++q) w[q] = rng.uniform();
      w[k] += static_cast<double>(m);
      w[l] += static_cast<double>(m);
      w /= w.sum();
      for (Eigen::Index q = 0; q < m; ++q) {
        out.c[static_cast<std::size_t>(q)](k, l) = w[q];
        out.c[static_cast<std::size_t>(q)](l, k) = w[q];
      }
    }
  }
  return out;
}

TEST(Omnibus, ClassicalBlocksArePairwiseAverages) {
  Rng rng = Rng::stream(71, 0, 0);
  auto graphs = random_graphs(3, 12, rng);
  Matrix omni = build_omnibus(classical_coeffs(3), graphs);
  ASSERT_EQ(omni.rows(), 36);
  for (Eigen::Index k = 0; k < 3; ++k) {
    for (Eigen::Index l = 0; l < 3; ++l) {
      Matrix expect = 0.5 * (graphs[static_cast<std::size_t>(k)] +
                             graphs[static_cast<std::size_t>(l)]);
      EXPECT_TRUE(omni.block(12 * k, 12 * l, 12, 12).isApprox(expect, 0.0));
    }
  }
  EXPECT_TRUE(omni.isApprox(omni.transpose(), 0.0));
}

TEST(Omnibus, TotalAverageOffDiagonalIsGrandMean) {
  Rng rng = Rng::stream(73, 0, 0);
  auto graphs = random_graphs(3, 10, rng);
  Matrix omni = build_omnibus(total_average_coeffs(3), graphs);
  Matrix abar = (graphs[0] + graphs[1] + graphs[2]) / 3.0;
  EXPECT_TRUE(omni.block(0, 10, 10, 10).isApprox(abar, 1e-15));
  EXPECT_TRUE(omni.block(10, 20, 10, 10).isApprox(abar, 1e-15));
  EXPECT_TRUE(omni.block(0, 0, 10, 10).isApprox(graphs[0], 0.0));
}

TEST(Omnibus, WeightedPairwiseBlockFormula) {
  Rng rng = Rng::stream(79, 0, 0);
  auto graphs = random_graphs(3, 8, rng);
  Vector w(3);
  w << 1.0, 10.0, 2.0;
  Matrix omni = build_omnibus(weighted_pairwise_coeffs(w), graphs);
  Matrix expect01 = (1.0 * graphs[0] + 10.0 * graphs[1]) / 11.0;
  EXPECT_TRUE(omni.block(0, 8, 8, 8).isApprox(expect01, 1e-15));
}

// Oracle: recompute alpha(s,q) directly from the named block definitions,
// independent of the coefficient-tensor plumbing.
TEST(Omnibus, ForwardAlphaMatchesDirectSummation) {
  const Eigen::Index m = 5;
  AlphaWeights alpha = alpha_weights(forward_coeffs(m));
  for (Eigen::Index s = 0; s < m; ++s) {
    Vector direct = Vector::Zero(m);
    for (Eigen::Index l = 0; l < m; ++l) {
      // Block (s,l): for i > j the block is ((i-1) A^j + A^i) / i with
      // 1-based i = max+1, j = min+1; the diagonal block is A^s.
      const Eigen::Index i = std::max(s, l) + 1;
      const Eigen::Index j = std::min(s, l) + 1;
      if (i == j) {
        direct[s] += 1.0;
      } else {
        direct[j - 1] += static_cast<double>(i - 1) / static_cast<double>(i);
        direct[i - 1] += 1.0 / static_cast<double>(i);
      }
    }
    for (Eigen::Index q = 0; q < m; ++q) {
      EXPECT_NEAR(alpha.alpha(s, q), direct[q], 1e-14);
    }
  }
}

TEST(Omnibus, DampenedAlphaMatchesDirectSummation) {
  const Eigen::Index m = 6;
  Vector w(m);
  for (Eigen::Index i = 0; i < m; ++i) w[i] = static_cast<double>(i + 1);
  AlphaWeights alpha = alpha_weights(dampened_coeffs(w));
  for (Eigen::Index s = 0; s < m; ++s) {
    Vector direct = Vector::Zero(m);
    for (Eigen::Index l = 0; l < m; ++l) {
      // Block (k,l) with k > l is (w_k A^k + A^l) / (w_k + 1).
      const Eigen::Index k = std::max(s, l);
      const Eigen::Index lo = std::min(s, l);
      if (k == lo) {
        direct[s] += 1.0;
      } else {
        direct[k] += w[k] / (w[k] + 1.0);
        direct[lo] += 1.0 / (w[k] + 1.0);
      }
    }
    for (Eigen::Index q = 0; q < m; ++q) {
      EXPECT_NEAR(alpha.alpha(s, q), direct[q], 1e-14);
    }
  }
}

TEST(Omnibus, PairPreservingAlphaStructure) {
  for (Eigen::Index m : {4, 6, 10}) {
    AlphaWeights alpha = alpha_weights(pair_preserving_coeffs(m));
    EXPECT_NEAR(alpha.alpha(0, 0), static_cast<double>(m) - 0.5, 1e-12);
    EXPECT_NEAR(alpha.alpha(0, 1), 0.5, 1e-12);
    for (Eigen::Index q = 2; q < m; ++q) {
      EXPECT_NEAR(alpha.alpha(0, q), 0.0, 1e-12);
    }
    // Row sums are always m under convexity.
    for (Eigen::Index s = 0; s < m; ++s) {
      double row = 0.0;
      for (Eigen::Index q = 0; q < m; ++q) row += alpha.alpha(s, q);
      EXPECT_NEAR(row, static_cast<double>(m), 1e-12);
    }
  }
}

TEST(Omnibus, NamedConstructionsValidate) {
  for (Eigen::Index m : {2, 3, 5, 8}) {
    EXPECT_TRUE(validate_coeffs(classical_coeffs(m)).pass);
    EXPECT_TRUE(validate_coeffs(total_average_coeffs(m)).pass);
    EXPECT_TRUE(validate_coeffs(forward_coeffs(m)).pass);
    Vector w(m);
    for (Eigen::Index i = 0; i < m; ++i) w[i] = 1.0 + 0.5 * static_cast<double>(i);
    EXPECT_TRUE(validate_coeffs(weighted_pairwise_coeffs(w)).pass);
    EXPECT_TRUE(validate_coeffs(dampened_coeffs(w)).pass);
    if (m % 2 == 0) {
      EXPECT_TRUE(validate_coeffs(pair_preserving_coeffs(m)).pass);
    }
  }
}

TEST(Omnibus, ValidateRejectsBrokenTensors) {
  OmnibusCoefficients bad = classical_coeffs(3);
  bad.c[0](0, 1) += 0.2;  // breaks convexity
  EXPECT_FALSE(validate_coeffs(bad).pass);

  bad = classical_coeffs(3);
  bad.c[0](0, 1) = 0.7;  // breaks block symmetry: c[0](0,1) != c[0](1,0)
  EXPECT_FALSE(validate_coeffs(bad).pass);

  bad = total_average_coeffs(3);
  // Make every block the grand mean, including diagonals: row weights tie,
  // so strict dominance fails.
  for (auto& mat : bad.c) mat.setConstant(1.0 / 3.0);
  EXPECT_FALSE(validate_coeffs(bad).pass);

  bad = classical_coeffs(3);
  bad.c[0](1, 2) = -0.1;
  bad.c[0](2, 1) = -0.1;
  bad.c[1](1, 2) = 0.6;
  bad.c[1](2, 1) = 0.6;
  EXPECT_FALSE(validate_coeffs(bad).pass);  // negative coefficient
}

TEST(Omnibus, ExpectedOmnibusIsKroneckerOfP) {
  Rng rng = Rng::stream(83, 0, 1);
  Matrix block(2, 2);
  block << 0.7, 0.3, 0.3, 0.5;
  PointMassMixture f = sbm_to_mixture(block, Vector::Constant(2, 0.5));
  LatentPositions x = sample_latent(f, 9, rng);
  const Matrix p = x.edge_probabilities();
  for (int trial = 0; trial < 50; ++trial) {
    OmnibusCoefficients coeffs = random_valid_coeffs(2 + trial % 4, rng);
    Matrix expect = expected_omnibus(coeffs, p);
    for (Eigen::Index k = 0; k < coeffs.m; ++k) {
      for (Eigen::Index l = 0; l < coeffs.m; ++l) {
        EXPECT_LT((expect.block(9 * k, 9 * l, 9, 9) - p).norm(), 1e-12);
      }
    }
  }
}

TEST(Omnibus, BuildFromCollectionMatchesGraphVector) {
  Matrix block(2, 2);
  block << 0.7, 0.3, 0.3, 0.5;
  PointMassMixture f = sbm_to_mixture(block, Vector::Constant(2, 0.5));
  Rng rng = Rng::stream(89, 0, 2);
  LatentPositions x = sample_latent(f, 15, rng);
  GraphCollection coll = sample_forward(x, Vector::Constant(2, 0.4), 97, 0);
  OmnibusCoefficients coeffs = classical_coeffs(3);
  EXPECT_TRUE(build_omnibus(coeffs, coll).isApprox(
      build_omnibus(coeffs, coll.graphs), 0.0));
}

TEST(Omnibus, EmbedSplitsBlocks) {
  Rng rng = Rng::stream(101, 0, 0);
  auto graphs = random_graphs(2, 20, rng);
  Matrix omni = build_omnibus(classical_coeffs(2), graphs);
  BlockEmbedding be = omni_embed(omni, 2, 2);
  EXPECT_EQ(be.m, 2);
  EXPECT_EQ(be.n, 20);
  EXPECT_TRUE(be.block(0).isApprox(be.coords.topRows(20), 0.0));
  EXPECT_TRUE(be.block(1).isApprox(be.coords.bottomRows(20), 0.0));
}

}  // namespace
}  // namespace omnicorr
