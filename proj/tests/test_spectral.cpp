#include <gtest/gtest.h>

#include "omnicorr/rng.hpp"
#include "omnicorr/spectral.hpp"

namespace omnicorr {
namespace {

Matrix random_gaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Matrix out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) out(i, j) = rng.normal();
  }
  return out;
}

// Orthogonal matrix from the QR factorization of a Gaussian draw, with a
// random reflection mixed in.
Matrix random_orthogonal(Eigen::Index d, Rng& rng) {
  Matrix g = random_gaussian(d, d, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  if (rng.bernoulli(0.5)) q.col(0) = -q.col(0);
  return q;
}

TEST(Spectral, TopEigenpairsReconstructFullMatrix) {
  Rng rng = Rng::stream(7, 0, 0);
  const Eigen::Index n = 25;
  Matrix g = random_gaussian(n, n, rng);
  Matrix a = 0.5 * (g + g.transpose());
  // Oracle: taking all n pairs must reconstruct A exactly, whatever the
  // ordering and sign conventions did.
  SpectralPair full = eig_top_by_magnitude(a, n);
  Vector signed_values = full.values;
  for (Eigen::Index k = 0; k < n; ++k) {
    signed_values[k] *= full.signs[static_cast<std::size_t>(k)];
  }
  Matrix rebuilt =
      full.vectors * signed_values.asDiagonal() * full.vectors.transpose();
  EXPECT_LT((rebuilt - a).norm(), 1e-10);
  // Magnitude ordering.
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    EXPECT_GE(std::abs(full.values[i]), std::abs(full.values[i + 1]) - 1e-12);
  }
  // Sign convention: the largest-magnitude entry of each vector is >= 0.
  for (Eigen::Index j = 0; j < n; ++j) {
    Eigen::Index arg = 0;
    full.vectors.col(j).cwiseAbs().maxCoeff(&arg);
    EXPECT_GE(full.vectors(arg, j), 0.0);
  }
}

TEST(Spectral, TopPairsSelectedByMagnitudeNotValue) {
  // Eigenvalues 5, -4, 1: top-2 by magnitude are {5, -4}.
  Matrix a = Matrix::Zero(3, 3);
  a(0, 0) = 5.0;
  a(1, 1) = -4.0;
  a(2, 2) = 1.0;
  SpectralPair top = eig_top_by_magnitude(a, 2);
  EXPECT_DOUBLE_EQ(top.values[0], 5.0);
  EXPECT_DOUBLE_EQ(top.values[1], 4.0);
  EXPECT_EQ(top.signs[0], 1);
  EXPECT_EQ(top.signs[1], -1);
}

TEST(Spectral, AseRecoversGramOfLowRankMatrix) {
  Rng rng = Rng::stream(11, 0, 0);
  const Eigen::Index n = 40, d = 3;
  Matrix x = random_gaussian(n, d, rng);
  Matrix p = x * x.transpose();  // PSD rank-d
  Embedding e = ase(p, d);
  EXPECT_EQ(e.rows, n);
  EXPECT_EQ(e.dim, d);
  EXPECT_LT((e.coords * e.coords.transpose() - p).norm(), 1e-9 * p.norm());
}

TEST(Spectral, AseIsDeterministic) {
  Rng rng = Rng::stream(13, 0, 0);
  Matrix g = random_gaussian(30, 30, rng);
  Matrix a = 0.5 * (g + g.transpose());
  Embedding e1 = ase(a, 4);
  Embedding e2 = ase(a, 4);
  EXPECT_TRUE(e1.coords.isApprox(e2.coords, 0.0));
}

TEST(Spectral, ProcrustesRecoversPlantedRotation) {
  // Oracle: plant a known orthogonal W on a large point cloud; the
  // minimizer must undo it exactly.
  Rng rng = Rng::stream(17, 0, 0);
  for (int trial = 0; trial < 25; ++trial) {
    const Eigen::Index n = 400, d = 3;
    Matrix x = random_gaussian(n, d, rng);
    Matrix w = random_orthogonal(d, rng);
    Embedding ex(x), ey(Matrix(x * w));
    Matrix w_hat = procrustes(ex, ey);
    EXPECT_LT((w_hat - w).norm(), 1e-10);
    EXPECT_LT((w_hat.transpose() * w_hat - Matrix::Identity(d, d)).norm(), 1e-12);
  }
}

TEST(Spectral, ProcrustesBeatsOtherRotationsUnderNoise) {
  Rng rng = Rng::stream(19, 0, 0);
  const Eigen::Index n = 200, d = 2;
  Matrix x = random_gaussian(n, d, rng);
  Matrix w = random_orthogonal(d, rng);
  Matrix y = x * w + 0.05 * random_gaussian(n, d, rng);
  Embedding ex(x), ey(y);
  Matrix w_hat = procrustes(ex, ey);
  const double best = (x * w_hat - y).norm();
  for (int trial = 0; trial < 50; ++trial) {
    Matrix other = random_orthogonal(d, rng);
    EXPECT_LE(best, (x * other - y).norm() + 1e-12);
  }
}

TEST(Spectral, CmdsRecoversDistancesFromPlantedConfiguration) {
  // Oracle: generate points, compute distances, embed, and demand the
  // recovered configuration reproduce every pairwise distance.
  Rng rng = Rng::stream(23, 0, 0);
  const Eigen::Index n = 30, d = 2;
  Matrix x = random_gaussian(n, d, rng);
  Matrix dist(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      dist(i, j) = (x.row(i) - x.row(j)).norm();
    }
  }
  Embedding e = cmds(dist, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      EXPECT_NEAR((e.coords.row(i) - e.coords.row(j)).norm(), dist(i, j), 1e-8);
    }
  }
}

TEST(Spectral, ElbowFindsObviousGap) {
  Vector v1(5);
  v1 << 10.0, 9.5, 1.0, 0.9, 0.8;
  EXPECT_EQ(elbow_dimension(v1), 2);
  Vector v2(4);
  v2 << 10.0, 1.0, 1.0, 1.0;
  EXPECT_EQ(elbow_dimension(v2), 1);
  Vector v3(6);
  v3 << 8.0, 7.9, 7.8, 0.2, 0.1, 0.05;
  EXPECT_EQ(elbow_dimension(v3), 3);
}

TEST(Spectral, ElbowRejectsDegenerateInput) {
  Vector v(1);
  v << 3.0;
  EXPECT_THROW(elbow_dimension(v), std::invalid_argument);
  Vector asc(3);
  asc << 1.0, 2.0, 3.0;
  EXPECT_THROW(elbow_dimension(asc), std::invalid_argument);
}

}  // namespace
}  // namespace omnicorr
