#include <gtest/gtest.h>

#include "omnicorr/models.hpp"

namespace omnicorr {
namespace {

PointMassMixture example_mixture() {
  Matrix block(2, 2);
  block << 0.7, 0.3, 0.3, 0.5;
  Vector pi = Vector::Constant(2, 0.5);
  return sbm_to_mixture(block, pi);
}

TEST(Models, SbmToMixtureReproducesBlockMatrix) {
  Matrix block(2, 2);
  block << 0.7, 0.3, 0.3, 0.5;
  PointMassMixture f = sbm_to_mixture(block, Vector::Constant(2, 0.5));
  EXPECT_EQ(f.size(), 2);
  Matrix gram = f.atoms * f.atoms.transpose();
  EXPECT_LT((gram - block).norm(), 1e-12);
}

TEST(Models, SbmToMixtureDropsRankDeficiency) {
  // Rank-1 block matrix: both atoms live in one dimension.
  Matrix block(2, 2);
  block << 0.64, 0.48, 0.48, 0.36;
  PointMassMixture f = sbm_to_mixture(block, Vector::Constant(2, 0.5));
  EXPECT_EQ(f.atoms.cols(), 1);
  Matrix gram = f.atoms * f.atoms.transpose();
  EXPECT_LT((gram - block).norm(), 1e-12);
}

TEST(Models, SbmToMixtureRejectsIndefiniteBlock) {
  Matrix block(2, 2);
  block << 0.1, 0.9, 0.9, 0.1;  // eigenvalues 1.0, -0.8
  EXPECT_THROW(sbm_to_mixture(block, Vector::Constant(2, 0.5)),
               std::invalid_argument);
}

TEST(Models, CorrForwardIsProductOfSteps) {
  Vector steps(3);
  steps << 0.5, 0.8, 0.25;
  CorrelationSpec spec = corr_forward(steps);
  EXPECT_EQ(spec.m, 4);
  EXPECT_DOUBLE_EQ(spec.r(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(spec.r(0, 2), 0.4);
  EXPECT_DOUBLE_EQ(spec.r(0, 3), 0.1);
  EXPECT_DOUBLE_EQ(spec.r(1, 3), 0.2);
  for (Eigen::Index i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(spec.r(i, i), 1.0);
  EXPECT_TRUE(spec.r.isApprox(spec.r.transpose(), 0.0));
}

TEST(Models, CorrGeneratorIsRankOnePlusDiagonal) {
  Vector nu(3);
  nu << 0.9, 0.5, 0.2;
  CorrelationSpec spec = corr_generator(nu);
  EXPECT_DOUBLE_EQ(spec.r(0, 1), 0.45);
  EXPECT_DOUBLE_EQ(spec.r(0, 2), 0.18);
  EXPECT_DOUBLE_EQ(spec.r(1, 2), 0.1);
  for (Eigen::Index i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(spec.r(i, i), 1.0);
}

TEST(Models, CorrelationSpecRejectsInvalidMatrices) {
  Matrix bad(2, 2);
  bad << 1.0, -0.2, -0.2, 1.0;  // negative correlation unsupported
  EXPECT_THROW(CorrelationSpec{bad}, std::invalid_argument);
  bad << 1.0, 1.2, 1.2, 1.0;  // above 1
  EXPECT_THROW(CorrelationSpec{bad}, std::invalid_argument);
  bad << 0.9, 0.5, 0.5, 1.0;  // non-unit diagonal
  EXPECT_THROW(CorrelationSpec{bad}, std::invalid_argument);
}

TEST(Models, SamplersAreDeterministicPerSeedAndReplicate) {
  PointMassMixture f = example_mixture();
  Rng r1 = Rng::stream(5, 0, 1);
  Rng r2 = Rng::stream(5, 0, 1);
  LatentPositions x1 = sample_latent(f, 50, r1);
  LatentPositions x2 = sample_latent(f, 50, r2);
  EXPECT_TRUE(x1.positions.isApprox(x2.positions, 0.0));

  Vector steps = Vector::Constant(1, 0.5);
  GraphCollection a = sample_forward(x1, steps, 99, 0);
  GraphCollection b = sample_forward(x2, steps, 99, 0);
  GraphCollection c = sample_forward(x1, steps, 99, 1);
  EXPECT_TRUE(a.graphs[0].isApprox(b.graphs[0], 0.0));
  EXPECT_TRUE(a.graphs[1].isApprox(b.graphs[1], 0.0));
  EXPECT_FALSE(a.graphs[0].isApprox(c.graphs[0], 0.0));
}

TEST(Models, AdjacencyIsSymmetricHollowBinary) {
  PointMassMixture f = example_mixture();
  Rng rng = Rng::stream(21, 0, 2);
  LatentPositions x = sample_latent(f, 80, rng);
  GraphCollection coll = sample_forward(x, Vector::Constant(2, 0.3), 21, 0);
  for (const Matrix& a : coll.graphs) {
    EXPECT_TRUE(a.isApprox(a.transpose(), 0.0));
    EXPECT_DOUBLE_EQ(a.diagonal().cwiseAbs().sum(), 0.0);
    EXPECT_TRUE(((a.array() == 0.0) || (a.array() == 1.0)).all());
  }
}

// MC oracle: the single-edge marginal frequency over many replicates sits
// inside a 3-sigma binomial band around p_ij.
TEST(Models, MarginalEdgeFrequencyMatchesP) {
  PointMassMixture f = example_mixture();
  Rng rng = Rng::stream(31, 0, 3);
  LatentPositions x = sample_latent(f, 10, rng);
  const Matrix p = x.edge_probabilities();
  const int reps = 2000;
  Matrix freq0 = Matrix::Zero(10, 10), freq1 = Matrix::Zero(10, 10);
  for (int rep = 0; rep < reps; ++rep) {
    GraphCollection coll = sample_forward(x, Vector::Constant(1, 0.6), 31,
                                          static_cast<std::uint64_t>(rep));
    freq0 += coll.graphs[0];
    freq1 += coll.graphs[1];
  }
  freq0 /= reps;
  freq1 /= reps;
  for (Eigen::Index i = 0; i < 10; ++i) {
    for (Eigen::Index j = i + 1; j < 10; ++j) {
      const double sd = std::sqrt(p(i, j) * (1 - p(i, j)) / reps);
      EXPECT_NEAR(freq0(i, j), p(i, j), 3 * sd + 1e-12);
      EXPECT_NEAR(freq1(i, j), p(i, j), 3 * sd + 1e-12);
    }
  }
}

// MC oracle: single-edge empirical correlation over replicates matches the
// target R entry within 3 sigma for both samplers.
TEST(Models, SingleEdgeCorrelationMatchesR) {
  PointMassMixture f = example_mixture();
  Rng rng = Rng::stream(37, 0, 4);
  LatentPositions x = sample_latent(f, 6, rng);
  const Matrix p = x.edge_probabilities();
  const int reps = 2000;
  const Eigen::Index i = 0, j = 1;
  const double pij = p(i, j);

  auto run = [&](bool generator, double param, double target) {
    double sum = 0.0;
    for (int rep = 0; rep < reps; ++rep) {
      GraphCollection coll =
          generator
              ? sample_generator(x, Vector::Constant(2, param), 41,
                                 static_cast<std::uint64_t>(rep))
              : sample_forward(x, Vector::Constant(1, param), 43,
                               static_cast<std::uint64_t>(rep));
      const double za = (coll.graphs[0](i, j) - pij);
      const double zb = (coll.graphs[1](i, j) - pij);
      sum += za * zb / (pij * (1 - pij));
    }
    const double rho_hat = sum / reps;
    // Var of the product of two standardized correlated Bernoullis is
    // bounded by a small constant; 3/sqrt(reps) with slack covers it.
    EXPECT_NEAR(rho_hat, target, 5.0 / std::sqrt(static_cast<double>(reps)));
  };
  run(false, 0.5, 0.5);                  // forward, step rho = 0.5
  run(true, std::sqrt(0.6), 0.6);        // generator, nu^2 = 0.6
}

TEST(Models, EmpiricalEdgeCorrelationNearTargetAcrossEdges) {
  PointMassMixture f = example_mixture();
  Rng rng = Rng::stream(47, 0, 5);
  LatentPositions x = sample_latent(f, 300, rng);
  GraphCollection coll = sample_forward(x, Vector::Constant(1, 0.5), 51, 0);
  const double rho_hat =
      empirical_edge_correlation(coll.graphs[0], coll.graphs[1], x);
  EXPECT_NEAR(rho_hat, 0.5, 0.02);
}

TEST(Models, GeneratorCollectionCarriesSpec) {
  PointMassMixture f = example_mixture();
  Rng rng = Rng::stream(53, 0, 6);
  LatentPositions x = sample_latent(f, 20, rng);
  Vector nu(3);
  nu << 0.7, 0.7, 0.7;
  GraphCollection coll = sample_generator(x, nu, 61, 0);
  EXPECT_EQ(coll.m, 3);
  EXPECT_NEAR(coll.spec.r(0, 1), 0.49, 1e-15);
  EXPECT_NEAR(coll.spec.r(1, 2), 0.49, 1e-15);
}

TEST(Models, ZeroStepGivesIndependentGraphs) {
  PointMassMixture f = example_mixture();
  Rng rng = Rng::stream(59, 0, 7);
  LatentPositions x = sample_latent(f, 300, rng);
  GraphCollection coll = sample_forward(x, Vector::Constant(1, 0.0), 67, 0);
  const double rho_hat =
      empirical_edge_correlation(coll.graphs[0], coll.graphs[1], x);
  EXPECT_NEAR(rho_hat, 0.0, 0.02);
}

}  // namespace
}  // namespace omnicorr
