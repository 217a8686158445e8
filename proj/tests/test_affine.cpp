#include <gtest/gtest.h>

#include <random>

#include "embalign/affine.hpp"
#include "embalign/error.hpp"
#include "embalign/metrics.hpp"
#include "embalign/orientation.hpp"
#include "oracles.hpp"

using namespace embalign;

TEST(FitAffine, SelfFitWithoutRidgeIsIdentity) {
  std::mt19937_64 rng(1);
  const Embedding a = oracle::random_embedding(100, 5, rng);
  const AffineTransform t = fit_affine(a, a, {.gamma = 0.0});
  EXPECT_LT(max_abs_difference(t.matrix, Matrix::identity(5)), 1e-4);
  EXPECT_TRUE(t.converged);
  EXPECT_TRUE(t.warnings.empty());
}

TEST(FitAffine, HeavyRidgeShrinksToZero) {
  std::mt19937_64 rng(2);
  const Embedding a = oracle::random_embedding(50, 4, rng);
  const Embedding b = oracle::random_embedding(50, 4, rng);
  const double bta = frobenius_norm(oracle::triple_loop_cross_covariance(a.vectors(), b.vectors()));
  const AffineTransform t = fit_affine(a, b, {.gamma = 1e6 * bta});
  EXPECT_LT(frobenius_norm(t.matrix), 1e-5);
}

TEST(FitAffine, MatchesRidgeNormalEquations) {
  std::mt19937_64 rng(3);
  for (double gamma : {0.1, 0.0, 3.0}) {
    const Embedding a = oracle::random_embedding(100, 5, rng);
    const Embedding b = oracle::random_embedding(100, 5, rng);
    const AffineTransform t = fit_affine(a, b, {.gamma = gamma});
    const Matrix m = oracle::ridge_normal_equations(a.vectors(), b.vectors(), gamma);
    const double expected = oracle::ridge_objective(a.vectors(), b.vectors(), m, gamma);
    EXPECT_NEAR(t.final_objective, expected, 1e-6 * expected) << "gamma=" << gamma;
    EXPECT_NEAR(affine_objective(a, b, t.matrix, gamma), t.final_objective, 1e-9 * expected);
    EXPECT_LT(max_abs_difference(t.matrix, m), 1e-4);
  }
}

TEST(FitAffine, ObjectiveTraceIsMonotone) {
  std::mt19937_64 rng(4);
  const Embedding a = oracle::random_embedding(80, 6, rng);
  const Embedding b = oracle::random_embedding(80, 6, rng, 2.0);
  const AffineTransform t = fit_affine(a, b);
  ASSERT_GE(t.objective_trace.size(), 2u);
  for (std::size_t i = 1; i < t.objective_trace.size(); ++i)
    EXPECT_LE(t.objective_trace[i], t.objective_trace[i - 1] * (1 + 1e-12));
  EXPECT_GE(t.final_objective, 0.0);
}

TEST(FitAffine, DivergentLearningRateThrows) {
  std::mt19937_64 rng(5);
  const Embedding a = oracle::random_embedding(40, 3, rng);
  const Embedding b = oracle::random_embedding(40, 3, rng);
  EXPECT_THROW(fit_affine(a, b, {.gamma = 0.0, .learning_rate = 10.0}), NumericError);
}

TEST(FitAffine, RejectsBadOptions) {
  std::mt19937_64 rng(6);
  const Embedding a = oracle::random_embedding(10, 2, rng);
  EXPECT_THROW(fit_affine(a, a, {.gamma = -1.0}), UsageError);
}

TEST(ApplyAffine, IdentityAndRotationRecovery) {
  std::mt19937_64 rng(7);
  const Embedding a = oracle::random_embedding(300, 8, rng);
  AffineTransform id;
  id.matrix = Matrix::identity(8);
  EXPECT_EQ(apply_affine(a, id).vectors(), a.vectors());

  const Embedding b = oracle::transform_rows(a, oracle::random_orthogonal(8, rng));
  const AffineTransform t = fit_affine(a, b, {.gamma = 0.0});
  const double affine_rmse = rmse(a, apply_affine(b, t));
  EXPECT_LT(affine_rmse, 1e-3);
  EXPECT_LE(affine_rmse, rmse(a, ao_rotation(a, b).aligned) + 1e-6);

  AffineTransform wrong;
  wrong.matrix = Matrix::identity(3);
  EXPECT_THROW(apply_affine(a, wrong), NumericError);
}

TEST(ApplyAffine, DistortsPairwiseDistances) {
  std::mt19937_64 rng(8);
  const Embedding b = oracle::random_embedding(60, 4, rng);
  // Anisotropic target: stretch one axis, squash another.
  const Matrix stretch = Matrix::diagonal(std::vector<double>{3.0, 0.3, 1.0, 1.0});
  const Embedding a = oracle::transform_rows(b, stretch);
  const Embedding mapped = apply_affine(b, fit_affine(a, b, {.gamma = 0.0}));
  double worst = 0.0;
  for (std::size_t i = 0; i < 10; ++i)
    for (std::size_t j = i + 1; j < 10; ++j) {
      double before = 0.0, after = 0.0;
      for (std::size_t k = 0; k < 4; ++k) {
        before += std::pow(b.row(i)[k] - b.row(j)[k], 2);
        after += std::pow(mapped.row(i)[k] - mapped.row(j)[k], 2);
      }
      worst = std::max(worst, std::abs(std::sqrt(after) - std::sqrt(before)));
    }
  EXPECT_GT(worst, 0.01);
}

TEST(FitAffine, OverfitsRelativeToRotationOnHeldOutPairs) {
  // Few training pairs relative to d: the unconstrained map fits the training
  // rows better but generalizes worse than the orthogonal one.
  std::mt19937_64 rng(9);
  const std::size_t d = 20;
  const Embedding truth = oracle::random_embedding(200, d, rng);
  const Embedding src = oracle::transform_rows(truth, oracle::random_orthogonal(d, rng));
  std::normal_distribution<double> normal(0.0, 0.3);
  Matrix noisy = src.vectors();
  for (double& v : noisy.data()) v += normal(rng);
  const Embedding b = src.with_vectors(noisy);
  std::vector<std::size_t> train, test;
  for (std::size_t i = 0; i < 200; ++i) (i < 25 ? train : test).push_back(i);
  const Embedding a_tr = truth.subset(train), b_tr = b.subset(train);
  const AffineTransform aff = fit_affine(a_tr, b_tr, {.gamma = 0.0, .max_iters = 20000});
  const RotationFit rot = ao_rotation(a_tr, b_tr);
  EXPECT_LT(rmse(a_tr, apply_affine(b_tr, aff)), rmse(a_tr, rot.aligned));
  EXPECT_GT(rmse(truth.subset(test), apply_affine(b.subset(test), aff)),
            rmse(truth.subset(test), apply_transform(b.subset(test), rot.transform)));
}
