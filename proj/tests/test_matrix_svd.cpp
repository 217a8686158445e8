#include <gtest/gtest.h>

#include <random>

#include "embalign/error.hpp"
#include "embalign/matrix.hpp"
#include "embalign/svd.hpp"
#include "oracles.hpp"

using namespace embalign;

namespace {

double reconstruction_error(const Matrix& h, const SvdResult& svd) {
  const Matrix rebuilt = svd.u * Matrix::diagonal(svd.singular_values) * svd.v_t;
  return frobenius_norm(rebuilt - h) / std::max(frobenius_norm(h), 1e-300);
}

void expect_valid_svd(const Matrix& h, const SvdResult& svd) {
  EXPECT_LT(reconstruction_error(h, svd), 1e-9);
  EXPECT_LT(orthogonality_error(svd.u), 1e-12);
  EXPECT_LT(orthogonality_error(svd.v_t), 1e-12);
  for (std::size_t i = 0; i < svd.singular_values.size(); ++i) {
    EXPECT_GE(svd.singular_values[i], 0.0);
    if (i > 0) EXPECT_LE(svd.singular_values[i], svd.singular_values[i - 1]);
  }
}

}  // namespace

TEST(Matrix, DeterminantMatchesEigen) {
  std::mt19937_64 rng(7);
  for (std::size_t d : {1u, 2u, 5u, 12u}) {
    const Matrix m = oracle::gaussian_matrix(d, d, rng);
    const double expected = oracle::to_eigen(m).determinant();
    EXPECT_NEAR(determinant(m), expected, 1e-10 * std::max(1.0, std::abs(expected)));
  }
  EXPECT_EQ(determinant(Matrix(3, 3)), 0.0);
}

TEST(Matrix, MultiplyShapeMismatchThrows) {
  EXPECT_THROW(Matrix(2, 3) * Matrix(2, 3), NumericError);
}

TEST(Svd, IdentityHasUnitSingularValues) {
  const SvdResult svd = svd_small(Matrix::identity(3));
  for (double s : svd.singular_values) EXPECT_DOUBLE_EQ(s, 1.0);
  expect_valid_svd(Matrix::identity(3), svd);
}

TEST(Svd, DiagonalSignAbsorbedByFactors) {
  const Matrix h = Matrix::diagonal(std::vector<double>{3.0, -2.0});
  const SvdResult svd = svd_small(h);
  EXPECT_DOUBLE_EQ(svd.singular_values[0], 3.0);
  EXPECT_DOUBLE_EQ(svd.singular_values[1], 2.0);
  expect_valid_svd(h, svd);
}

TEST(Svd, RandomMatchesGramEigenvalues) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix h = oracle::gaussian_matrix(4, 4, rng);
    const SvdResult svd = svd_small(h);
    expect_valid_svd(h, svd);
    const auto expected = oracle::singular_values_via_gram(h);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(svd.singular_values[i], expected[i], 1e-9);
  }
}

TEST(Svd, RankDeficientInputKeepsOrthogonalFactors) {
  std::mt19937_64 rng(3);
  const Matrix x = oracle::gaussian_matrix(6, 2, rng);
  const Matrix h = x * x.transposed();  // rank 2
  const SvdResult svd = svd_small(h);
  expect_valid_svd(h, svd);
  EXPECT_LT(svd.singular_values[2], 1e-12 * svd.singular_values[0]);

  const SvdResult zero = svd_small(Matrix(4, 4));
  EXPECT_LT(orthogonality_error(zero.u), 1e-14);
  for (double s : zero.singular_values) EXPECT_EQ(s, 0.0);
}

TEST(Svd, LargeDimensionConverges) {
  std::mt19937_64 rng(5);
  const Matrix h = oracle::gaussian_matrix(120, 120, rng);
  const SvdResult svd = svd_small(h);
  expect_valid_svd(h, svd);
  const auto expected = oracle::singular_values_via_gram(h);
  for (std::size_t i = 0; i < 120; ++i)
    EXPECT_NEAR(svd.singular_values[i], expected[i], 1e-9 * expected[0]);
}

TEST(Svd, DeterministicForFixedInput) {
  std::mt19937_64 rng(9);
  const Matrix h = oracle::gaussian_matrix(8, 8, rng);
  const SvdResult a = svd_small(h);
  const SvdResult b = svd_small(h);
  EXPECT_EQ(a.u, b.u);
  EXPECT_EQ(a.v_t, b.v_t);
  EXPECT_EQ(a.singular_values, b.singular_values);
}

TEST(Svd, RejectsBadInput) {
  EXPECT_THROW(svd_small(Matrix(2, 3)), NumericError);
  Matrix h = Matrix::identity(2);
  h(0, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(svd_small(h), NumericError);
}

TEST(Svd, SweepCapReportsNonConvergence) {
  std::mt19937_64 rng(13);
  const Matrix h = oracle::gaussian_matrix(10, 10, rng);
  SvdOptions opts;
  opts.max_sweeps = 1;
  EXPECT_THROW(svd_small(h, opts), NumericError);
}

TEST(RotationFromSvd, IdentityFactorsGiveIdentity) {
  SvdResult svd{Matrix::identity(3), {1, 1, 1}, Matrix::identity(3), 0};
  EXPECT_EQ(rotation_from_svd(svd, false), Matrix::identity(3));
  EXPECT_EQ(rotation_from_svd(svd, true), Matrix::identity(3));
}

TEST(RotationFromSvd, ProperFlagRemovesReflection) {
  // U·Vᵀ = diag(1, 1, −1) is a reflection.
  SvdResult svd{Matrix::diagonal(std::vector<double>{1, 1, -1}), {3, 2, 1}, Matrix::identity(3),
                0};
  EXPECT_NEAR(determinant(rotation_from_svd(svd, false)), -1.0, 1e-12);
  const Matrix r = rotation_from_svd(svd, true);
  EXPECT_NEAR(determinant(r), 1.0, 1e-12);
  EXPECT_LT(orthogonality_error(r), 1e-12);
}

TEST(RotationFromSvd, RandomFactorsStayOrthogonal) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const SvdResult svd = svd_small(oracle::gaussian_matrix(7, 7, rng));
    for (bool proper : {false, true}) {
      const Matrix r = rotation_from_svd(svd, proper);
      EXPECT_LT(orthogonality_error(r), 1e-10);
      if (proper) EXPECT_NEAR(determinant(r), 1.0, 1e-10);
    }
  }
}
