#pragma once

// Row-parallel numeric kernels.
//
// Every kernel has a serial reference in `serial::` and an OpenMP version in
// `parallel::`. The parallel versions split work over rows (or output rows)
// and never reorder a floating-point accumulation, so both paths produce
// bit-identical results. Reductions to a scalar go through a per-row buffer
// summed afterwards in row order.
//
// The unqualified entry points dispatch on the current thread budget.

#include <cstddef>
#include <span>
#include <vector>

#include "embalign/matrix.hpp"

namespace embalign::kernels {

enum class Similarity { kCosine, kEuclidean };

/// Affine row map x ↦ scale·(x − source_mean)·rotation + target_mean.
struct RowMap {
  const Matrix& rotation;
  double scale;
  std::span<const double> source_mean;
  std::span<const double> target_mean;
};

namespace serial {
Matrix cross_covariance(const Matrix& a, const Matrix& b);
Matrix map_rows(const Matrix& x, const RowMap& map);
std::vector<double> row_squared_distances(const Matrix& a, const Matrix& b);
std::vector<double> row_dots(const Matrix& a, const Matrix& b);
std::vector<double> row_norms(const Matrix& x);
std::vector<double> scores(const Matrix& x, std::span<const double> row_norms,
                           std::span<const double> query, Similarity metric);
}  // namespace serial

namespace parallel {
Matrix cross_covariance(const Matrix& a, const Matrix& b);
Matrix map_rows(const Matrix& x, const RowMap& map);
std::vector<double> row_squared_distances(const Matrix& a, const Matrix& b);
std::vector<double> row_dots(const Matrix& a, const Matrix& b);
std::vector<double> row_norms(const Matrix& x);
std::vector<double> scores(const Matrix& x, std::span<const double> row_norms,
                           std::span<const double> query, Similarity metric);
}  // namespace parallel

/// H[j][k] = Σ_i b[i][j]·a[i][k], i.e. Σ_i b_iᵀ a_i for row vectors.
Matrix cross_covariance(const Matrix& a, const Matrix& b);
Matrix map_rows(const Matrix& x, const RowMap& map);
std::vector<double> row_squared_distances(const Matrix& a, const Matrix& b);
std::vector<double> row_dots(const Matrix& a, const Matrix& b);
std::vector<double> row_norms(const Matrix& x);

/// Cosine similarity (higher is closer) or Euclidean distance (lower is
/// closer) of each row to the query. `row_norms` is only read for cosine.
std::vector<double> scores(const Matrix& x, std::span<const double> row_norms,
                           std::span<const double> query, Similarity metric);

/// Column means with a fixed summation order.
std::vector<double> column_means(const Matrix& x);

/// Left-to-right sum.
double ordered_sum(std::span<const double> values) noexcept;

/// Caps the OpenMP worker count. 1 selects the serial kernels.
void set_thread_count(int threads);
int thread_count();

}  // namespace embalign::kernels
