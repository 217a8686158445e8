#include "embalign/kernels.hpp"

#include <cmath>
#include <cstdint>

#include <omp.h>

#include "embalign/error.hpp"

namespace embalign::kernels {
namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw NumericError(std::string(what) + ": shape mismatch " + shape_string(a) + " vs " +
                       shape_string(b));
  }
}

void require_map_shape(const Matrix& x, const RowMap& map) {
  const std::size_t d = x.cols();
  if (map.rotation.rows() != d || map.rotation.cols() != d || map.source_mean.size() != d ||
      map.target_mean.size() != d) {
    throw NumericError("transform of dimension " + std::to_string(map.rotation.rows()) +
                       " applied to rows of dimension " + std::to_string(d));
  }
}

// One output row of the cross-covariance. Accumulates over i in row order so
// serial and parallel schedules agree bit for bit.
inline void cross_covariance_row(const Matrix& a, const Matrix& b, std::size_t j,
                                 std::span<double> out) {
  const std::size_t d = a.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double bij = b(i, j);
    const auto ai = a.row(i);
    for (std::size_t k = 0; k < d; ++k) out[k] += bij * ai[k];
  }
}

inline void map_row(std::span<const double> x, const RowMap& map, std::span<double> centered,
                    std::span<double> out) {
  const std::size_t d = x.size();
  for (std::size_t k = 0; k < d; ++k) centered[k] = x[k] - map.source_mean[k];
  for (std::size_t k = 0; k < d; ++k) out[k] = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    const double c = centered[k];
    const auto r = map.rotation.row(k);
    for (std::size_t j = 0; j < d; ++j) out[j] += c * r[j];
  }
  for (std::size_t j = 0; j < d; ++j) out[j] = map.scale * out[j] + map.target_mean[j];
}

inline double squared_distance(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double diff = x[k] - y[k];
    s += diff * diff;
  }
  return s;
}

inline double score_row(std::span<const double> row, double row_norm,
                        std::span<const double> query, double query_norm, Similarity metric) {
  if (metric == Similarity::kEuclidean) return std::sqrt(squared_distance(row, query));
  const double denom = row_norm * query_norm;
  // A zero row has no direction; rank it below every real candidate.
  return denom > 0.0 ? dot(row, query) / denom : -2.0;
}

void require_scores_shape(const Matrix& x, std::span<const double> norms,
                          std::span<const double> query, Similarity metric) {
  if (query.size() != x.cols()) {
    throw NumericError("query of dimension " + std::to_string(query.size()) +
                       " against rows of dimension " + std::to_string(x.cols()));
  }
  if (metric == Similarity::kCosine && norms.size() != x.rows()) {
    throw NumericError("row norm count does not match row count");
  }
}

using Index = std::int64_t;

}  // namespace

namespace serial {

Matrix cross_covariance(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "cross_covariance");
  const std::size_t d = a.cols();
  Matrix h(d, d);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto ai = a.row(i);
    const auto bi = b.row(i);
    for (std::size_t j = 0; j < d; ++j) {
      const double bij = bi[j];
      auto hj = h.row(j);
      for (std::size_t k = 0; k < d; ++k) hj[k] += bij * ai[k];
    }
  }
  return h;
}

Matrix map_rows(const Matrix& x, const RowMap& map) {
  require_map_shape(x, map);
  Matrix out(x.rows(), x.cols());
  std::vector<double> centered(x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) map_row(x.row(i), map, centered, out.row(i));
  return out;
}

std::vector<double> row_squared_distances(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "row_squared_distances");
  std::vector<double> out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) out[i] = squared_distance(a.row(i), b.row(i));
  return out;
}

std::vector<double> row_dots(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "row_dots");
  std::vector<double> out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) out[i] = dot(a.row(i), b.row(i));
  return out;
}

std::vector<double> row_norms(const Matrix& x) {
  std::vector<double> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) out[i] = std::sqrt(squared_norm(x.row(i)));
  return out;
}

std::vector<double> scores(const Matrix& x, std::span<const double> norms,
                           std::span<const double> query, Similarity metric) {
  require_scores_shape(x, norms, query, metric);
  const double qn = std::sqrt(squared_norm(query));
  std::vector<double> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    out[i] = score_row(x.row(i), metric == Similarity::kCosine ? norms[i] : 0.0, query, qn,
                       metric);
  }
  return out;
}

}  // namespace serial

namespace parallel {

Matrix cross_covariance(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "cross_covariance");
  const Index d = static_cast<Index>(a.cols());
  Matrix h(a.cols(), a.cols());
#pragma omp parallel for schedule(static)
  for (Index j = 0; j < d; ++j) {
    cross_covariance_row(a, b, static_cast<std::size_t>(j), h.row(static_cast<std::size_t>(j)));
  }
  return h;
}

Matrix map_rows(const Matrix& x, const RowMap& map) {
  require_map_shape(x, map);
  Matrix out(x.rows(), x.cols());
  const Index n = static_cast<Index>(x.rows());
#pragma omp parallel
  {
    std::vector<double> centered(x.cols());
#pragma omp for schedule(static)
    for (Index i = 0; i < n; ++i) {
      const auto r = static_cast<std::size_t>(i);
      map_row(x.row(r), map, centered, out.row(r));
    }
  }
  return out;
}

std::vector<double> row_squared_distances(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "row_squared_distances");
  std::vector<double> out(a.rows());
  const Index n = static_cast<Index>(a.rows());
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) {
    const auto r = static_cast<std::size_t>(i);
    out[r] = squared_distance(a.row(r), b.row(r));
  }
  return out;
}

std::vector<double> row_dots(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "row_dots");
  std::vector<double> out(a.rows());
  const Index n = static_cast<Index>(a.rows());
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) {
    const auto r = static_cast<std::size_t>(i);
    out[r] = dot(a.row(r), b.row(r));
  }
  return out;
}

std::vector<double> row_norms(const Matrix& x) {
  std::vector<double> out(x.rows());
  const Index n = static_cast<Index>(x.rows());
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) {
    const auto r = static_cast<std::size_t>(i);
    out[r] = std::sqrt(squared_norm(x.row(r)));
  }
  return out;
}

std::vector<double> scores(const Matrix& x, std::span<const double> norms,
                           std::span<const double> query, Similarity metric) {
  require_scores_shape(x, norms, query, metric);
  const double qn = std::sqrt(squared_norm(query));
  std::vector<double> out(x.rows());
  const Index n = static_cast<Index>(x.rows());
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) {
    const auto r = static_cast<std::size_t>(i);
    out[r] = score_row(x.row(r), metric == Similarity::kCosine ? norms[r] : 0.0, query, qn,
                       metric);
  }
  return out;
}

}  // namespace parallel

namespace {
// Below this many multiply-adds the thread fork costs more than it saves.
constexpr std::size_t kParallelWorkThreshold = 1 << 15;

bool use_parallel(std::size_t work) {
  return work >= kParallelWorkThreshold && omp_get_max_threads() > 1;
}
}  // namespace

Matrix cross_covariance(const Matrix& a, const Matrix& b) {
  return use_parallel(a.rows() * a.cols() * a.cols()) ? parallel::cross_covariance(a, b)
                                                      : serial::cross_covariance(a, b);
}

Matrix map_rows(const Matrix& x, const RowMap& map) {
  return use_parallel(x.rows() * x.cols() * x.cols()) ? parallel::map_rows(x, map)
                                                      : serial::map_rows(x, map);
}

std::vector<double> row_squared_distances(const Matrix& a, const Matrix& b) {
  return use_parallel(a.rows() * a.cols()) ? parallel::row_squared_distances(a, b)
                                           : serial::row_squared_distances(a, b);
}

std::vector<double> row_dots(const Matrix& a, const Matrix& b) {
  return use_parallel(a.rows() * a.cols()) ? parallel::row_dots(a, b)
                                           : serial::row_dots(a, b);
}

std::vector<double> row_norms(const Matrix& x) {
  return use_parallel(x.rows() * x.cols()) ? parallel::row_norms(x) : serial::row_norms(x);
}

std::vector<double> scores(const Matrix& x, std::span<const double> norms,
                           std::span<const double> query, Similarity metric) {
  return use_parallel(x.rows() * x.cols()) ? parallel::scores(x, norms, query, metric)
                                           : serial::scores(x, norms, query, metric);
}

std::vector<double> column_means(const Matrix& x) {
  std::vector<double> mean(x.cols(), 0.0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto r = x.row(i);
    for (std::size_t k = 0; k < x.cols(); ++k) mean[k] += r[k];
  }
  const double inv = x.rows() == 0 ? 0.0 : 1.0 / static_cast<double>(x.rows());
  for (double& m : mean) m *= inv;
  return mean;
}

double ordered_sum(std::span<const double> values) noexcept {
  double s = 0.0;
  for (double v : values) s += v;
  return s;
}

void set_thread_count(int threads) {
  if (threads < 1) throw UsageError("thread count must be at least 1");
  omp_set_num_threads(threads);
}

int thread_count() { return omp_get_max_threads(); }

}  // namespace embalign::kernels
