#include "embalign/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "embalign/error.hpp"

namespace embalign {

double rmse(const Embedding& a, const Embedding& b) {
  require_same_shape(a, b, "rmse");
  const double total =
      kernels::ordered_sum(kernels::row_squared_distances(a.vectors(), b.vectors()));
  return std::sqrt(total / static_cast<double>(a.size()));
}

double avg_cosine(const Embedding& a, const Embedding& b) {
  require_same_shape(a, b, "avg_cosine");
  const auto dots = kernels::row_dots(a.vectors(), b.vectors());
  const auto na = kernels::row_norms(a.vectors());
  const auto nb = kernels::row_norms(b.vectors());
  double total = 0.0;
  for (std::size_t i = 0; i < dots.size(); ++i) {
    if (na[i] == 0.0 || nb[i] == 0.0) {
      throw NumericError("avg_cosine: zero row for word '" + a.word(i) + "'");
    }
    total += dots[i] / (na[i] * nb[i]);
  }
  return total / static_cast<double>(dots.size());
}

std::vector<double> fractional_ranks(std::span<const double> values) {
  const std::size_t m = values.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return values[x] < values[y]; });
  std::vector<double> ranks(m);
  std::size_t i = 0;
  while (i < m) {
    std::size_t j = i;
    while (j + 1 < m && values[order[j + 1]] == values[order[i]]) ++j;
    // Positions i..j (0-based) share ranks i+1..j+1.
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw NumericError("spearman: length mismatch " + std::to_string(x.size()) + " vs " +
                       std::to_string(y.size()));
  }
  if (x.size() < 2) throw NumericError("spearman: need at least 2 values");
  const auto rx = fractional_ranks(x);
  const auto ry = fractional_ranks(y);
  const double m = static_cast<double>(x.size());
  // Mean rank is (m+1)/2 regardless of ties.
  const double mean = 0.5 * (m + 1.0);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double dx = rx[i] - mean;
    const double dy = ry[i] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw NumericError("spearman: constant input");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

BruteForceIndex::BruteForceIndex(const Embedding& e)
    : embedding_(&e), norms_(kernels::row_norms(e.vectors())) {}

NeighborList BruteForceIndex::search(std::span<const double> query, std::size_t k,
                                     Similarity metric,
                                     std::span<const std::size_t> exclude_rows) const {
  const Embedding& e = *embedding_;
  if (query.size() != e.dim()) {
    throw NumericError("knn: query dimension " + std::to_string(query.size()) +
                       " does not match embedding " + shape_string(e));
  }
  for (double v : query) {
    if (!std::isfinite(v)) throw NumericError("knn: non-finite query");
  }
  if (metric == Similarity::kCosine && squared_norm(query) == 0.0) {
    throw NumericError("knn: zero query vector under cosine metric");
  }

  std::vector<bool> excluded(e.size(), false);
  std::size_t excluded_count = 0;
  for (std::size_t r : exclude_rows) {
    if (r < e.size() && !excluded[r]) {
      excluded[r] = true;
      ++excluded_count;
    }
  }
  const std::size_t available = e.size() - excluded_count;
  if (k == 0 || k > available) {
    throw NumericError("knn: k=" + std::to_string(k) + " but only " +
                       std::to_string(available) + " candidates");
  }

  const std::vector<double> s = kernels::scores(e.vectors(), norms_, query, metric);
  std::vector<std::size_t> candidates;
  candidates.reserve(available);
  for (std::size_t i = 0; i < e.size(); ++i)
    if (!excluded[i]) candidates.push_back(i);

  const bool higher_is_better = metric == Similarity::kCosine;
  auto better = [&](std::size_t x, std::size_t y) {
    if (s[x] != s[y]) return higher_is_better ? s[x] > s[y] : s[x] < s[y];
    return x < y;
  };
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(k),
                    candidates.end(), better);

  NeighborList out;
  out.metric = metric;
  out.neighbors.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t r = candidates[i];
    out.neighbors.push_back({e.word(r), r, s[r]});
  }
  return out;
}

NeighborList BruteForceIndex::search(std::span<const double> query, std::size_t k,
                                     Similarity metric,
                                     const std::unordered_set<std::string>& exclude) const {
  std::vector<std::size_t> rows;
  for (const auto& w : exclude) {
    if (auto idx = embedding_->index_of(w)) rows.push_back(*idx);
  }
  return search(query, k, metric, rows);
}

NeighborList knn(const Embedding& e, std::span<const double> query, std::size_t k,
                 Similarity metric, const std::unordered_set<std::string>& exclude) {
  return BruteForceIndex(e).search(query, k, metric, exclude);
}

}  // namespace embalign
