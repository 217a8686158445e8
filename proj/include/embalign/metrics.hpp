#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "embalign/embedding.hpp"
#include "embalign/kernels.hpp"

namespace embalign {

using kernels::Similarity;

/// sqrt((1/n)·Σ‖a_i − b_i‖²).
double rmse(const Embedding& a, const Embedding& b);

/// (1/n)·Σ cos(a_i, b_i). Zero rows are an error.
double avg_cosine(const Embedding& a, const Embedding& b);

/// Pearson correlation of fractional (tie-averaged) ranks.
double spearman(std::span<const double> x, std::span<const double> y);

/// 1-based ranks with ties sharing their average rank.
std::vector<double> fractional_ranks(std::span<const double> values);

struct Neighbor {
  std::string word;
  std::size_t index = 0;
  double score = 0.0;
};

/// Best first: nonincreasing cosine or nondecreasing Euclidean distance.
/// Equal scores are ordered by ascending vocabulary index.
struct NeighborList {
  std::string query_word;
  Similarity metric = Similarity::kCosine;
  std::vector<Neighbor> neighbors;
};

/// Exact brute-force nearest-neighbor search over one embedding. Caches row
/// norms so repeated cosine queries do not recompute them.
class BruteForceIndex {
 public:
  explicit BruteForceIndex(const Embedding& e);

  const Embedding& embedding() const noexcept { return *embedding_; }

  NeighborList search(std::span<const double> query, std::size_t k, Similarity metric,
                      std::span<const std::size_t> exclude_rows = {}) const;

  NeighborList search(std::span<const double> query, std::size_t k, Similarity metric,
                      const std::unordered_set<std::string>& exclude) const;

 private:
  const Embedding* embedding_;
  std::vector<double> norms_;
};

/// One-shot search; see BruteForceIndex.
NeighborList knn(const Embedding& e, std::span<const double> query, std::size_t k,
                 Similarity metric, const std::unordered_set<std::string>& exclude = {});

}  // namespace embalign
