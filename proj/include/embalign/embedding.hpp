#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "embalign/matrix.hpp"

namespace embalign {

/// Ordered vocabulary paired with an n×d matrix; row i is the vector of word i.
///
/// Construction validates the invariants: n ≥ 1, d ≥ 1, unique words, one word
/// per row, finite entries. Violations throw NumericError.
class Embedding {
 public:
  Embedding(std::vector<std::string> words, Matrix vectors);

  std::size_t size() const noexcept { return words_.size(); }
  std::size_t dim() const noexcept { return vectors_.cols(); }

  const std::vector<std::string>& words() const noexcept { return words_; }
  const Matrix& vectors() const noexcept { return vectors_; }
  const std::string& word(std::size_t i) const { return words_.at(i); }

  std::span<const double> row(std::size_t i) const noexcept { return vectors_.row(i); }
  std::optional<std::size_t> index_of(const std::string& word) const;
  bool contains(const std::string& word) const { return index_.contains(word); }

  /// Same vocabulary, new matrix (same shape required).
  Embedding with_vectors(Matrix vectors) const;

  /// Rows at the given indices, in that order.
  Embedding subset(std::span<const std::size_t> rows) const;

 private:
  std::vector<std::string> words_;
  Matrix vectors_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Two embeddings over one shared word list; row i of each names the same word.
struct AlignedPair {
  Embedding a;
  Embedding b;
  std::size_t dropped_a = 0;
  std::size_t dropped_b = 0;
};

/// "n×d" for error messages.
std::string shape_string(const Embedding& e);

/// Throws NumericError naming both shapes unless n and d agree.
void require_same_shape(const Embedding& a, const Embedding& b, const char* context);

}  // namespace embalign
