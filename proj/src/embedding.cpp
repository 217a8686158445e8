#include "embalign/embedding.hpp"

#include <cmath>
#include <utility>

#include "embalign/error.hpp"

namespace embalign {

Embedding::Embedding(std::vector<std::string> words, Matrix vectors)
    : words_(std::move(words)), vectors_(std::move(vectors)) {
  if (words_.empty() || vectors_.cols() == 0) {
    throw NumericError("embedding must have at least one word and one dimension");
  }
  if (words_.size() != vectors_.rows()) {
    throw NumericError("embedding has " + std::to_string(words_.size()) + " words but " +
                       std::to_string(vectors_.rows()) + " rows");
  }
  index_.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (!index_.emplace(words_[i], i).second) {
      throw NumericError("duplicate word in embedding: '" + words_[i] + "'");
    }
  }
  for (std::size_t i = 0; i < vectors_.rows(); ++i) {
    for (double v : vectors_.row(i)) {
      if (!std::isfinite(v)) {
        throw NumericError("non-finite value in row of '" + words_[i] + "'");
      }
    }
  }
}

std::optional<std::size_t> Embedding::index_of(const std::string& word) const {
  auto it = index_.find(word);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Embedding Embedding::with_vectors(Matrix vectors) const {
  if (vectors.rows() != vectors_.rows() || vectors.cols() != vectors_.cols()) {
    throw NumericError("replacement matrix " + embalign::shape_string(vectors) +
                       " does not match embedding " + embalign::shape_string(vectors_));
  }
  return Embedding(words_, std::move(vectors));
}

Embedding Embedding::subset(std::span<const std::size_t> rows) const {
  std::vector<std::string> words;
  words.reserve(rows.size());
  Matrix m(rows.size(), dim());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    words.push_back(words_.at(rows[i]));
    const auto src = vectors_.row(rows[i]);
    std::copy(src.begin(), src.end(), m.row(i).begin());
  }
  return Embedding(std::move(words), std::move(m));
}

std::string shape_string(const Embedding& e) {
  return std::to_string(e.size()) + "x" + std::to_string(e.dim());
}

void require_same_shape(const Embedding& a, const Embedding& b, const char* context) {
  if (a.size() != b.size() || a.dim() != b.dim()) {
    throw NumericError(std::string(context) + ": shape mismatch " + shape_string(a) + " vs " +
                       shape_string(b));
  }
}

}  // namespace embalign
