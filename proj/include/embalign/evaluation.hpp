#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "embalign/embedding.hpp"
#include "embalign/orientation.hpp"

namespace embalign {

struct SimilarityPair {
  std::string first;
  std::string second;
  double score = 0.0;
};

/// Word pairs with human similarity judgments.
struct SimilarityTestSet {
  std::vector<SimilarityPair> pairs;
};

/// first:second :: third:fourth
struct AnalogyQuad {
  std::string first;
  std::string second;
  std::string third;
  std::string fourth;
};

struct AnalogyTestSet {
  std::vector<AnalogyQuad> quads;
};

struct LexiconEntry {
  std::string source;
  std::string target;
};

/// Bilingual dictionary; source words are unique.
struct Lexicon {
  std::vector<LexiconEntry> entries;
  std::size_t duplicates_skipped = 0;
};

/// Metric values keyed by name ("rho", "acc@5", "p@1", ...), item counts,
/// and an echo of the configuration that produced them.
struct EvalReport {
  std::string metric;
  std::map<std::string, double> values;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;
  std::map<std::string, std::string> config;
  std::vector<std::string> warnings;
};

struct EvalOptions {
  /// Row-normalize vectors before building analogy queries. Cosine scores
  /// themselves do not depend on it.
  bool normalized = false;
  /// Lowercase test-set tokens before lookup.
  bool lowercase = true;
};

/// Spearman ρ between cos(a[w1], b[w2]) and the human scores. Pairs with a
/// word missing from its side are skipped. Pass the same embedding twice for
/// within-embedding evaluation.
EvalReport eval_similarity(const SimilarityTestSet& test, const Embedding& a,
                           const Embedding& b, const EvalOptions& options = {});

/// For w1:w2::w3:w4, queries b[w3] + b[w2] − b[w1] against `a` (cosine,
/// excluding w1, w2, w3) and scores a hit at k when w4 is in the top k.
/// Reports "acc@k" for every k in `ks`.
EvalReport eval_analogy(const AnalogyTestSet& test, const Embedding& a, const Embedding& b,
                        std::span<const std::size_t> ks, const EvalOptions& options = {});

/// Hit at k when the entry's target word is among the k cosine neighbors of
/// source[s] in `target`. Reports "p@k".
EvalReport eval_translation(const Lexicon& lexicon, const Embedding& source,
                            const Embedding& target, std::span<const std::size_t> ks,
                            const EvalOptions& options = {});

struct CalibrationPoint {
  double sigma = 0.0;
  double fraction = 0.0;
  double rmse = 0.0;
};

/// For each σ: copy `e`, add N(0, σ²) noise to ⌊fraction·n⌋ rows chosen by
/// `seed`, align the copy back with ao_rotation and record the RMSE. Row
/// choice and the underlying standard-normal draws are shared across σ.
std::vector<CalibrationPoint> gaussian_noise_calibration(const Embedding& e,
                                                         std::span<const double> sigmas,
                                                         double fraction, std::uint64_t seed);

struct EnsembleResult {
  Embedding embedding;
  std::vector<std::string> warnings;
};

/// Midpoint (a[w] + b[w])/2 of every shared word, in a's order.
EnsembleResult ensemble_average(const Embedding& a, const Embedding& b_aligned);

struct CrossValidationOptions {
  double holdout_fraction = 0.2;
  std::vector<std::size_t> ks{1, 5, 10};
  std::uint64_t seed = 20180511;
  FitOptions fit;
  bool lowercase = true;
};

/// Splits the in-vocabulary lexicon entries by seed, fits ao_rotation on the
/// training pairs, maps held-out source vectors with the learned transform
/// and searches the full target vocabulary. Reports held-out "p@k" and
/// in-sample "train_p@k".
EvalReport crossval_translation(const Lexicon& lexicon, const Embedding& source,
                                const Embedding& target, const CrossValidationOptions& options);

}  // namespace embalign
