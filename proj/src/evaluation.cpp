#include "embalign/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "embalign/error.hpp"
#include "embalign/kernels.hpp"
#include "embalign/metrics.hpp"
#include "embalign/text.hpp"

namespace embalign {
namespace {

std::string key_for(std::string token, bool lowercase) {
  return lowercase ? to_lower(std::move(token)) : token;
}

std::string format_value(double v) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(17);
  os << v;
  return os.str();
}

std::vector<std::size_t> checked_ks(std::span<const std::size_t> ks) {
  if (ks.empty()) throw UsageError("at least one k is required");
  std::vector<std::size_t> out(ks.begin(), ks.end());
  for (std::size_t k : out) {
    if (k == 0) throw UsageError("k must be positive");
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string join_ks(const std::vector<std::size_t>& ks) {
  std::string s;
  for (std::size_t i = 0; i < ks.size(); ++i) s += (i ? "," : "") + std::to_string(ks[i]);
  return s;
}

// Rank (0-based) of `wanted` in `list`, or list size when absent.
std::size_t rank_of(const NeighborList& list, std::size_t wanted) {
  for (std::size_t i = 0; i < list.neighbors.size(); ++i)
    if (list.neighbors[i].index == wanted) return i;
  return list.neighbors.size();
}

std::vector<double> row_copy(std::span<const double> r) { return {r.begin(), r.end()}; }

void normalize_in_place(std::vector<double>& v) {
  const double n = std::sqrt(squared_norm(v));
  if (n > 0.0)
    for (double& x : v) x /= n;
}

// Shared hit-counting for translation lookups.
struct PrecisionCounter {
  std::vector<std::size_t> ks;
  std::vector<std::size_t> hits;
  std::size_t total = 0;

  explicit PrecisionCounter(std::vector<std::size_t> k) : ks(std::move(k)), hits(ks.size(), 0) {}

  void record(std::size_t rank) {
    ++total;
    for (std::size_t i = 0; i < ks.size(); ++i)
      if (rank < ks[i]) ++hits[i];
  }

  void write(EvalReport& report, const std::string& prefix) const {
    for (std::size_t i = 0; i < ks.size(); ++i) {
      report.values[prefix + std::to_string(ks[i])] =
          total ? static_cast<double>(hits[i]) / static_cast<double>(total) : 0.0;
    }
  }
};

// Rank of `target_row` among the cosine neighbors of `query`, searched to
// depth max(ks). A zero query has no direction and counts as a miss.
std::size_t translation_rank(const BruteForceIndex& index, std::span<const double> query,
                             std::size_t target_row, std::size_t depth) {
  if (squared_norm(query) == 0.0) return depth;
  return rank_of(index.search(query, depth, Similarity::kCosine), target_row);
}

}  // namespace

EvalReport eval_similarity(const SimilarityTestSet& test, const Embedding& a,
                           const Embedding& b, const EvalOptions& options) {
  std::vector<double> model;
  std::vector<double> human;
  EvalReport report;
  report.metric = "spearman";
  for (const auto& pair : test.pairs) {
    const auto ia = a.index_of(key_for(pair.first, options.lowercase));
    const auto ib = b.index_of(key_for(pair.second, options.lowercase));
    if (!ia || !ib) {
      ++report.skipped;
      continue;
    }
    const auto x = a.row(*ia);
    const auto y = b.row(*ib);
    const double denom = std::sqrt(squared_norm(x) * squared_norm(y));
    if (denom == 0.0) {
      ++report.skipped;
      report.warnings.push_back("zero vector in pair " + pair.first + "/" + pair.second);
      continue;
    }
    model.push_back(dot(x, y) / denom);
    human.push_back(pair.score);
  }
  report.evaluated = model.size();
  if (model.size() < 2) {
    throw NumericError("eval_similarity: only " + std::to_string(model.size()) +
                       " evaluable pair(s); need at least 2");
  }
  report.values["rho"] = spearman(model, human);
  report.config["task"] = "similarity";
  report.config["normalized"] = options.normalized ? "true" : "false";
  report.config["lowercase"] = options.lowercase ? "true" : "false";
  return report;
}

EvalReport eval_analogy(const AnalogyTestSet& test, const Embedding& a, const Embedding& b,
                        std::span<const std::size_t> ks_in, const EvalOptions& options) {
  if (a.dim() != b.dim()) {
    throw NumericError("eval_analogy: dimension mismatch " + shape_string(a) + " vs " +
                       shape_string(b));
  }
  const std::vector<std::size_t> ks = checked_ks(ks_in);
  const BruteForceIndex index(a);
  PrecisionCounter counter(ks);
  EvalReport report;
  report.metric = "accuracy";

  for (const auto& quad : test.quads) {
    const auto w1 = b.index_of(key_for(quad.first, options.lowercase));
    const auto w2 = b.index_of(key_for(quad.second, options.lowercase));
    const auto w3 = b.index_of(key_for(quad.third, options.lowercase));
    const auto w4 = a.index_of(key_for(quad.fourth, options.lowercase));
    if (!w1 || !w2 || !w3 || !w4) {
      ++report.skipped;
      continue;
    }
    std::vector<double> v1 = row_copy(b.row(*w1));
    std::vector<double> v2 = row_copy(b.row(*w2));
    std::vector<double> v3 = row_copy(b.row(*w3));
    if (options.normalized) {
      normalize_in_place(v1);
      normalize_in_place(v2);
      normalize_in_place(v3);
    }
    std::vector<double> query(a.dim());
    for (std::size_t k = 0; k < query.size(); ++k) query[k] = v3[k] + (v2[k] - v1[k]);

    std::vector<std::size_t> exclude;
    for (const std::string* w : {&quad.first, &quad.second, &quad.third}) {
      if (auto idx = a.index_of(key_for(*w, options.lowercase))) exclude.push_back(*idx);
    }
    std::sort(exclude.begin(), exclude.end());
    exclude.erase(std::unique(exclude.begin(), exclude.end()), exclude.end());
    const std::size_t depth = std::min(ks.back(), a.size() - exclude.size());
    if (depth == 0) {
      ++report.skipped;
      continue;
    }
    if (squared_norm(query) == 0.0) {
      counter.record(depth);
      continue;
    }
    const NeighborList nn = index.search(query, depth, Similarity::kCosine, exclude);
    counter.record(rank_of(nn, *w4));
  }

  report.evaluated = counter.total;
  if (report.evaluated == 0) throw NumericError("eval_analogy: no evaluable analogies");
  counter.write(report, "acc@");
  report.config["task"] = "analogy";
  report.config["ks"] = join_ks(ks);
  report.config["normalized"] = options.normalized ? "true" : "false";
  report.config["lowercase"] = options.lowercase ? "true" : "false";
  return report;
}

EvalReport eval_translation(const Lexicon& lexicon, const Embedding& source,
                            const Embedding& target, std::span<const std::size_t> ks_in,
                            const EvalOptions& options) {
  if (source.dim() != target.dim()) {
    throw NumericError("eval_translation: dimension mismatch " + shape_string(source) +
                       " vs " + shape_string(target));
  }
  const std::vector<std::size_t> ks = checked_ks(ks_in);
  const std::size_t depth = std::min(ks.back(), target.size());
  const BruteForceIndex index(target);
  PrecisionCounter counter(ks);
  EvalReport report;
  report.metric = "precision";
  for (const auto& entry : lexicon.entries) {
    const auto is = source.index_of(key_for(entry.source, options.lowercase));
    const auto it = target.index_of(key_for(entry.target, options.lowercase));
    if (!is || !it) {
      ++report.skipped;
      continue;
    }
    counter.record(translation_rank(index, source.row(*is), *it, depth));
  }
  report.evaluated = counter.total;
  if (report.evaluated == 0) throw NumericError("eval_translation: no evaluable entries");
  counter.write(report, "p@");
  report.config["task"] = "translation";
  report.config["ks"] = join_ks(ks);
  report.config["lowercase"] = options.lowercase ? "true" : "false";
  return report;
}

std::vector<CalibrationPoint> gaussian_noise_calibration(const Embedding& e,
                                                         std::span<const double> sigmas,
                                                         double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw UsageError("noise fraction must lie in (0, 1]");
  }
  const auto perturbed = static_cast<std::size_t>(
      std::floor(fraction * static_cast<double>(e.size()) + 1e-9));
  if (perturbed < 1) {
    throw UsageError("noise fraction selects no rows (fraction·n < 1)");
  }
  for (double s : sigmas) {
    if (!(s >= 0.0) || !std::isfinite(s)) {
      throw UsageError("noise sigma must be finite and nonnegative");
    }
  }

  std::vector<std::size_t> rows(e.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  std::mt19937_64 pick(seed);
  std::shuffle(rows.begin(), rows.end(), pick);
  rows.resize(perturbed);
  std::sort(rows.begin(), rows.end());

  // One standard-normal draw per perturbed coordinate, reused for every σ.
  Matrix z(perturbed, e.dim());
  std::mt19937_64 noise(seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (double& v : z.data()) v = normal(noise);

  std::vector<CalibrationPoint> out;
  out.reserve(sigmas.size());
  for (double sigma : sigmas) {
    Matrix noisy = e.vectors();
    for (std::size_t r = 0; r < perturbed; ++r) {
      auto dst = noisy.row(rows[r]);
      const auto g = z.row(r);
      for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += sigma * g[k];
    }
    const Embedding b = e.with_vectors(std::move(noisy));
    const RotationFit fit = ao_rotation(e, b);
    out.push_back({sigma, fraction, rmse(e, fit.aligned)});
  }
  return out;
}

EnsembleResult ensemble_average(const Embedding& a, const Embedding& b_aligned) {
  if (a.dim() != b_aligned.dim()) {
    throw NumericError("ensemble_average: dimension mismatch " + shape_string(a) + " vs " +
                       shape_string(b_aligned));
  }
  std::vector<std::string> words;
  std::vector<double> data;
  std::size_t zero_rows = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto j = b_aligned.index_of(a.word(i));
    if (!j) continue;
    words.push_back(a.word(i));
    const auto x = a.row(i);
    const auto y = b_aligned.row(*j);
    bool zero = true;
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double m = 0.5 * (x[k] + y[k]);
      zero = zero && m == 0.0;
      data.push_back(m);
    }
    if (zero) ++zero_rows;
  }
  if (words.empty()) throw NumericError("ensemble_average: vocabularies do not intersect");
  const std::size_t n = words.size();
  EnsembleResult result{Embedding(std::move(words), Matrix(n, a.dim(), std::move(data))), {}};
  if (zero_rows > 0) {
    result.warnings.push_back(std::to_string(zero_rows) +
                              " averaged row(s) are exactly zero (opposing inputs)");
  }
  return result;
}

EvalReport crossval_translation(const Lexicon& lexicon, const Embedding& source,
                                const Embedding& target, const CrossValidationOptions& options) {
  if (!(options.holdout_fraction > 0.0 && options.holdout_fraction < 1.0)) {
    throw UsageError("holdout fraction must lie in (0, 1)");
  }
  if (source.dim() != target.dim()) {
    throw NumericError("crossval_translation: dimension mismatch " + shape_string(source) +
                       " vs " + shape_string(target));
  }
  const std::vector<std::size_t> ks = checked_ks(options.ks);

  struct Pair {
    std::size_t source_row;
    std::size_t target_row;
  };
  std::vector<Pair> usable;
  EvalReport report;
  report.metric = "precision";
  for (const auto& entry : lexicon.entries) {
    const auto is = source.index_of(key_for(entry.source, options.lowercase));
    const auto it = target.index_of(key_for(entry.target, options.lowercase));
    if (!is || !it) {
      ++report.skipped;
      continue;
    }
    usable.push_back({*is, *it});
  }

  std::mt19937_64 rng(options.seed);
  std::shuffle(usable.begin(), usable.end(), rng);
  const auto test_count = static_cast<std::size_t>(
      std::llround(options.holdout_fraction * static_cast<double>(usable.size())));
  if (test_count == 0 || test_count >= usable.size()) {
    throw NumericError("crossval_translation: split of " + std::to_string(usable.size()) +
                       " usable entries leaves an empty train or test set");
  }
  const std::span<const Pair> test(usable.data(), test_count);
  const std::span<const Pair> train(usable.data() + test_count, usable.size() - test_count);
  if (train.size() < source.dim()) {
    report.warnings.push_back("training pairs (" + std::to_string(train.size()) +
                              ") fewer than dimension (" + std::to_string(source.dim()) + ")");
  }

  // Training rows are keyed by position; target words may repeat across entries.
  const std::size_t d = source.dim();
  std::vector<std::string> keys;
  Matrix train_source(train.size(), d);
  Matrix train_target(train.size(), d);
  for (std::size_t i = 0; i < train.size(); ++i) {
    keys.push_back(std::to_string(i));
    const auto s = source.row(train[i].source_row);
    const auto t = target.row(train[i].target_row);
    std::copy(s.begin(), s.end(), train_source.row(i).begin());
    std::copy(t.begin(), t.end(), train_target.row(i).begin());
  }
  const Embedding fit_source(keys, std::move(train_source));
  const Embedding fit_target(keys, std::move(train_target));
  const RotationFit fit = ao_rotation(fit_target, fit_source, options.fit);
  for (const auto& w : fit.transform.warnings) report.warnings.push_back(w);

  const Embedding mapped = apply_transform(source, fit.transform);
  const BruteForceIndex index(target);
  const std::size_t depth = std::min(ks.back(), target.size());

  PrecisionCounter held_out(ks);
  for (const Pair& p : test)
    held_out.record(translation_rank(index, mapped.row(p.source_row), p.target_row, depth));
  PrecisionCounter in_sample(ks);
  for (const Pair& p : train)
    in_sample.record(translation_rank(index, mapped.row(p.source_row), p.target_row, depth));

  held_out.write(report, "p@");
  in_sample.write(report, "train_p@");
  report.evaluated = usable.size();
  report.config["task"] = "crossval_translation";
  report.config["ks"] = join_ks(ks);
  report.config["holdout"] = format_value(options.holdout_fraction);
  report.config["seed"] = std::to_string(options.seed);
  report.config["train_size"] = std::to_string(train.size());
  report.config["test_size"] = std::to_string(test.size());
  report.config["proper"] = options.fit.proper ? "true" : "false";
  report.config["fit_normalized"] = options.fit.normalize ? "true" : "false";
  report.config["lowercase"] = options.lowercase ? "true" : "false";
  return report;
}

}  // namespace embalign
