#pragma once

// Text formats:
//   embedding   one word per line: "<token> <f1> ... <fd>", optional "n d" header
//   similarity  "<word1> <word2> <score>", tab or space separated, '#' comments
//   analogy     "<a> <b> <c> <d>", lines starting with ':' are section headers
//   lexicon     "<source> <target>"
//   report      JSON (see write_report)

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "embalign/embedding.hpp"
#include "embalign/evaluation.hpp"

namespace embalign::io {

struct EmbeddingFileSpec {
  std::filesystem::path path;
  std::optional<std::size_t> expected_d;
  /// Keep only the first `max_words` data lines.
  std::optional<std::size_t> max_words;
  bool lowercase = false;
};

struct LoadStats {
  bool had_header = false;
  std::size_t duplicates_skipped = 0;
  std::size_t lines_read = 0;
};

Embedding load_embedding(const EmbeddingFileSpec& spec, LoadStats* stats = nullptr);

/// No header; 17 significant digits so every double survives a round trip.
void save_embedding(const Embedding& e, const std::filesystem::path& path);

/// Rows restricted to the shared words, in a's order.
AlignedPair intersect_vocab(const Embedding& a, const Embedding& b);

SimilarityTestSet load_similarity_testset(const std::filesystem::path& path);
AnalogyTestSet load_analogy_testset(const std::filesystem::path& path);
Lexicon load_lexicon(const std::filesystem::path& path);

void write_report(const EvalReport& report, const std::filesystem::path& path);
std::string report_to_json(const EvalReport& report);
EvalReport report_from_json(const std::string& text);
EvalReport read_report(const std::filesystem::path& path);

/// 17 significant digits (as %.17g), locale independent.
std::string format_double(double v);
/// Locale-independent strict parse of a whole token.
std::optional<double> parse_double(std::string_view token);

inline constexpr const char* kToolVersion = "0.3.0";

}  // namespace embalign::io
