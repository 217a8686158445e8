#include "embalign/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "embalign/error.hpp"
#include "embalign/text.hpp"

namespace embalign::io {
namespace {

using nlohmann::json;

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

void finish_output(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::string where(const std::filesystem::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line);
}

std::optional<std::size_t> parse_count(std::string_view token) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size()) return std::nullopt;
  return v;
}

bool is_comment_or_blank(const std::vector<std::string_view>& fields) {
  return fields.empty() || fields.front().starts_with('#');
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  if (ec != std::errc()) throw IoError("cannot format value");
  return std::string(buf, ptr);
}

std::optional<double> parse_double(std::string_view token) {
  if (token.starts_with('+')) token.remove_prefix(1);
  if (token.empty()) return std::nullopt;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ptr != token.data() + token.size()) return std::nullopt;
  // Out-of-range magnitudes are reported as errors rather than clamped.
  if (ec != std::errc()) return std::nullopt;
  return v;
}

Embedding load_embedding(const EmbeddingFileSpec& spec, LoadStats* stats) {
  if (spec.expected_d && *spec.expected_d == 0) throw UsageError("expected_d must be positive");
  if (spec.max_words && *spec.max_words == 0) throw UsageError("max_words must be positive");

  std::ifstream in = open_input(spec.path);
  LoadStats local;
  std::vector<std::string> words;
  std::vector<double> values;
  std::unordered_set<std::string> seen;
  std::optional<std::size_t> dim = spec.expected_d;
  std::size_t data_lines = 0;

  auto add_row = [&](const std::vector<std::string_view>& fields, std::size_t line_no) {
    ++data_lines;
    const std::size_t row_dim = fields.size() - 1;
    if (row_dim == 0) {
      throw IoError(where(spec.path, line_no) + ": line has a token but no values");
    }
    if (!dim) dim = row_dim;
    if (row_dim != *dim) {
      throw IoError(where(spec.path, line_no) + ": expected " + std::to_string(*dim) +
                    " values, found " + std::to_string(row_dim));
    }
    std::string word(fields[0]);
    if (spec.lowercase) word = to_lower(std::move(word));
    if (!seen.insert(word).second) {
      ++local.duplicates_skipped;
      return;
    }
    for (std::size_t k = 1; k < fields.size(); ++k) {
      const auto v = parse_double(fields[k]);
      if (!v || !std::isfinite(*v)) {
        throw IoError(where(spec.path, line_no) + ": cannot parse value '" +
                      std::string(fields[k]) + "'");
      }
      values.push_back(*v);
    }
    words.push_back(std::move(word));
  };

  // A first line of two integers "n d" is a header when the line after it
  // has d+1 fields; otherwise it is replayed as an ordinary row.
  std::string header_line;
  std::optional<std::size_t> header_dim;
  std::size_t header_line_no = 0;
  bool first_content = true;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = split_whitespace(line);
    if (fields.empty()) continue;

    if (first_content) {
      first_content = false;
      if (fields.size() == 2) {
        const auto n = parse_count(fields[0]);
        const auto d = parse_count(fields[1]);
        if (n && d && *d > 0) {
          header_line = line;
          header_dim = *d;
          header_line_no = line_no;
          continue;
        }
      }
    }
    if (header_dim) {
      if (fields.size() == *header_dim + 1) {
        local.had_header = true;
      } else if (!spec.max_words || data_lines < *spec.max_words) {
        add_row(split_whitespace(header_line), header_line_no);
      }
      header_dim.reset();
    }

    if (spec.max_words && data_lines >= *spec.max_words) break;
    add_row(fields, line_no);
  }
  if (in.bad()) throw IoError("read error on '" + spec.path.string() + "'");
  // Header candidate with nothing after it: a lone "n d" line.
  if (header_dim) local.had_header = true;
  if (words.empty()) throw IoError("'" + spec.path.string() + "' contains no embedding rows");

  local.lines_read = line_no;
  if (stats) *stats = local;
  const std::size_t n = words.size();
  return Embedding(std::move(words), Matrix(n, *dim, std::move(values)));
}

void save_embedding(const Embedding& e, const std::filesystem::path& path) {
  std::ofstream out = open_output(path);
  std::string buffer;
  for (std::size_t i = 0; i < e.size(); ++i) {
    buffer.clear();
    buffer += e.word(i);
    for (double v : e.row(i)) {
      buffer += ' ';
      buffer += format_double(v);
    }
    buffer += '\n';
    out.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
  }
  finish_output(out, path);
}

AlignedPair intersect_vocab(const Embedding& a, const Embedding& b) {
  if (a.dim() != b.dim()) {
    throw NumericError("intersect_vocab: dimension mismatch " + shape_string(a) + " vs " +
                       shape_string(b));
  }
  std::vector<std::size_t> rows_a;
  std::vector<std::size_t> rows_b;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (auto j = b.index_of(a.word(i))) {
      rows_a.push_back(i);
      rows_b.push_back(*j);
    }
  }
  if (rows_a.empty()) throw NumericError("intersect_vocab: vocabularies do not intersect");
  return AlignedPair{a.subset(rows_a), b.subset(rows_b), a.size() - rows_a.size(),
                     b.size() - rows_b.size()};
}

SimilarityTestSet load_similarity_testset(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  SimilarityTestSet out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = split_whitespace(line);
    if (is_comment_or_blank(fields)) continue;
    if (fields.size() != 3) {
      throw IoError(where(path, line_no) + ": expected 'word1 word2 score', found " +
                    std::to_string(fields.size()) + " fields");
    }
    const auto score = parse_double(fields[2]);
    if (!score || !std::isfinite(*score)) {
      throw IoError(where(path, line_no) + ": bad score '" + std::string(fields[2]) + "'");
    }
    out.pairs.push_back({std::string(fields[0]), std::string(fields[1]), *score});
  }
  if (out.pairs.empty()) throw IoError("'" + path.string() + "' contains no word pairs");
  return out;
}

AnalogyTestSet load_analogy_testset(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  AnalogyTestSet out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = split_whitespace(line);
    if (fields.empty() || fields.front().starts_with(':')) continue;
    if (fields.size() != 4) {
      throw IoError(where(path, line_no) + ": expected 4 tokens, found " +
                    std::to_string(fields.size()));
    }
    if (fields[0] == fields[1] && fields[1] == fields[2] && fields[2] == fields[3]) {
      throw IoError(where(path, line_no) + ": all four analogy tokens are identical");
    }
    out.quads.push_back({std::string(fields[0]), std::string(fields[1]), std::string(fields[2]),
                         std::string(fields[3])});
  }
  if (out.quads.empty()) throw IoError("'" + path.string() + "' contains no analogies");
  return out;
}

Lexicon load_lexicon(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  Lexicon out;
  std::unordered_set<std::string> sources;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = split_whitespace(line);
    if (fields.empty()) continue;
    if (fields.size() != 2) {
      throw IoError(where(path, line_no) + ": expected 'source<TAB>target', found " +
                    std::to_string(fields.size()) + " fields");
    }
    std::string source(fields[0]);
    if (!sources.insert(source).second) {
      ++out.duplicates_skipped;
      continue;
    }
    out.entries.push_back({std::move(source), std::string(fields[1])});
  }
  if (out.entries.empty()) throw IoError("'" + path.string() + "' contains no lexicon entries");
  return out;
}

std::string report_to_json(const EvalReport& report) {
  if (report.values.empty()) throw UsageError("refusing to serialize a report with no values");
  json j;
  j["metric"] = report.metric;
  j["values"] = report.values;
  j["evaluated"] = report.evaluated;
  j["skipped"] = report.skipped;
  j["config"] = report.config;
  j["warnings"] = report.warnings;
  j["version"] = kToolVersion;
  return j.dump(2) + "\n";
}

EvalReport report_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    EvalReport r;
    r.metric = j.at("metric").get<std::string>();
    r.values = j.at("values").get<std::map<std::string, double>>();
    r.evaluated = j.at("evaluated").get<std::size_t>();
    r.skipped = j.at("skipped").get<std::size_t>();
    r.config = j.at("config").get<std::map<std::string, std::string>>();
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    return r;
  } catch (const json::exception& ex) {
    throw IoError(std::string("malformed report: ") + ex.what());
  }
}

void write_report(const EvalReport& report, const std::filesystem::path& path) {
  const std::string text = report_to_json(report);
  std::ofstream out = open_output(path);
  out << text;
  finish_output(out, path);
}

EvalReport read_report(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return report_from_json(ss.str());
}

}  // namespace embalign::io
