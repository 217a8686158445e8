#include "embalign/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "embalign/affine.hpp"
#include "embalign/error.hpp"
#include "embalign/evaluation.hpp"
#include "embalign/io.hpp"
#include "embalign/kernels.hpp"
#include "embalign/metrics.hpp"
#include "embalign/orientation.hpp"

namespace embalign::cli {
namespace {

using nlohmann::json;

const std::vector<std::string> kVariants = {"rotation", "centered", "scaling",
                                            "centered+scaling", "affine"};

struct Common {
  int threads = 0;
  std::optional<std::size_t> max_words;
};

struct AlignArgs {
  std::string source;
  std::string target;
  std::string variant = "rotation";
  bool proper = false;
  bool normalized = false;
  double gamma = 1.0;
  std::string out;
  std::string report;
};

struct CalibrateArgs {
  std::string embedding;
  std::vector<double> sigmas{0.1, 0.2, 0.3};
  std::vector<double> fractions{1.0};
  unsigned long long seed = kDefaultSeed;
  std::string out;
};

struct EvalArgs {
  std::string a;
  std::string b;
  std::string testset;
  std::string kind = "sim";
  std::vector<std::size_t> ks{1};
  bool normalized = false;
  bool no_lowercase = false;
  std::string out;
};

struct TranslateArgs {
  std::string source;
  std::string target;
  std::string lexicon;
  double holdout = 0.2;
  std::vector<std::size_t> ks{1, 5, 10};
  unsigned long long seed = kDefaultSeed;
  bool proper = false;
  bool normalized = false;
  bool no_lowercase = false;
  std::string out;
};

struct EnsembleArgs {
  std::string a;
  std::string b;
  std::string variant = "scaling";
  bool proper = false;
  std::string out;
  std::string report;
};

Embedding load(const std::string& path, const Common& common, io::LoadStats* stats = nullptr) {
  io::EmbeddingFileSpec spec;
  spec.path = path;
  spec.max_words = common.max_words;
  return io::load_embedding(spec, stats);
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << text;
  f.flush();
  if (!f) throw IoError("failed writing '" + path + "'");
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json nullable_cosine(const Embedding& a, const Embedding& b) {
  try {
    return avg_cosine(a, b);
  } catch (const NumericError&) {
    return nullptr;
  }
}

/// A fitted alignment in a form the commands can apply uniformly.
struct Alignment {
  std::optional<Transform> transform;
  std::optional<AffineTransform> affine;
  std::vector<std::string> warnings;

  Embedding apply(const Embedding& e) const {
    return transform ? apply_transform(e, *transform) : apply_affine(e, *affine);
  }
};

// Fits `variant` mapping `source` rows onto `target` rows. Centered variants
// re-add the target mean so output stays in the target's frame.
Alignment fit_variant(const std::string& variant, const Embedding& target,
                      const Embedding& source, bool proper, bool normalized, double gamma) {
  const FitOptions options{proper, normalized};
  Alignment out;
  if (variant == "rotation") {
    out.transform = ao_rotation(target, source, options).transform;
  } else if (variant == "scaling") {
    out.transform = ao_scaling(target, source, options).transform;
  } else if (variant == "centered" || variant == "centered+scaling") {
    CenteredFit fit = variant == "centered" ? ao_centered(target, source, options)
                                            : ao_centered_scaling(target, source, options);
    const Embedding& fitted_target = normalized ? normalize_rows(target) : target;
    fit.transform.target_mean = kernels::column_means(fitted_target.vectors());
    out.transform = std::move(fit.transform);
  } else if (variant == "affine") {
    if (normalized) throw UsageError("--normalized is not supported with the affine variant");
    AffineOptions ao;
    ao.gamma = gamma;
    out.affine = fit_affine(target, source, ao);
  } else {
    throw UsageError("unknown variant '" + variant + "'");
  }
  out.warnings = out.transform ? out.transform->warnings : out.affine->warnings;
  return out;
}

int cmd_align(const AlignArgs& args, const Common& common, std::ostream& out) {
  const Embedding source = load(args.source, common);
  const Embedding target = load(args.target, common);
  const AlignedPair pair = io::intersect_vocab(target, source);
  const Alignment alignment =
      fit_variant(args.variant, pair.a, pair.b, args.proper, args.normalized, args.gamma);
  const Embedding moved_shared = alignment.apply(pair.b);

  json summary;
  summary["variant"] = args.variant;
  summary["proper"] = args.proper;
  summary["normalized"] = args.normalized;
  summary["shared_words"] = pair.a.size();
  summary["dropped_target"] = pair.dropped_a;
  summary["dropped_source"] = pair.dropped_b;
  summary["rmse_before"] = rmse(pair.a, pair.b);
  summary["rmse_after"] = rmse(pair.a, moved_shared);
  summary["avg_cosine_before"] = nullable_cosine(pair.a, pair.b);
  summary["avg_cosine_after"] = nullable_cosine(pair.a, moved_shared);
  if (alignment.transform) {
    const Transform& t = *alignment.transform;
    summary["scale"] = t.scale;
    summary["det_rotation"] = determinant(t.rotation);
    summary["orthogonality_error"] = orthogonality_error(t.rotation);
    summary["centered"] = t.centered;
  } else {
    const AffineTransform& a = *alignment.affine;
    summary["gamma"] = a.gamma;
    summary["learning_rate"] = a.learning_rate;
    summary["iterations"] = a.iterations_run;
    summary["objective"] = a.final_objective;
    summary["det_matrix"] = determinant(a.matrix);
  }
  summary["warnings"] = alignment.warnings;
  summary["version"] = io::kToolVersion;

  if (!args.out.empty()) io::save_embedding(alignment.apply(source), args.out);
  emit(dump(summary), args.report, out);
  return 0;
}

int cmd_calibrate(const CalibrateArgs& args, const Common& common, std::ostream& out) {
  const Embedding e = load(args.embedding, common);
  std::string csv = "sigma,fraction,rmse\n";
  for (double fraction : args.fractions) {
    for (const auto& p : gaussian_noise_calibration(e, args.sigmas, fraction, args.seed)) {
      csv += io::format_double(p.sigma) + "," + io::format_double(p.fraction) + "," +
             io::format_double(p.rmse) + "\n";
    }
  }
  emit(csv, args.out, out);
  return 0;
}

int cmd_eval(const EvalArgs& args, const Common& common, std::ostream& out) {
  const Embedding a = load(args.a, common);
  const Embedding b = args.b == args.a ? a : load(args.b, common);
  EvalOptions options;
  options.normalized = args.normalized;
  options.lowercase = !args.no_lowercase;
  EvalReport report;
  if (args.kind == "sim") {
    report = eval_similarity(io::load_similarity_testset(args.testset), a, b, options);
  } else {
    report = eval_analogy(io::load_analogy_testset(args.testset), a, b, args.ks, options);
  }
  report.config["embedding_a"] = args.a;
  report.config["embedding_b"] = args.b;
  report.config["testset"] = args.testset;
  emit(io::report_to_json(report), args.out, out);
  return 0;
}

int cmd_translate(const TranslateArgs& args, const Common& common, std::ostream& out) {
  const Embedding source = load(args.source, common);
  const Embedding target = load(args.target, common);
  const Lexicon lexicon = io::load_lexicon(args.lexicon);
  CrossValidationOptions options;
  options.holdout_fraction = args.holdout;
  options.ks = args.ks;
  options.seed = args.seed;
  options.fit = FitOptions{args.proper, args.normalized};
  options.lowercase = !args.no_lowercase;
  EvalReport report = crossval_translation(lexicon, source, target, options);
  report.config["variant"] = "rotation";
  report.config["source"] = args.source;
  report.config["target"] = args.target;
  report.config["lexicon"] = args.lexicon;
  if (lexicon.duplicates_skipped > 0) {
    report.warnings.push_back(std::to_string(lexicon.duplicates_skipped) +
                              " duplicate lexicon source(s) skipped");
  }
  emit(io::report_to_json(report), args.out, out);
  return 0;
}

int cmd_ensemble(const EnsembleArgs& args, const Common& common, std::ostream& out) {
  const Embedding a = load(args.a, common);
  const Embedding b = load(args.b, common);
  const AlignedPair pair = io::intersect_vocab(a, b);
  const Alignment alignment = fit_variant(args.variant, pair.a, pair.b, args.proper, false, 1.0);
  const Embedding b_aligned = alignment.apply(pair.b);
  EnsembleResult result = ensemble_average(pair.a, b_aligned);
  io::save_embedding(result.embedding, args.out);

  json summary;
  summary["variant"] = args.variant;
  summary["words"] = result.embedding.size();
  summary["dim"] = result.embedding.dim();
  summary["rmse_aligned"] = rmse(pair.a, b_aligned);
  std::vector<std::string> warnings = alignment.warnings;
  warnings.insert(warnings.end(), result.warnings.begin(), result.warnings.end());
  summary["warnings"] = warnings;
  summary["version"] = io::kToolVersion;
  emit(dump(summary), args.report, out);
  return 0;
}

int cmd_info(const std::string& path, const Common& common, std::ostream& out) {
  io::LoadStats stats;
  const Embedding e = load(path, common, &stats);
  const auto norms = kernels::row_norms(e.vectors());
  std::size_t zero_rows = 0;
  for (double n : norms) zero_rows += n == 0.0 ? 1 : 0;
  json j;
  j["path"] = path;
  j["words"] = e.size();
  j["dim"] = e.dim();
  j["had_header"] = stats.had_header;
  j["duplicates_skipped"] = stats.duplicates_skipped;
  j["mean_norm"] = kernels::ordered_sum(norms) / static_cast<double>(norms.size());
  j["zero_rows"] = zero_rows;
  j["version"] = io::kToolVersion;
  out << dump(j);
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Closed-form alignment and evaluation of word embeddings", "embalign"};
  app.require_subcommand(1);
  app.fallthrough();

  Common common;
  app.add_option("--threads", common.threads, "Worker threads (1 = serial kernels)")
      ->check(CLI::PositiveNumber);
  app.add_option("--max-words", common.max_words, "Read only the first N embedding rows")
      ->check(CLI::PositiveNumber);

  AlignArgs align;
  auto* align_cmd = app.add_subcommand("align", "Align SOURCE onto TARGET over shared words");
  align_cmd->add_option("source", align.source, "Embedding to move")->required();
  align_cmd->add_option("target", align.target, "Reference embedding")->required();
  align_cmd->add_option("--variant", align.variant)->check(CLI::IsMember(kVariants));
  align_cmd->add_flag("--proper", align.proper, "Exclude reflections (det R = +1)");
  align_cmd->add_flag("--normalized", align.normalized, "Fit on unit-normalized rows");
  align_cmd->add_option("--gamma", align.gamma, "Ridge weight for the affine variant")
      ->check(CLI::NonNegativeNumber);
  align_cmd->add_option("--out", align.out, "Write the full transformed source embedding");
  align_cmd->add_option("--report", align.report, "Write the JSON summary here");

  CalibrateArgs calibrate;
  auto* calibrate_cmd = app.add_subcommand("calibrate", "RMSE after Gaussian noise + rotation");
  calibrate_cmd->add_option("embedding", calibrate.embedding)->required();
  calibrate_cmd->add_option("--sigma", calibrate.sigmas, "Noise std (repeatable)")
      ->delimiter(',');
  calibrate_cmd->add_option("--fraction", calibrate.fractions, "Perturbed row fraction")
      ->delimiter(',');
  calibrate_cmd->add_option("--seed", calibrate.seed);
  calibrate_cmd->add_option("--out", calibrate.out, "CSV output path");

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Similarity or analogy test across embeddings");
  eval_cmd->add_option("a", eval.a, "Embedding searched / first word side")->required();
  eval_cmd->add_option("b", eval.b, "Embedding for second word / query side")->required();
  eval_cmd->add_option("testset", eval.testset)->required();
  eval_cmd->add_option("--kind", eval.kind)->check(CLI::IsMember({"sim", "analogy"}));
  eval_cmd->add_option("--k", eval.ks, "Analogy cutoffs")->delimiter(',')->check(CLI::PositiveNumber);
  eval_cmd->add_flag("--normalized", eval.normalized);
  eval_cmd->add_flag("--no-lowercase", eval.no_lowercase);
  eval_cmd->add_option("--out", eval.out);

  TranslateArgs translate;
  auto* translate_cmd =
      app.add_subcommand("translate", "Cross-validated translation precision@k");
  translate_cmd->add_option("source", translate.source)->required();
  translate_cmd->add_option("target", translate.target)->required();
  translate_cmd->add_option("lexicon", translate.lexicon)->required();
  translate_cmd->add_option("--holdout", translate.holdout)->check(CLI::Range(0.0, 1.0));
  translate_cmd->add_option("--k", translate.ks)->delimiter(',')->check(CLI::PositiveNumber);
  translate_cmd->add_option("--seed", translate.seed);
  translate_cmd->add_flag("--proper", translate.proper);
  translate_cmd->add_flag("--normalized", translate.normalized);
  translate_cmd->add_flag("--no-lowercase", translate.no_lowercase);
  translate_cmd->add_option("--out", translate.out);

  EnsembleArgs ensemble;
  auto* ensemble_cmd = app.add_subcommand("ensemble", "Align B onto A and average");
  ensemble_cmd->add_option("a", ensemble.a)->required();
  ensemble_cmd->add_option("b", ensemble.b)->required();
  ensemble_cmd->add_option("--variant", ensemble.variant)
      ->check(CLI::IsMember({"rotation", "centered", "scaling", "centered+scaling"}));
  ensemble_cmd->add_flag("--proper", ensemble.proper);
  ensemble_cmd->add_option("--out", ensemble.out, "Averaged embedding")->required();
  ensemble_cmd->add_option("--report", ensemble.report);

  std::string info_path;
  auto* info_cmd = app.add_subcommand("info", "Describe an embedding file");
  info_cmd->add_option("embedding", info_path)->required();

  // CLI11 consumes arguments back to front from a reversed vector.
  std::vector<std::string> args(raw_args.begin() + (raw_args.empty() ? 0 : 1), raw_args.end());
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : static_cast<int>(ErrorKind::kUsage);
  }
  try {
    if (common.threads > 0) kernels::set_thread_count(common.threads);
    if (*align_cmd) return cmd_align(align, common, out);
    if (*calibrate_cmd) return cmd_calibrate(calibrate, common, out);
    if (*eval_cmd) return cmd_eval(eval, common, out);
    if (*translate_cmd) return cmd_translate(translate, common, out);
    if (*ensemble_cmd) return cmd_ensemble(ensemble, common, out);
    if (*info_cmd) return cmd_info(info_path, common, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(ErrorKind::kNumeric);
  }
  return static_cast<int>(ErrorKind::kUsage);
}

}  // namespace embalign::cli
