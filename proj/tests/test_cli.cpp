#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <random>
#include <sstream>

#include "embalign/cli.hpp"
#include "embalign/io.hpp"
#include "embalign/metrics.hpp"
#include "oracles.hpp"

using namespace embalign;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

RunResult run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "embalign");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const char* base = std::getenv("EMBALIGN_TEST_TMP");
    dir_ = fs::path(base ? base : ::testing::TempDir()) /
           ("cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string save(const std::string& name, const Embedding& e) {
    const fs::path p = dir_ / name;
    io::save_embedding(e, p);
    return p.string();
  }
  std::string write(const std::string& name, const std::string& body) {
    const fs::path p = dir_ / name;
    std::ofstream(p, std::ios::binary) << body;
    return p.string();
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
  std::mt19937_64 rng_{77};
};

}  // namespace

TEST_F(CliTest, UsageErrorsExitOne) {
  EXPECT_EQ(run_cli({}).code, 1);
  EXPECT_EQ(run_cli({"frobnicate"}).code, 1);
  const std::string e = save("e.txt", oracle::random_embedding(5, 2, rng_));
  EXPECT_EQ(run_cli({"align", e, e, "--variant", "shear"}).code, 1);
  EXPECT_EQ(run_cli({"align", e}).code, 1);
  EXPECT_EQ(run_cli({"--threads", "0", "info", e}).code, 1);
  EXPECT_EQ(run_cli({"calibrate", e, "--sigma", "-0.5"}).code, 1);
  EXPECT_EQ(run_cli({"translate", e, e, e, "--holdout", "1.5"}).code, 1);
  EXPECT_EQ(run_cli({"--help"}).code, 0);
}

TEST_F(CliTest, IoErrorsExitTwo) {
  EXPECT_EQ(run_cli({"info", path("missing.txt")}).code, 2);
  const std::string bad = write("bad.txt", "a 1 2\nb 1 oops\n");
  const RunResult r = run_cli({"info", bad});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find(":2:"), std::string::npos);
}

TEST_F(CliTest, NumericErrorsExitThree) {
  const std::string a = save("a.txt", Embedding({"x", "y"}, Matrix(2, 2, {1, 0, 0, 1})));
  const std::string b = save("b.txt", Embedding({"p", "q"}, Matrix(2, 2, {1, 0, 0, 1})));
  EXPECT_EQ(run_cli({"align", a, b}).code, 3);
  const std::string wide = save("w.txt", Embedding({"x", "y"}, Matrix(2, 3)));
  EXPECT_EQ(run_cli({"align", a, wide}).code, 3);
}

TEST_F(CliTest, AlignSelfIsExact) {
  const std::string e = save("e.txt", oracle::random_embedding(50, 6, rng_));
  const RunResult r = run_cli({"align", e, e});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_LT(j["rmse_after"].get<double>(), 1e-10);
  EXPECT_EQ(j["variant"], "rotation");
  EXPECT_NEAR(j["avg_cosine_after"].get<double>(), 1.0, 1e-12);
}

TEST_F(CliTest, AlignCenteredScalingRecoversSimilarity) {
  const Embedding target = oracle::random_embedding(200, 8, rng_);
  std::vector<double> shift(8, 3.0);
  const Embedding source =
      oracle::transform_rows(target, oracle::random_orthogonal(8, rng_), 2.5, shift);
  const RunResult r = run_cli({"align", save("s.txt", source), save("t.txt", target), "--variant",
                               "centered+scaling", "--out", path("moved.txt")});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_LT(j["rmse_after"].get<double>(), 1e-8);
  EXPECT_NEAR(j["scale"].get<double>(), 0.4, 1e-10);
  const Embedding moved = io::load_embedding({.path = path("moved.txt")});
  EXPECT_LT(rmse(target, moved), 1e-8);
}

TEST_F(CliTest, RotationLosesToScalingOnStretchedCopy) {
  const Embedding target = oracle::random_embedding(100, 3, rng_);
  const Embedding source =
      oracle::transform_rows(target, Matrix::diagonal(std::vector<double>{2.0, 2.5, 3.0}));
  const std::string s = save("s.txt", source), t = save("t.txt", target);
  const double rot = json::parse(run_cli({"align", s, t}).out)["rmse_after"].get<double>();
  const double scaled =
      json::parse(run_cli({"align", s, t, "--variant", "scaling"}).out)["rmse_after"].get<double>();
  EXPECT_GT(rot, scaled);
}

TEST_F(CliTest, AlignOutCoversFullSourceVocabulary) {
  const Embedding base = oracle::random_embedding(30, 4, rng_);
  std::vector<std::string> words = base.words();
  words[0] = "only_in_source";
  const Embedding source(words, base.vectors());
  const RunResult r =
      run_cli({"align", save("s.txt", source), save("t.txt", base), "--out", path("o.txt"),
               "--report", path("r.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(io::load_embedding({.path = path("o.txt")}).words(), words);
  EXPECT_EQ(json::parse(slurp(path("r.json")))["shared_words"], 29);
}

TEST_F(CliTest, AffineVariantReportsObjective) {
  const Embedding e = oracle::random_embedding(60, 4, rng_);
  const std::string p = save("e.txt", e);
  const RunResult r = run_cli({"align", p, p, "--variant", "affine", "--gamma", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_LT(j["rmse_after"].get<double>(), 1e-3);
  EXPECT_TRUE(j.contains("objective"));
}

TEST_F(CliTest, CalibrateWritesCsv) {
  const std::string e = save("e.txt", oracle::random_embedding(200, 10, rng_));
  const RunResult r = run_cli({"calibrate", e, "--sigma", "0", "--sigma", "0.1", "--sigma", "0.3",
                               "--fraction", "0.5", "--fraction", "1", "--seed", "9"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "sigma,fraction,rmse");
  std::vector<double> rmses;
  while (std::getline(lines, line)) rmses.push_back(std::stod(line.substr(line.rfind(',') + 1)));
  ASSERT_EQ(rmses.size(), 6u);
  EXPECT_LT(rmses[0], 1e-12);
  EXPECT_LT(rmses[0], rmses[1]);
  EXPECT_LT(rmses[1], rmses[2]);
  EXPECT_LT(rmses[3], 1e-12);
  EXPECT_LT(rmses[4], rmses[5]);
}

TEST_F(CliTest, EvalSimilarityAndAnalogy) {
  const Embedding e({"king", "queen", "man", "woman", "car"},
                    Matrix(5, 2, {3, 1, 3, 2, 1, 1, 1, 2, -1, 5}));
  const std::string p = save("e.txt", e);
  auto cos = [&](std::size_t i, std::size_t j) {
    return dot(e.row(i), e.row(j)) / std::sqrt(squared_norm(e.row(i)) * squared_norm(e.row(j)));
  };
  std::ostringstream sim;
  sim << "King queen " << io::format_double(cos(0, 1)) << "\nman woman "
      << io::format_double(cos(2, 3)) << "\ncar king " << io::format_double(cos(4, 0))
      << "\nboat car 1\n";
  const RunResult r = run_cli({"eval", p, p, write("sim.txt", sim.str()), "--kind", "sim"});
  ASSERT_EQ(r.code, 0) << r.err;
  const EvalReport report = io::report_from_json(r.out);
  EXPECT_NEAR(report.values.at("rho"), 1.0, 1e-12);
  EXPECT_EQ(report.skipped, 1u);

  const RunResult nolower = run_cli(
      {"eval", p, p, write("sim2.txt", sim.str()), "--kind", "sim", "--no-lowercase"});
  EXPECT_EQ(io::report_from_json(nolower.out).skipped, 2u);

  // woman − man + king = (3, 2) = queen.
  const RunResult a = run_cli({"eval", p, p, write("an.txt", ": s\nman woman king queen\n"),
                               "--kind", "analogy", "--k", "1,2"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(io::report_from_json(a.out).values.at("acc@1"), 1.0);
}

TEST_F(CliTest, TranslateExactRotation) {
  const Embedding s = oracle::random_embedding(100, 6, rng_);
  const Embedding rotated = oracle::transform_rows(s, oracle::random_orthogonal(6, rng_));
  std::vector<std::string> twords;
  std::string lex;
  for (const auto& w : s.words()) {
    twords.push_back("es_" + w);
    lex += w + "\tes_" + w + "\n";
  }
  const RunResult r = run_cli({"translate", save("s.txt", s),
                               save("t.txt", Embedding(twords, rotated.vectors())),
                               write("lex.txt", lex), "--holdout", "0.3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const EvalReport rep = io::report_from_json(r.out);
  EXPECT_EQ(rep.values.at("p@1"), 1.0);
  EXPECT_LE(rep.values.at("p@1"), rep.values.at("p@5"));
  EXPECT_EQ(rep.config.at("seed"), std::to_string(cli::kDefaultSeed));
}

TEST_F(CliTest, EnsembleOfIdenticalFilesIsOriginal) {
  const Embedding a = oracle::random_embedding(40, 5, rng_);
  std::vector<std::string> words = a.words();
  words[3] = "elsewhere";
  const std::string pa = save("a.txt", a);
  const std::string pb = save("b.txt", Embedding(words, a.vectors()));
  const RunResult r = run_cli({"ensemble", pa, pb, "--out", path("avg.txt")});
  ASSERT_EQ(r.code, 0) << r.err;
  const Embedding avg = io::load_embedding({.path = path("avg.txt")});
  EXPECT_EQ(avg.size(), 39u);
  EXPECT_FALSE(avg.contains("w3"));
  for (std::size_t i = 0; i < avg.size(); ++i) {
    const auto idx = *a.index_of(avg.word(i));
    for (std::size_t k = 0; k < 5; ++k) EXPECT_NEAR(avg.row(i)[k], a.row(idx)[k], 1e-12);
  }
  EXPECT_EQ(run_cli({"ensemble", pa, pb}).code, 1);
}

TEST_F(CliTest, InfoDescribesFile) {
  const std::string p = write("h.txt", "2 3\na 1 2 2\nb 0 0 0\n");
  const RunResult r = run_cli({"info", p});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["words"], 2);
  EXPECT_EQ(j["dim"], 3);
  EXPECT_EQ(j["had_header"], true);
  EXPECT_EQ(j["zero_rows"], 1);
}

TEST_F(CliTest, SingleThreadRunsAreByteIdentical) {
  const std::string s = save("s.txt", oracle::random_embedding(300, 12, rng_));
  const std::string t = save("t.txt", oracle::random_embedding(300, 12, rng_));
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"--threads=1", "align", s, t, "--variant", "centered+scaling"},
           {"--threads=1", "calibrate", s, "--sigma", "0.2", "--seed", "5"}}) {
    const RunResult first = run_cli(args);
    const RunResult second = run_cli(args);
    ASSERT_EQ(first.code, 0) << first.err;
    EXPECT_EQ(first.out, second.out);
  }
}
