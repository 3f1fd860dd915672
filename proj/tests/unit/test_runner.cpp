#include <gtest/gtest.h>

#include <sstream>

#include "lamper/config.hpp"
#include "lamper/errors.hpp"
#include "lamper/runner.hpp"
#include "temp_dir.hpp"

using namespace lamper;
using lamper::testing::readFile;
using lamper::testing::TempDir;

namespace {

const std::filesystem::path kSynthetic = std::filesystem::path(LAMPER_SOURCE_DIR) / "data" / "synthetic";

RunConfig baseConfig(const TempDir& dir, std::string extra = "") {
  return validateConfig("dataset_root = " + kSynthetic.string() + "\noutput_dir = " + (dir.path() / "out").string() +
                        "\nprompt_kinds = sdp, ddp\nfusion_sets = sdp+ddp\n" + extra);
}

void writeToy(const TempDir& dir, const std::string& name, const std::string& train, const std::string& test) {
  dir.write("data/" + name + "/" + name + "_TRAIN.tsv", train);
  dir.write("data/" + name + "/" + name + "_TEST.tsv", test);
}

}  // namespace

TEST(RawSeriesMatrix, EqualLengthRequired) {
  const std::vector<LabeledSeries> ok{{1, {1, 2}}, {2, {3, 4}}};
  const auto X = rawSeriesMatrix(ok);
  EXPECT_EQ(X.rows(), 2u);
  EXPECT_EQ(X.cols(), 2u);
  const std::vector<LabeledSeries> bad{{1, {1, 2}}, {2, {3}}};
  EXPECT_THROW(rawSeriesMatrix(bad), UnequalLengthError);
  EXPECT_THROW(rawSeriesMatrix(ok, 3), UnequalLengthError);
}

TEST(Runner, StructureAndMethodOrder) {
  TempDir dir;
  const auto outcome = runBenchmark(baseConfig(dir));
  EXPECT_EQ(outcome.matrix.methods, (std::vector<std::string>{"SDP", "DDP", "SDP+DDP", "TS"}));
  EXPECT_EQ(outcome.matrix.datasets, (std::vector<std::string>{"SynthBump", "SynthSine", "SynthTrend"}));
  for (const auto* f : {"summary.csv", "per_dataset.csv", "ablation.csv", "cd_diagram.svg"}) {
    EXPECT_TRUE(std::filesystem::exists(dir.path() / "out" / f)) << f;
  }
  const auto summary = readFile(dir.path() / "out" / "summary.csv");
  std::istringstream lines(summary);
  std::string line;
  std::vector<std::string> rows;
  while (std::getline(lines, line)) {
    if (!line.empty() && line[0] != '#') rows.push_back(line.substr(0, line.find(',')));
  }
  EXPECT_EQ(rows, (std::vector<std::string>{"method", "SDP", "DDP", "SDP+DDP", "TS"}));
  const auto ablation = readFile(dir.path() / "out" / "ablation.csv");
  EXPECT_NE(ablation.find("SDP+DDP,"), std::string::npos);
  EXPECT_EQ(ablation.find("\nSDP,"), std::string::npos);
}

TEST(Runner, RerunIsByteIdenticalFromCache) {
  TempDir dir;
  const auto cfg = baseConfig(dir, "concurrency = 3\n");
  const auto first = runBenchmark(cfg);
  EXPECT_GT(first.cacheMisses, 0u);
  std::map<std::string, std::string> before;
  for (const auto& f : first.files) before[f.filename().string()] = readFile(f);
  const auto second = runBenchmark(cfg);
  EXPECT_EQ(second.cacheMisses, 0u);
  EXPECT_EQ(second.cacheHits, first.cacheHits + first.cacheMisses);
  EXPECT_EQ(second.backendEmbedCalls, 0u);
  for (const auto& f : second.files) EXPECT_EQ(readFile(f), before[f.filename().string()]) << f;
}

TEST(Runner, ConcurrencyCapAndBudget) {
  TempDir dir;
  const auto outcome = runBenchmark(baseConfig(dir, "concurrency = 2\n[mock]\nmax_tokens = 64\n"));
  EXPECT_LE(outcome.peakBackendConcurrency, 2u);
  EXPECT_GE(outcome.peakBackendConcurrency, 1u);
  EXPECT_LE(outcome.maxSubmittedTokens, 64u);
  EXPECT_GT(outcome.backendEmbedCalls, 0u);
}

TEST(Runner, UnequalLengthMasksTsCell) {
  TempDir dir;
  writeToy(dir, "Even", "1\t0\t0\t0\n2\t5\t5\t5\n1\t0.1\t0\t0\n2\t5\t5.1\t5\n", "1\t0\t0.1\t0\n2\t5\t5\t4.9\n");
  writeToy(dir, "Ragged", "1\t0\t0\t0\n2\t5\t5\n1\t0.1\t0\n2\t5\t5.1\t5\n", "1\t0\t0.1\n2\t5\t5\t4.9\n");
  const auto cfg = validateConfig("dataset_root = " + (dir.path() / "data").string() +
                                  "\noutput_dir = " + (dir.path() / "out").string() + "\nprompt_kinds = sdp\nfusion_sets =\n");
  const auto outcome = runBenchmark(cfg);
  ASSERT_EQ(outcome.matrix.datasets, (std::vector<std::string>{"Even", "Ragged"}));
  EXPECT_TRUE(outcome.matrix.values[0][1].has_value());   // SDP on Ragged
  EXPECT_FALSE(outcome.matrix.values[1][1].has_value());  // TS on Ragged
  EXPECT_EQ(outcome.report.skippedDatasets, (std::vector<std::string>{"Ragged"}));
  EXPECT_EQ(outcome.report.datasetCount, 1u);
  const auto summary = readFile(dir.path() / "out" / "summary.csv");
  EXPECT_NE(summary.find("# skipped_datasets: Ragged\n"), std::string::npos) << summary;
  const auto perDataset = readFile(dir.path() / "out" / "per_dataset.csv");
  EXPECT_NE(perDataset.find(",TS\n"), std::string::npos) << perDataset;
}

TEST(Runner, DatasetFilterAndMissing) {
  TempDir dir;
  auto cfg = baseConfig(dir, "datasets = SynthSine\n");
  const auto outcome = runBenchmark(cfg);
  EXPECT_EQ(outcome.matrix.datasets, (std::vector<std::string>{"SynthSine"}));
  cfg.datasetFilter = {"NoSuchDataset"};
  EXPECT_THROW(runBenchmark(cfg), Error);
}

TEST(Runner, BackendFailureAborts) {
  class Broken final : public EmbeddingBackend {
   public:
    BackendInfo info() const override { return {"broken", 512, 4}; }
    using EmbeddingBackend::countTokens;
    std::vector<std::size_t> countTokens(std::span<const std::string> texts) const override {
      return std::vector<std::size_t>(texts.size(), 3);
    }

   protected:
    std::vector<Embedding> embedWithinBudget(std::span<const std::string>) const override {
      throw BackendError("down");
    }
  };
  TempDir dir;
  EXPECT_THROW(runBenchmark(baseConfig(dir), Logger::null(), std::make_shared<Broken>()), BackendError);
}

TEST(Runner, LogsStructuredRecords) {
  TempDir dir;
  std::ostringstream sink;
  Logger logger(&sink);
  runBenchmark(baseConfig(dir, "datasets = SynthBump\n"), logger);
  std::istringstream lines(sink.str());
  std::string line;
  int n = 0;
  while (std::getline(lines, line)) {
    ++n;
    EXPECT_EQ(line.rfind("{\"ts\":", 0), 0u) << line;
    EXPECT_NE(line.find("\"level\":"), std::string::npos);
    EXPECT_NE(line.find("\"dataset\":"), std::string::npos);
    EXPECT_NE(line.find("\"method\":"), std::string::npos);
    EXPECT_NE(line.find("\"message\":"), std::string::npos);
  }
  EXPECT_GT(n, 0);
}
