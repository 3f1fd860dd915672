#include <gtest/gtest.h>

#include "lamper/config.hpp"
#include "lamper/errors.hpp"
#include "temp_dir.hpp"

using namespace lamper;

namespace {

std::string errorOf(std::string_view text) {
  try {
    validateConfig(text, "/base");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::vector<std::string> methodNames(const RunConfig& c) {
  std::vector<std::string> names;
  for (const auto& m : c.methods()) names.push_back(m.name);
  return names;
}

}  // namespace

TEST(Config, MinimalDefaults) {
  const auto c = validateConfig("dataset_root = data\nbackend = mock\n", "/base");
  EXPECT_EQ(c.datasetRoot, "/base/data");
  EXPECT_EQ(c.backend.kind, BackendKind::Mock);
  EXPECT_EQ(c.render.precision, 4);
  EXPECT_EQ(c.render.valueSeparator, ", ");
  EXPECT_EQ(c.svm.C, 1.0);
  EXPECT_FALSE(c.svm.gamma.has_value());
  EXPECT_EQ(c.svm.tolerance, 1e-3);
  EXPECT_EQ(c.svm.maxPasses, 10);
  EXPECT_EQ(c.concurrency, 1u);
  EXPECT_TRUE(c.includeRawTsBenchmark);
  EXPECT_EQ(c.pooling, Pooling::Mean);
  EXPECT_EQ(c.featureNames, canonicalFeatureNames());
  EXPECT_EQ(c.backend.mockDimension, 32u);
  EXPECT_EQ(c.backend.mockSeed, 7u);
  EXPECT_EQ(methodNames(c), (std::vector<std::string>{"SDP", "DDP", "FP", "SDP+DDP", "SDP+FP", "DDP+FP", "Fusion", "TS"}));
}

TEST(Config, FusionImpliesKinds) {
  const auto c = validateConfig("dataset_root = d\nprompt_kinds = sdp\nfusion_sets = sdp+fp\nraw_ts_benchmark = no\n");
  EXPECT_EQ(methodNames(c), (std::vector<std::string>{"SDP", "SDP+FP"}));
  EXPECT_EQ(c.requiredKinds(), (std::vector<PromptKind>{PromptKind::SDP, PromptKind::FP}));
}

TEST(Config, FusionSetIsCanonicalised) {
  const auto c = validateConfig("dataset_root = d\nprompt_kinds = sdp\nfusion_sets = fp+ddp+sdp\n");
  EXPECT_EQ(methodNames(c), (std::vector<std::string>{"SDP", "Fusion", "TS"}));
  EXPECT_EQ(fusionName({PromptKind::DDP, PromptKind::FP}), "DDP+FP");
}

TEST(Config, UnknownKeyNamedWithLine) {
  const auto msg = errorOf("dataset_root = d\n\n[svm]\ngama = 0.5\n");
  EXPECT_NE(msg.find("gama"), std::string::npos) << msg;
  EXPECT_NE(msg.find("line 4"), std::string::npos) << msg;
}

TEST(Config, InvalidValues) {
  EXPECT_NE(errorOf("dataset_root = d\n[svm]\nc = -1\n").find("line 3"), std::string::npos);
  EXPECT_NE(errorOf("dataset_root = d\n[render]\nprecision = 13\n").find("line 3"), std::string::npos);
  EXPECT_NE(errorOf("dataset_root = d\nconcurrency = 0\n").find("line 2"), std::string::npos);
  EXPECT_NE(errorOf("dataset_root = d\nprompt_kinds = sdp, xyz\n").find("line 2"), std::string::npos);
  EXPECT_NE(errorOf("dataset_root = d\nbackend = gpu\n").find("line 2"), std::string::npos);
  EXPECT_NE(errorOf("dataset_root = d\nfeatures = sum, kurtosis\n").find("kurtosis"), std::string::npos);
  EXPECT_NE(errorOf("dataset_root = d\ndataset_root = e\n").find("line 2"), std::string::npos);
  EXPECT_NE(errorOf("dataset_root = d\n[nope]\n").find("line 2"), std::string::npos);
  EXPECT_NE(errorOf("dataset_root = d\njust text\n").find("line 2"), std::string::npos);
  EXPECT_NE(errorOf("dataset_root = d\nfusion_sets = sdp\n").find("line 2"), std::string::npos);
}

TEST(Config, Invariants) {
  EXPECT_FALSE(errorOf("backend = mock\n").empty());
  EXPECT_NE(errorOf("dataset_root = d\nbackend = http\n").find("endpoint"), std::string::npos);
  EXPECT_FALSE(errorOf("dataset_root = d\nprompt_kinds = sdp\nfusion_sets =\nraw_ts_benchmark = false\n").empty());
}

TEST(Config, CommentsQuotesAndSections) {
  const auto c = validateConfig(
      "# header\n"
      "dataset_root = \"/abs/data\"  # trailing\n"
      "datasets = Coffee, Beef\n"
      "backend = http\n"
      "endpoint = http://127.0.0.1:9000\n"
      "[render]\n"
      "separator = \" \"\n"
      "precision = 2\n"
      "[http]\n"
      "batch_size = 8\n"
      "retries = 5\n"
      "[svm]\n"
      "gamma = 0.25\n"
      "max_passes = 4\n");
  EXPECT_EQ(c.datasetRoot, "/abs/data");
  EXPECT_EQ(c.datasetFilter, (std::vector<std::string>{"Coffee", "Beef"}));
  EXPECT_EQ(c.backend.kind, BackendKind::Http);
  EXPECT_EQ(c.backend.endpoint, "http://127.0.0.1:9000");
  EXPECT_EQ(c.render.valueSeparator, " ");
  EXPECT_EQ(c.render.precision, 2);
  EXPECT_EQ(c.backend.batchSize, 8u);
  EXPECT_EQ(c.backend.retries, 5);
  EXPECT_EQ(c.svm.gamma, 0.25);
  EXPECT_EQ(c.svm.maxPasses, 4);
}

TEST(Config, LoadResolvesAgainstFileDirectory) {
  lamper::testing::TempDir dir;
  const auto path = dir.write("cfg/run.cfg", "dataset_root = ../data\noutput_dir = out\n");
  const auto c = loadConfig(path);
  EXPECT_EQ(c.datasetRoot, dir.path() / "cfg" / "../data");
  EXPECT_EQ(c.outputDir, dir.path() / "cfg" / "out");
  EXPECT_THROW(loadConfig(dir.path() / "missing.cfg"), ConfigError);
}
