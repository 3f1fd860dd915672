#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "lamper/embedding.hpp"
#include "lamper/prompt.hpp"
#include "lamper/svm.hpp"

namespace lamper {

struct RawSeriesSource {
  bool operator==(const RawSeriesSource&) const = default;
};

/// One column of the results: a single prompt kind, a fusion of kinds,
/// or the raw series.
struct MethodSpec {
  std::string name;
  std::variant<PromptKind, std::vector<PromptKind>, RawSeriesSource> source;
};

enum class BackendKind { Mock, Http };

struct BackendSpec {
  BackendKind kind = BackendKind::Mock;
  std::string endpoint;
  std::size_t mockDimension = 32;
  std::uint64_t mockSeed = 7;
  std::size_t mockMaxTokens = 512;
  std::size_t batchSize = 16;
  int retries = 3;
};

struct RunConfig {
  std::filesystem::path datasetRoot;
  std::vector<std::string> datasetFilter;  // empty: every dataset under the root
  BackendSpec backend;
  std::vector<PromptKind> promptKinds;
  std::vector<std::vector<PromptKind>> fusionSets;
  bool includeRawTsBenchmark = true;
  RenderConfig render;
  Pooling pooling = Pooling::Mean;
  std::vector<std::string> featureNames;
  SvmConfig svm;
  bool normalizeSeries = false;
  bool normalizeEmbeddings = false;
  std::filesystem::path outputDir = "lamper_out";
  std::filesystem::path cacheDir;  // empty: <outputDir>/cache
  std::size_t concurrency = 1;

  // Declaration order: prompt kinds, fusion sets, then the raw series.
  std::vector<MethodSpec> methods() const;
  // Every kind any method needs embeddings for, in canonical order.
  std::vector<PromptKind> requiredKinds() const;
};

std::string fusionName(const std::vector<PromptKind>& kinds);

/// Parses, defaults and checks a configuration. Keys before the first
/// section header are top-level; `[section]` prefixes later keys. Unknown
/// keys and bad values raise ConfigError with the line number.
/// Relative paths are resolved against `baseDir`.
RunConfig validateConfig(std::string_view text, const std::filesystem::path& baseDir = {});

RunConfig loadConfig(const std::filesystem::path& path);

}  // namespace lamper
