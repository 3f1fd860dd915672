#pragma once

#include <filesystem>
#include <memory>
#include <vector>

#include "lamper/config.hpp"
#include "lamper/dataset.hpp"
#include "lamper/embedding.hpp"
#include "lamper/log.hpp"
#include "lamper/stats.hpp"

namespace lamper {

struct RunOutcome {
  AccuracyMatrix matrix;
  RankReport report;
  std::vector<std::filesystem::path> files;
  std::size_t cacheHits = 0;
  std::size_t cacheMisses = 0;
  std::size_t backendEmbedCalls = 0;
  std::size_t peakBackendConcurrency = 0;
  std::size_t maxSubmittedTokens = 0;
};

std::shared_ptr<const EmbeddingBackend> makeBackend(const BackendSpec& spec);

/// Raw-series feature matrix; throws UnequalLengthError when the series
/// differ in length.
SampleMatrix rawSeriesMatrix(const std::vector<LabeledSeries>& series, std::size_t expectedLength = 0);

/// Runs every method on every dataset, then ranks and writes summary.csv,
/// per_dataset.csv, ablation.csv and cd_diagram.svg into the output
/// directory. Failures confined to a dataset mask its cells; backend and
/// configuration failures abort. `backend` overrides the configured one.
RunOutcome runBenchmark(const RunConfig& config, Logger& logger = Logger::null(),
                        std::shared_ptr<const EmbeddingBackend> backend = nullptr);

}  // namespace lamper
