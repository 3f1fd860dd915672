#include "lamper/runner.hpp"

#include <atomic>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "lamper/cache.hpp"
#include "lamper/errors.hpp"
#include "lamper/series_embedder.hpp"

namespace lamper {

namespace fs = std::filesystem;

std::shared_ptr<const EmbeddingBackend> makeBackend(const BackendSpec& spec) {
  if (spec.kind == BackendKind::Mock) {
    return std::make_shared<MockBackend>(spec.mockDimension, spec.mockSeed, spec.mockMaxTokens);
  }
  HttpBackendOptions options;
  options.endpoint = spec.endpoint;
  options.batchSize = spec.batchSize;
  options.retries = spec.retries;
  return std::make_shared<HttpBackend>(options);
}

SampleMatrix rawSeriesMatrix(const std::vector<LabeledSeries>& series, std::size_t expectedLength) {
  SampleMatrix X;
  for (const auto& s : series) {
    if (expectedLength == 0) expectedLength = s.values.size();
    if (s.values.size() != expectedLength) {
      throw UnequalLengthError("series lengths differ (" + std::to_string(expectedLength) + " vs " +
                               std::to_string(s.values.size()) + "); the raw-series benchmark needs equal lengths");
    }
    X.appendRow(s.values);
  }
  return X;
}

namespace {

using KindEmbeddings = std::map<PromptKind, std::vector<Embedding>>;

std::vector<long> labelsOf(const std::vector<LabeledSeries>& series) {
  std::vector<long> labels;
  labels.reserve(series.size());
  for (const auto& s : series) labels.push_back(s.label);
  return labels;
}

SampleMatrix embeddingMatrix(const KindEmbeddings& byKind, const std::vector<PromptKind>& kinds, std::size_t rows) {
  SampleMatrix X;
  for (std::size_t i = 0; i < rows; ++i) {
    if (kinds.size() == 1) {
      X.appendRow(byKind.at(kinds.front())[i]);
      continue;
    }
    std::vector<std::pair<PromptKind, Embedding>> parts;
    for (const PromptKind k : kinds) parts.emplace_back(k, byKind.at(k)[i]);
    X.appendRow(fuse(std::move(parts)));
  }
  return X;
}

void writeFile(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  if (!out) throw Error("cannot write " + path.string());
}

class DatasetWorker {
 public:
  DatasetWorker(const RunConfig& config, const std::vector<MethodSpec>& methods, const SeriesEmbedder& embedder,
                Logger& logger)
      : config_(config), methods_(methods), embedder_(embedder), logger_(logger) {}

  // Fills column `d` of `matrix`.
  void run(const std::string& name, std::size_t d, AccuracyMatrix& matrix) const {
    TimeSeriesDataset ds;
    try {
      ds = loadDataset(config_.datasetRoot, name, LoadOptions{config_.normalizeSeries});
    } catch (const BackendError&) {
      throw;
    } catch (const Error& e) {
      logger_.warn(name, "", std::string("dataset skipped: ") + e.what());
      return;
    }
    logger_.info(name, "", "loaded " + std::to_string(ds.train.size()) + " train / " + std::to_string(ds.test.size()) +
                               " test series, " + std::to_string(ds.classCount) + " classes");

    KindEmbeddings train;
    KindEmbeddings test;
    std::set<PromptKind> failed;
    for (const PromptKind kind : config_.requiredKinds()) {
      try {
        train[kind] = embedSplit(ds, Split::Train, kind);
        test[kind] = embedSplit(ds, Split::Test, kind);
      } catch (const BackendError&) {
        throw;
      } catch (const Error& e) {
        failed.insert(kind);
        logger_.warn(name, kindName(kind), std::string("embedding failed: ") + e.what());
      }
    }

    const auto trainLabels = labelsOf(ds.train);
    const auto testLabels = labelsOf(ds.test);
    for (std::size_t m = 0; m < methods_.size(); ++m) {
      const MethodSpec& method = methods_[m];
      try {
        SampleMatrix trainX;
        SampleMatrix testX;
        if (std::holds_alternative<RawSeriesSource>(method.source)) {
          trainX = rawSeriesMatrix(ds.train);
          testX = rawSeriesMatrix(ds.test, trainX.cols());
        } else {
          const std::vector<PromptKind> kinds = std::holds_alternative<PromptKind>(method.source)
                                                    ? std::vector<PromptKind>{std::get<PromptKind>(method.source)}
                                                    : std::get<std::vector<PromptKind>>(method.source);
          for (const PromptKind k : kinds) {
            if (failed.contains(k)) throw Error(std::string(kindName(k)) + " embeddings are unavailable");
          }
          trainX = embeddingMatrix(train, kinds, ds.train.size());
          testX = embeddingMatrix(test, kinds, ds.test.size());
        }
        const SvmModel model = trainMulticlass(trainX, trainLabels, config_.svm);
        if (!model.converged) logger_.warn(name, method.name, "SVM iteration guard reached; using best-so-far model");
        const double accuracy = evaluate(model, testX, testLabels);
        matrix.values[m][d] = accuracy;
        logger_.info(name, method.name, "accuracy " + std::to_string(accuracy));
      } catch (const BackendError&) {
        throw;
      } catch (const Error& e) {
        logger_.warn(name, method.name, std::string("cell skipped: ") + e.what());
      }
    }
  }

 private:
  std::vector<Embedding> embedSplit(const TimeSeriesDataset& ds, Split split, PromptKind kind) const {
    std::vector<Embedding> out;
    const auto& series = ds.split(split);
    out.reserve(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) {
      Embedding e = embedder_.embed(series[i].values, kind, SeriesRef{ds.name, split, i});
      out.push_back(config_.normalizeEmbeddings ? l2Normalize(std::move(e)) : std::move(e));
    }
    return out;
  }

  const RunConfig& config_;
  const std::vector<MethodSpec>& methods_;
  const SeriesEmbedder& embedder_;
  Logger& logger_;
};

}  // namespace

RunOutcome runBenchmark(const RunConfig& config, Logger& logger, std::shared_ptr<const EmbeddingBackend> backend) {
  const auto methods = config.methods();
  std::vector<std::string> datasets = config.datasetFilter.empty() ? listDatasets(config.datasetRoot) : config.datasetFilter;
  if (datasets.empty()) throw DatasetError("no datasets found under " + config.datasetRoot.string());

  if (!backend) backend = makeBackend(config.backend);
  auto instrumented = std::make_shared<InstrumentedBackend>(backend, config.concurrency);
  auto cache = std::make_shared<EmbeddingCache>(config.cacheDir);
  const SeriesEmbedder embedder(instrumented, EmbedOptions{config.render, config.pooling, config.featureNames}, cache);
  const BackendInfo info = instrumented->info();
  logger.info("", "", "backend " + info.modelName + ", max_tokens " + std::to_string(info.maxTokens) + ", dimension " +
                          std::to_string(info.dimension));

  AccuracyMatrix matrix;
  matrix.datasets = datasets;
  for (const auto& m : methods) matrix.methods.push_back(m.name);
  matrix.values.assign(methods.size(), std::vector<std::optional<double>>(datasets.size()));

  const DatasetWorker worker(config, methods, embedder, logger);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  std::exception_ptr failure;
  std::mutex failureMutex;
  {
    std::vector<std::jthread> pool;
    const std::size_t workers = std::min(config.concurrency, datasets.size());
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t d = next++; d < datasets.size() && !abort; d = next++) {
          try {
            worker.run(datasets[d], d, matrix);
          } catch (...) {
            std::lock_guard lock(failureMutex);
            if (!failure) failure = std::current_exception();
            abort = true;
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);

  RunOutcome outcome;
  outcome.matrix = matrix;
  outcome.cacheHits = cache->hits();
  outcome.cacheMisses = cache->misses();
  outcome.backendEmbedCalls = instrumented->embedCalls();
  outcome.peakBackendConcurrency = instrumented->peakConcurrency();
  outcome.maxSubmittedTokens = instrumented->maxSubmittedTokens();

  fs::create_directories(config.outputDir);
  const fs::path perDataset = config.outputDir / "per_dataset.csv";
  writeFile(perDataset, perDatasetCsv(matrix));
  outcome.files.push_back(perDataset);
  if (matrix.completeColumns().datasets.empty()) throw Error("no dataset produced a result for every method");

  outcome.report = buildRankReport(matrix);
  std::vector<std::string> fusionMethods;
  for (const auto& m : methods) {
    if (std::holds_alternative<std::vector<PromptKind>>(m.source)) fusionMethods.push_back(m.name);
  }
  const std::pair<const char*, std::string> files[] = {
      {"summary.csv", summaryCsv(outcome.report)},
      {"ablation.csv", subsetSummaryCsv(outcome.report, fusionMethods)},
      {"cd_diagram.svg", renderCdDiagram(outcome.report)},
  };
  for (const auto& [file, content] : files) {
    writeFile(config.outputDir / file, content);
    outcome.files.push_back(config.outputDir / file);
  }
  for (const auto& d : outcome.report.skippedDatasets) logger.warn(d, "", "dataset excluded from ranking");
  logger.info("", "", "cache hits " + std::to_string(outcome.cacheHits) + ", misses " + std::to_string(outcome.cacheMisses));
  return outcome;
}

}  // namespace lamper
