#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "lamper/config.hpp"
#include "lamper/dataset.hpp"
#include "lamper/embedding.hpp"
#include "lamper/errors.hpp"
#include "lamper/features.hpp"
#include "lamper/prompt.hpp"
#include "lamper/runner.hpp"
#include "lamper/stats.hpp"
#include "lamper/svm.hpp"

namespace py = pybind11;
using namespace lamper;

namespace {

TokenCounter counterOrMock(const std::optional<std::function<std::size_t(std::string)>>& counter) {
  if (!counter) return &MockBackend::countMockTokens;
  return [fn = *counter](std::string_view text) { return fn(std::string(text)); };
}

SampleMatrix toMatrix(const std::vector<std::vector<double>>& rows) { return SampleMatrix::fromRows(rows); }

AccuracyMatrix toAccuracyMatrix(const std::vector<std::string>& methods, const std::vector<std::string>& datasets,
                                const std::vector<std::vector<std::optional<double>>>& values) {
  AccuracyMatrix m{methods, datasets, values};
  m.validate();
  return m;
}

}  // namespace

PYBIND11_MODULE(_lamper, m) {
  m.doc() = "Prompt-embedding time-series classification benchmark";

  static py::exception<Error> errorType(m, "LamperError");
  py::register_exception<BudgetError>(m, "BudgetError", errorType.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", errorType.ptr());
  py::register_exception<UnequalLengthError>(m, "UnequalLengthError", errorType.ptr());

  py::class_<LabeledSeries>(m, "LabeledSeries")
      .def(py::init<>())
      .def_readwrite("label", &LabeledSeries::label)
      .def_readwrite("values", &LabeledSeries::values)
      .def("__repr__", [](const LabeledSeries& s) {
        return "LabeledSeries(label=" + std::to_string(s.label) + ", n=" + std::to_string(s.values.size()) + ")";
      });

  py::class_<TimeSeriesDataset>(m, "TimeSeriesDataset")
      .def_readonly("name", &TimeSeriesDataset::name)
      .def_readonly("train", &TimeSeriesDataset::train)
      .def_readonly("test", &TimeSeriesDataset::test)
      .def_readonly("class_count", &TimeSeriesDataset::classCount);

  m.def("parse_ucr", &parseUcr, py::arg("text"));
  m.def("format_ucr_line", &formatUcrLine, py::arg("series"), py::arg("separator") = '\t');
  m.def(
      "load_dataset",
      [](const std::filesystem::path& root, const std::string& name, bool zNormalize) {
        return loadDataset(root, name, LoadOptions{zNormalize});
      },
      py::arg("root"), py::arg("name"), py::arg("z_normalize") = false);
  m.def("list_datasets", &listDatasets, py::arg("root"));

  m.def("canonical_feature_names", &canonicalFeatureNames);
  m.def(
      "extract_features",
      [](const std::vector<double>& values, std::optional<std::vector<std::string>> names) {
        const FeatureVector fv = names ? extractFeatures(values, *names) : extractFeatures(values);
        std::vector<std::pair<std::string, double>> out;
        for (const auto& f : fv.entries) out.emplace_back(f.name, f.value);
        return out;
      },
      py::arg("values"), py::arg("names") = py::none());

  py::enum_<PromptKind>(m, "PromptKind")
      .value("SDP", PromptKind::SDP)
      .value("DDP", PromptKind::DDP)
      .value("FP", PromptKind::FP);

  py::class_<SubPrompt>(m, "SubPrompt")
      .def_readonly("kind", &SubPrompt::kind)
      .def_readonly("index", &SubPrompt::index)
      .def_readonly("total", &SubPrompt::total)
      .def_readonly("text", &SubPrompt::text);

  m.def(
      "format_value", [](double x, int precision) { return formatValue(x, RenderConfig{precision, ", "}); },
      py::arg("x"), py::arg("precision") = 4);
  m.def("ordinal", &ordinal);
  m.def(
      "slice_series",
      [](const std::vector<double>& values, std::size_t chunkLen) {
        std::vector<std::vector<double>> out;
        for (const auto chunk : sliceSeries(values, chunkLen)) out.emplace_back(chunk.begin(), chunk.end());
        return out;
      },
      py::arg("values"), py::arg("chunk_len"));
  m.def("mock_count_tokens", &MockBackend::countMockTokens, py::arg("text"));
  m.def(
      "compute_chunk_len",
      [](const std::vector<double>& values, PromptKind kind, std::size_t budget, int precision,
         std::optional<std::function<std::size_t(std::string)>> counter) {
        return computeChunkLen(values, kind, RenderConfig{precision, ", "}, budget, counterOrMock(counter));
      },
      py::arg("values"), py::arg("kind"), py::arg("budget"), py::arg("precision") = 4, py::arg("counter") = py::none());
  m.def(
      "build_prompts",
      [](const std::vector<double>& values, PromptKind kind, std::size_t budget, int precision,
         const std::string& separator, std::optional<std::function<std::size_t(std::string)>> counter) {
        const RenderConfig cfg{precision, separator};
        const TokenCounter count = counterOrMock(counter);
        switch (kind) {
          case PromptKind::SDP: return buildSdp(values, cfg, budget, count);
          case PromptKind::DDP: return buildDdp(values, cfg, budget, count);
          case PromptKind::FP: return buildFp(extractFeatures(values), cfg, budget, count);
        }
        throw InvalidArgument("unknown prompt kind");
      },
      py::arg("values"), py::arg("kind"), py::arg("budget") = 512, py::arg("precision") = 4,
      py::arg("separator") = ", ", py::arg("counter") = py::none());

  m.def("mock_embed", &mockEmbed, py::arg("text"), py::arg("dimension"), py::arg("seed"));
  m.def("mean_pool", [](const std::vector<Embedding>& e) { return meanPool(e); });
  m.def("fuse", &fuse, py::arg("parts"));

  py::class_<SvmConfig>(m, "SvmConfig")
      .def(py::init<>())
      .def_readwrite("C", &SvmConfig::C)
      .def_readwrite("gamma", &SvmConfig::gamma)
      .def_readwrite("tolerance", &SvmConfig::tolerance)
      .def_readwrite("max_passes", &SvmConfig::maxPasses)
      .def_readwrite("max_iterations", &SvmConfig::maxIterations);

  py::class_<SvmModel>(m, "SvmModel")
      .def_readonly("classes", &SvmModel::classes)
      .def_readonly("gamma", &SvmModel::gamma)
      .def_readonly("dimension", &SvmModel::dimension)
      .def_property_readonly("pair_count", [](const SvmModel& s) { return s.pairwiseModels.size(); })
      .def("predict", [](const SvmModel& s, const std::vector<double>& x) { return predict(s, x); })
      .def("evaluate", [](const SvmModel& s, const std::vector<std::vector<double>>& X, const std::vector<long>& y) {
        return evaluate(s, toMatrix(X), y);
      });

  m.def("rbf_kernel", [](const std::vector<double>& x, const std::vector<double>& y, double gamma) {
    return rbfKernel(x, y, gamma);
  });
  m.def(
      "resolve_gamma",
      [](const std::vector<std::vector<double>>& X, const SvmConfig& cfg) { return resolveGamma(toMatrix(X), cfg); },
      py::arg("X"), py::arg("config") = SvmConfig{});
  m.def(
      "train_svm",
      [](const std::vector<std::vector<double>>& X, const std::vector<long>& labels, const SvmConfig& cfg) {
        return trainMulticlass(toMatrix(X), labels, cfg);
      },
      py::arg("X"), py::arg("labels"), py::arg("config") = SvmConfig{});

  py::class_<RankReport>(m, "RankReport")
      .def_readonly("methods", &RankReport::methods)
      .def_readonly("average_accuracy", &RankReport::averageAccuracy)
      .def_readonly("average_rank", &RankReport::averageRank)
      .def_readonly("dataset_count", &RankReport::datasetCount)
      .def_readonly("friedman", &RankReport::friedman)
      .def_readonly("cd", &RankReport::cd)
      .def_readonly("cliques", &RankReport::cliques)
      .def_readonly("skipped_datasets", &RankReport::skippedDatasets)
      .def("cd_diagram", &renderCdDiagram);

  m.def("rank_column", &rankColumn, py::arg("accuracies"));
  m.def("friedman_statistic", &friedmanStatistic, py::arg("average_ranks"), py::arg("dataset_count"));
  m.def("nemenyi_cd", &nemenyiCd, py::arg("k"), py::arg("dataset_count"), py::arg("alpha") = 0.05);
  m.def("cd_cliques", &cdCliques, py::arg("average_ranks"), py::arg("cd"));
  m.def(
      "rank_report",
      [](const std::vector<std::string>& methods, const std::vector<std::string>& datasets,
         const std::vector<std::vector<std::optional<double>>>& values) {
        return buildRankReport(toAccuracyMatrix(methods, datasets, values));
      },
      py::arg("methods"), py::arg("datasets"), py::arg("values"));

  m.def(
      "run_benchmark",
      [](const std::filesystem::path& configPath) {
        const RunConfig cfg = loadConfig(configPath);
        RunOutcome outcome;
        {
          py::gil_scoped_release release;
          outcome = runBenchmark(cfg);
        }
        py::dict result;
        result["report"] = outcome.report;
        result["files"] = outcome.files;
        result["cache_hits"] = outcome.cacheHits;
        result["cache_misses"] = outcome.cacheMisses;
        return result;
      },
      py::arg("config_path"));
}
