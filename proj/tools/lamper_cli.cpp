// lamper: prompt-embedding time-series classification benchmark.
//
//   lamper run --config <file>
//   lamper features <file> [--row N]
//   lamper render --kind {sdp|ddp|fp} [--precision N] <file> [--row N]
//   lamper list --root <dir>
//   lamper cd --summary <per_dataset.csv> [--svg <out.svg>]
//
// Exit codes: 0 success, 1 run-level failure, 2 configuration error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "lamper/config.hpp"
#include "lamper/dataset.hpp"
#include "lamper/errors.hpp"
#include "lamper/features.hpp"
#include "lamper/prompt.hpp"
#include "lamper/runner.hpp"
#include "lamper/stats.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr char kRecordSeparator = '\x1e';

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw lamper::DatasetError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// With a row number the file is read as a UCR split and the label is
// dropped; otherwise every number in the file is one value.
std::vector<double> readSeries(const fs::path& path, std::optional<std::size_t> row) {
  const std::string text = slurp(path);
  if (row) {
    auto series = lamper::parseUcr(text);
    if (*row >= series.size()) {
      throw lamper::InvalidArgument("row " + std::to_string(*row) + " out of range (file has " +
                                    std::to_string(series.size()) + ")");
    }
    return std::move(series[*row].values);
  }
  std::string normalized = text;
  for (char& c : normalized) {
    if (c == ',' || c == '\t' || c == '\r' || c == '\n') c = ' ';
  }
  std::vector<double> values;
  std::istringstream in(normalized);
  std::string token;
  while (in >> token) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != token.size()) throw lamper::ParseError("non-numeric value '" + token + "'");
    if (!std::isfinite(v)) throw lamper::ParseError("non-finite value '" + token + "'");
    values.push_back(v);
  }
  if (values.empty()) throw lamper::ParseError("no values in " + path.string());
  return values;
}

void printReport(const lamper::RankReport& report) {
  std::cout << lamper::summaryCsv(report);
  std::cout << "# cliques:";
  for (const auto& clique : report.cliques) {
    std::cout << " {";
    for (std::size_t i = 0; i < clique.size(); ++i) std::cout << (i ? "," : "") << report.methods[clique[i]];
    std::cout << "}";
  }
  std::cout << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Prompt-embedding time-series classification benchmark"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a benchmark from a configuration file");
  fs::path configPath;
  bool quiet = false;
  run->add_option("--config", configPath, "Configuration file")->required();
  run->add_flag("--quiet", quiet, "Only log warnings and errors");

  auto* features = app.add_subcommand("features", "Print the feature set of one series");
  fs::path featureFile;
  std::optional<std::size_t> featureRow;
  features->add_option("file", featureFile, "Series file")->required();
  features->add_option("--row", featureRow, "Read row N (0-based) of a UCR split file");

  auto* render = app.add_subcommand("render", "Print the sub-prompts of one series");
  fs::path renderFile;
  std::string kindName = "sdp";
  int precision = 4;
  std::string separator = ", ";
  std::size_t maxTokens = 512;
  std::optional<std::size_t> renderRow;
  std::string endpoint;
  render->add_option("file", renderFile, "Series file")->required();
  render->add_option("--kind", kindName, "Prompt kind")->check(CLI::IsMember({"sdp", "ddp", "fp", "SDP", "DDP", "FP"}));
  render->add_option("--precision", precision, "Decimal places")->check(CLI::Range(0, 12));
  render->add_option("--separator", separator, "Text between values");
  render->add_option("--max-tokens", maxTokens, "Token budget of the mock counter");
  render->add_option("--endpoint", endpoint, "Count tokens with an embedding server instead of the mock counter");
  render->add_option("--row", renderRow, "Read row N (0-based) of a UCR split file");

  auto* list = app.add_subcommand("list", "List datasets under a root directory");
  fs::path root;
  list->add_option("--root", root, "Dataset root")->required();

  auto* cd = app.add_subcommand("cd", "Recompute ranks and the critical difference from per_dataset.csv");
  fs::path perDatasetPath;
  fs::path svgPath;
  cd->add_option("--summary", perDatasetPath, "per_dataset.csv of a previous run")->required();
  cd->add_option("--svg", svgPath, "Write the CD diagram here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) {
      lamper::RunConfig config;
      try {
        config = lamper::loadConfig(configPath);
      } catch (const lamper::Error& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
      }
      lamper::Logger logger(&std::cerr, quiet ? lamper::Logger::Level::Warn : lamper::Logger::Level::Info);
      const auto outcome = lamper::runBenchmark(config, logger);
      for (const auto& f : outcome.files) logger.info("", "", "wrote " + f.string());
      return 0;
    }
    if (*features) {
      const auto fv = lamper::extractFeatures(readSeries(featureFile, featureRow));
      for (const auto& f : fv.entries) std::printf("%s,%.6g\n", f.name.c_str(), f.value);
      return 0;
    }
    if (*render) {
      const auto values = readSeries(renderFile, renderRow);
      const lamper::RenderConfig cfg{precision, separator};
      std::shared_ptr<const lamper::EmbeddingBackend> backend;
      if (!endpoint.empty()) {
        lamper::BackendSpec spec;
        spec.kind = lamper::BackendKind::Http;
        spec.endpoint = endpoint;
        backend = lamper::makeBackend(spec);
        maxTokens = backend->info().maxTokens;
      }
      const lamper::TokenCounter counter =
          backend ? backend->counter() : lamper::TokenCounter(&lamper::MockBackend::countMockTokens);
      std::vector<lamper::SubPrompt> prompts;
      switch (lamper::parseKind(kindName)) {
        case lamper::PromptKind::SDP: prompts = lamper::buildSdp(values, cfg, maxTokens, counter); break;
        case lamper::PromptKind::DDP: prompts = lamper::buildDdp(values, cfg, maxTokens, counter); break;
        case lamper::PromptKind::FP:
          prompts = lamper::buildFp(lamper::extractFeatures(values), cfg, maxTokens, counter);
          break;
      }
      for (const auto& p : prompts) std::cout << p.text << "\n" << kRecordSeparator << "\n";
      return 0;
    }
    if (*list) {
      for (const auto& name : lamper::listDatasets(root)) std::cout << name << "\n";
      return 0;
    }
    if (*cd) {
      const auto report = lamper::buildRankReport(lamper::parsePerDatasetCsv(slurp(perDatasetPath)));
      printReport(report);
      if (!svgPath.empty()) {
        std::ofstream out(svgPath, std::ios::binary | std::ios::trunc);
        out << lamper::renderCdDiagram(report);
        if (!out) throw lamper::Error("cannot write " + svgPath.string());
      }
      return 0;
    }
  } catch (const lamper::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}
