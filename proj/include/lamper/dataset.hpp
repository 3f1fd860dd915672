#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lamper {

struct LabeledSeries {
  long label = 0;
  std::vector<double> values;

  bool operator==(const LabeledSeries&) const = default;
};

enum class Split { Train, Test };

std::string_view splitName(Split split);

struct TimeSeriesDataset {
  std::string name;
  std::vector<LabeledSeries> train;
  std::vector<LabeledSeries> test;
  std::size_t classCount = 0;

  const std::vector<LabeledSeries>& split(Split s) const { return s == Split::Train ? train : test; }

  // True when every series in both splits has the same length.
  bool equalLength() const;
};

/// Parses a UCR split file. Each nonempty line holds an integer label
/// followed by the values; the separator (TAB or comma) is detected from
/// the first nonempty line and must be used consistently. Labels written
/// as integral reals ("1.0") are accepted. NaN and infinities are rejected.
std::vector<LabeledSeries> parseUcr(std::string_view text);

/// Renders one series as a UCR line (no trailing newline). Values use the
/// shortest decimal form that round-trips exactly.
std::string formatUcrLine(const LabeledSeries& series, char separator = '\t');

struct LoadOptions {
  bool zNormalize = false;
};

/// Loads `<root>/<name>/<name>_TRAIN.tsv` and `<name>_TEST.tsv`.
TimeSeriesDataset loadDataset(const std::filesystem::path& root, const std::string& name,
                              const LoadOptions& options = {});

/// Names of the subdirectories of `root` holding both split files, sorted.
std::vector<std::string> listDatasets(const std::filesystem::path& root);

/// Per-series z-normalization (population std). Constant series map to zeros.
std::vector<double> zNormalize(std::span<const double> values);

}  // namespace lamper
