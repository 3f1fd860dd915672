#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lamper {

/// Accuracy of every method on every dataset. values[m][d] is empty when
/// the cell was skipped.
struct AccuracyMatrix {
  std::vector<std::string> methods;
  std::vector<std::string> datasets;
  std::vector<std::vector<std::optional<double>>> values;

  void validate() const;
  bool columnComplete(std::size_t dataset) const;
  // Only the datasets with no skipped cell.
  AccuracyMatrix completeColumns() const;
  std::vector<std::string> skippedDatasets() const;
};

/// Ranks of one dataset's accuracies: 1 = highest, ties share the mean of
/// their positions.
std::vector<double> rankColumn(std::span<const double> accuracies);

/// Mean rank per method over all datasets. Every cell must be present.
std::vector<double> averageRanks(const AccuracyMatrix& matrix);

/// Friedman chi-square 12N/(k(k+1)) * (sum R_j^2 - k(k+1)^2/4).
double friedmanStatistic(std::span<const double> averageRanks, std::size_t datasetCount);

// Critical values q_alpha for the Nemenyi test, alpha = 0.05, k = 2..20:
// the studentized range quantile at infinite degrees of freedom over sqrt(2).
double nemenyiQ(std::size_t k, double alpha = 0.05);

/// q_alpha * sqrt(k(k+1) / (6N)).
double nemenyiCd(std::size_t k, std::size_t datasetCount, double alpha = 0.05);

/// Maximal runs of methods, in rank order, whose rank spread is below cd.
/// Runs contained in another run are dropped; singletons are kept.
/// Returns method indices.
std::vector<std::vector<std::size_t>> cdCliques(std::span<const double> averageRanks, double cd);

struct RankReport {
  std::vector<std::string> methods;
  std::vector<double> averageAccuracy;
  std::vector<double> averageRank;
  std::size_t datasetCount = 0;  // datasets that entered the ranking
  double friedman = 0.0;
  double alpha = 0.05;
  std::optional<double> cd;  // empty when k is outside the q table
  std::vector<std::vector<std::size_t>> cliques;
  std::vector<std::string> skippedDatasets;
};

/// Drops incomplete datasets, then ranks. Average accuracy is taken over
/// the same datasets that were ranked.
RankReport buildRankReport(const AccuracyMatrix& matrix, double alpha = 0.05);

/// Rank axis over [1, k], one labelled tick per method, a CD scale bar and
/// one bold line per clique of two or more methods.
std::string renderCdDiagram(const RankReport& report);

// Report files.
std::string summaryCsv(const RankReport& report);
// Same columns as summaryCsv, restricted to `methods` (report order kept).
std::string subsetSummaryCsv(const RankReport& report, std::span<const std::string> methods);
std::string perDatasetCsv(const AccuracyMatrix& matrix);
AccuracyMatrix parsePerDatasetCsv(std::string_view text);

}  // namespace lamper
