#include "lamper/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "lamper/errors.hpp"

namespace lamper {

void AccuracyMatrix::validate() const {
  if (methods.size() < 2) throw InvalidArgument("an accuracy matrix needs at least 2 methods");
  if (values.size() != methods.size()) throw InvalidArgument("accuracy matrix has a row count mismatch");
  for (const auto& row : values) {
    if (row.size() != datasets.size()) throw InvalidArgument("accuracy matrix has a column count mismatch");
    for (const auto& cell : row) {
      if (cell && (!std::isfinite(*cell) || *cell < 0.0 || *cell > 1.0)) {
        throw InvalidArgument("accuracy outside [0, 1]");
      }
    }
  }
}

bool AccuracyMatrix::columnComplete(std::size_t dataset) const {
  return std::all_of(values.begin(), values.end(), [&](const auto& row) { return row[dataset].has_value(); });
}

AccuracyMatrix AccuracyMatrix::completeColumns() const {
  AccuracyMatrix out;
  out.methods = methods;
  out.values.resize(methods.size());
  for (std::size_t d = 0; d < datasets.size(); ++d) {
    if (!columnComplete(d)) continue;
    out.datasets.push_back(datasets[d]);
    for (std::size_t m = 0; m < methods.size(); ++m) out.values[m].push_back(values[m][d]);
  }
  return out;
}

std::vector<std::string> AccuracyMatrix::skippedDatasets() const {
  std::vector<std::string> out;
  for (std::size_t d = 0; d < datasets.size(); ++d) {
    if (!columnComplete(d)) out.push_back(datasets[d]);
  }
  return out;
}

std::vector<double> rankColumn(std::span<const double> accuracies) {
  const std::size_t k = accuracies.size();
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return accuracies[a] > accuracies[b]; });
  std::vector<double> ranks(k);
  for (std::size_t i = 0; i < k;) {
    std::size_t j = i;
    while (j + 1 < k && accuracies[order[j + 1]] == accuracies[order[i]]) ++j;
    // positions i..j (0-based) share ranks i+1..j+1
    const double shared = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = shared;
    i = j + 1;
  }
  return ranks;
}

std::vector<double> averageRanks(const AccuracyMatrix& matrix) {
  matrix.validate();
  if (matrix.datasets.empty()) throw InvalidArgument("no datasets left to rank");
  const std::size_t k = matrix.methods.size();
  std::vector<double> sums(k, 0.0);
  std::vector<double> column(k);
  for (std::size_t d = 0; d < matrix.datasets.size(); ++d) {
    for (std::size_t m = 0; m < k; ++m) {
      if (!matrix.values[m][d]) throw InvalidArgument("dataset " + matrix.datasets[d] + " has a skipped cell");
      column[m] = *matrix.values[m][d];
    }
    const auto ranks = rankColumn(column);
    for (std::size_t m = 0; m < k; ++m) sums[m] += ranks[m];
  }
  for (double& s : sums) s /= static_cast<double>(matrix.datasets.size());
  return sums;
}

double friedmanStatistic(std::span<const double> averageRanks, std::size_t datasetCount) {
  const double k = static_cast<double>(averageRanks.size());
  if (averageRanks.size() < 2) throw InvalidArgument("Friedman statistic needs at least 2 methods");
  if (datasetCount < 1) throw InvalidArgument("Friedman statistic needs at least 1 dataset");
  double sumSquares = 0.0;
  for (const double r : averageRanks) sumSquares += r * r;
  const double n = static_cast<double>(datasetCount);
  const double stat = 12.0 * n / (k * (k + 1.0)) * (sumSquares - k * (k + 1.0) * (k + 1.0) / 4.0);
  return std::max(0.0, stat);
}

double nemenyiQ(std::size_t k, double alpha) {
  static constexpr std::array<double, 19> kQ05 = {
      1.959964, 2.343701, 2.569032, 2.727774, 2.849705, 2.948320, 3.030878, 3.101730, 3.163684, 3.218654,
      3.268004, 3.312739, 3.353618, 3.391230, 3.426041, 3.458425, 3.488685, 3.517073, 3.543799};
  if (alpha != 0.05) throw InvalidArgument("only alpha = 0.05 is supported");
  if (k < 2 || k > 20) throw InvalidArgument("Nemenyi critical values cover 2..20 methods, got " + std::to_string(k));
  return kQ05[k - 2];
}

double nemenyiCd(std::size_t k, std::size_t datasetCount, double alpha) {
  const double q = nemenyiQ(k, alpha);
  if (datasetCount < 1) throw InvalidArgument("critical difference needs at least 1 dataset");
  const double kk = static_cast<double>(k);
  return q * std::sqrt(kk * (kk + 1.0) / (6.0 * static_cast<double>(datasetCount)));
}

std::vector<std::vector<std::size_t>> cdCliques(std::span<const double> averageRanks, double cd) {
  const std::size_t k = averageRanks.size();
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return averageRanks[a] < averageRanks[b]; });

  std::vector<std::vector<std::size_t>> cliques;
  std::size_t previousEnd = 0;
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t end = i;
    while (end + 1 < k && averageRanks[order[end + 1]] - averageRanks[order[i]] < cd) ++end;
    // Runs only grow to the right, so a run ending where the previous one
    // ended is contained in it.
    if (i > 0 && end <= previousEnd) continue;
    cliques.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(i), order.begin() + static_cast<std::ptrdiff_t>(end) + 1);
    previousEnd = end;
  }
  return cliques;
}

RankReport buildRankReport(const AccuracyMatrix& matrix, double alpha) {
  matrix.validate();
  const AccuracyMatrix complete = matrix.completeColumns();
  RankReport report;
  report.methods = matrix.methods;
  report.alpha = alpha;
  report.skippedDatasets = matrix.skippedDatasets();
  report.datasetCount = complete.datasets.size();
  report.averageRank = averageRanks(complete);
  for (const auto& row : complete.values) {
    double sum = 0.0;
    for (const auto& cell : row) sum += *cell;
    report.averageAccuracy.push_back(sum / static_cast<double>(row.size()));
  }
  report.friedman = friedmanStatistic(report.averageRank, report.datasetCount);
  const std::size_t k = report.methods.size();
  if (k <= 20) {
    report.cd = nemenyiCd(k, report.datasetCount, alpha);
    report.cliques = cdCliques(report.averageRank, *report.cd);
  } else {
    for (std::size_t m = 0; m < k; ++m) report.cliques.push_back({m});
  }
  return report;
}

}  // namespace lamper
