#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <regex>

#include "lamper/errors.hpp"
#include "lamper/stats.hpp"
#include "oracles/studentized_range.hpp"

using namespace lamper;

namespace {

std::size_t countOccurrences(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

AccuracyMatrix matrix(std::vector<std::string> methods, std::vector<std::string> datasets,
                      std::vector<std::vector<std::optional<double>>> values) {
  return {std::move(methods), std::move(datasets), std::move(values)};
}

}  // namespace

TEST(RankColumn, Examples) {
  EXPECT_EQ(rankColumn(std::vector<double>{0.5, 0.7, 0.7}), (std::vector<double>{3, 1.5, 1.5}));
  EXPECT_EQ(rankColumn(std::vector<double>{0.9, 0.8}), (std::vector<double>{1, 2}));
  EXPECT_EQ(rankColumn(std::vector<double>{0.4, 0.4, 0.4, 0.4}), (std::vector<double>{2.5, 2.5, 2.5, 2.5}));
  EXPECT_EQ(rankColumn(std::vector<double>{0.1, 0.3, 0.2, 0.3}), (std::vector<double>{4, 1.5, 3, 1.5}));
}

TEST(AverageRanks, Examples) {
  const auto m = matrix({"a", "b"}, {"d1", "d2"}, {{0.9, 0.8}, {0.8, 0.9}});
  EXPECT_EQ(averageRanks(m), (std::vector<double>{1.5, 1.5}));
  const auto ties = matrix({"a", "b", "c"}, {"d1", "d2"}, {{0.5, 0.6}, {0.5, 0.6}, {0.5, 0.6}});
  EXPECT_EQ(averageRanks(ties), (std::vector<double>{2, 2, 2}));
  const auto masked = matrix({"a", "b"}, {"d1"}, {{0.5}, {std::nullopt}});
  EXPECT_THROW(averageRanks(masked), InvalidArgument);
}

TEST(AverageRanks, Properties) {
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = 2 + rng() % 8, n = 1 + rng() % 20;
    AccuracyMatrix m;
    for (std::size_t i = 0; i < k; ++i) m.methods.push_back("m" + std::to_string(i));
    for (std::size_t j = 0; j < n; ++j) m.datasets.push_back("d" + std::to_string(j));
    m.values.assign(k, std::vector<std::optional<double>>(n));
    for (auto& row : m.values) {
      for (auto& cell : row) cell = std::round(u(rng) * 10) / 10;  // coarse grid gives ties
    }
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<double> column;
      for (std::size_t i = 0; i < k; ++i) column.push_back(*m.values[i][j]);
      const auto r = rankColumn(column);
      EXPECT_DOUBLE_EQ(std::accumulate(r.begin(), r.end(), 0.0), k * (k + 1) / 2.0);
    }
    const auto base = averageRanks(m);
    EXPECT_NEAR(std::accumulate(base.begin(), base.end(), 0.0) / k, (k + 1) / 2.0, 1e-12);
    // Strictly increasing transform per column.
    auto transformed = m;
    for (std::size_t j = 0; j < n; ++j) {
      // Strictly increasing maps of [0, 1] into itself.
      const double c = 0.1 + u(rng);
      const int shape = static_cast<int>(rng() % 3);
      for (std::size_t i = 0; i < k; ++i) {
        const double x = *m.values[i][j];
        transformed.values[i][j] = shape == 0 ? (x + c) / (1 + c) : shape == 1 ? std::sqrt(x) : x * x * x;
      }
    }
    EXPECT_EQ(averageRanks(transformed), base);
  }
}

TEST(Friedman, Examples) {
  EXPECT_DOUBLE_EQ(friedmanStatistic(std::vector<double>{1, 2}, 10), 10.0);
  EXPECT_EQ(friedmanStatistic(std::vector<double>{2, 2, 2}, 7), 0.0);
  EXPECT_DOUBLE_EQ(friedmanStatistic(std::vector<double>{1.2, 2.5, 2.3}, 12),
                   friedmanStatistic(std::vector<double>{2.3, 1.2, 2.5}, 12));
  EXPECT_GE(friedmanStatistic(std::vector<double>{1.5, 1.5}, 3), 0.0);
}

TEST(Friedman, ZeroOnFullTies) {
  // Every method ties on every dataset.
  const auto m = matrix({"a", "b", "c", "d"}, {"x", "y"}, {{0.3, 0.7}, {0.3, 0.7}, {0.3, 0.7}, {0.3, 0.7}});
  EXPECT_EQ(friedmanStatistic(averageRanks(m), 2), 0.0);
}

TEST(Nemenyi, Examples) {
  EXPECT_NEAR(nemenyiCd(5, 128), 0.5392, 1e-3);
  EXPECT_NEAR(nemenyiCd(2, 100), 0.196, 1e-3);
  EXPECT_NEAR(nemenyiQ(2), 1.960, 1e-3);
  EXPECT_NEAR(nemenyiQ(5), 2.728, 1e-3);
  EXPECT_THROW(nemenyiCd(5, 10, 0.01), InvalidArgument);
  EXPECT_THROW(nemenyiQ(1), InvalidArgument);
  EXPECT_THROW(nemenyiQ(21), InvalidArgument);
  EXPECT_THROW(nemenyiCd(5, 0), InvalidArgument);
}

TEST(Nemenyi, Monotone) {
  for (std::size_t k = 2; k < 20; ++k) {
    EXPECT_LT(nemenyiCd(k, 30), nemenyiCd(k + 1, 30));
    EXPECT_GT(nemenyiCd(k, 30), nemenyiCd(k, 31));
  }
}

TEST(Nemenyi, TableMatchesStudentizedRange) {
  for (std::size_t k = 2; k <= 20; ++k) {
    EXPECT_NEAR(nemenyiQ(k), oracle::nemenyiCriticalValue(k, 0.05), 5e-6) << "k=" << k;
  }
}

TEST(CdCliques, Examples) {
  EXPECT_EQ(cdCliques(std::vector<double>{1.0, 1.2, 3.0}, 0.5),
            (std::vector<std::vector<std::size_t>>{{0, 1}, {2}}));
  EXPECT_EQ(cdCliques(std::vector<double>{1.0, 1.2, 3.0}, 5.0), (std::vector<std::vector<std::size_t>>{{0, 1, 2}}));
  EXPECT_EQ(cdCliques(std::vector<double>{1, 2, 3}, 0.1), (std::vector<std::vector<std::size_t>>{{0}, {1}, {2}}));
  // Rank order, not input order; overlapping runs both kept.
  EXPECT_EQ(cdCliques(std::vector<double>{2.0, 1.0, 2.8}, 1.5),
            (std::vector<std::vector<std::size_t>>{{1, 0}, {0, 2}}));
}

TEST(CdCliques, CoverEveryMethod) {
  std::mt19937_64 rng(73);
  std::uniform_real_distribution<double> u(1, 8);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> ranks(2 + rng() % 10);
    for (auto& r : ranks) r = u(rng);
    const auto cliques = cdCliques(ranks, u(rng) - 0.9);
    std::vector<int> seen(ranks.size());
    for (const auto& c : cliques) {
      for (const auto i : c) seen[i] = 1;
    }
    EXPECT_EQ(std::accumulate(seen.begin(), seen.end(), 0), static_cast<int>(ranks.size()));
  }
}

TEST(RankReport, DropsIncompleteDatasets) {
  const auto m = matrix({"a", "b"}, {"d1", "d2", "d3"}, {{0.9, 0.5, 0.7}, {0.8, std::nullopt, 0.9}});
  const auto r = buildRankReport(m);
  EXPECT_EQ(r.datasetCount, 2u);
  EXPECT_EQ(r.skippedDatasets, (std::vector<std::string>{"d2"}));
  EXPECT_DOUBLE_EQ(r.averageAccuracy[0], 0.8);
  EXPECT_DOUBLE_EQ(r.averageAccuracy[1], 0.85);
  EXPECT_EQ(r.averageRank, (std::vector<double>{1.5, 1.5}));
  ASSERT_TRUE(r.cd.has_value());
  EXPECT_THROW(buildRankReport(matrix({"a", "b"}, {"d"}, {{0.1}, {std::nullopt}})), InvalidArgument);
}

TEST(CdDiagram, Structure) {
  RankReport r;
  r.methods = {"A", "B"};
  r.averageRank = {1.4, 1.6};
  r.averageAccuracy = {0.8, 0.7};
  r.datasetCount = 10;
  r.cd = 0.6;
  r.cliques = cdCliques(r.averageRank, *r.cd);
  const auto svg = renderCdDiagram(r);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_EQ(countOccurrences(svg, "class=\"clique\""), 1u);
  EXPECT_EQ(renderCdDiagram(r), svg);

  RankReport five;
  five.methods = {"a", "b", "c", "d", "e"};
  five.averageRank = {1, 2, 3, 4, 5};
  five.averageAccuracy = {0.9, 0.8, 0.7, 0.6, 0.5};
  five.datasetCount = 128;
  five.cd = 0.54;
  five.cliques = cdCliques(five.averageRank, *five.cd);
  EXPECT_EQ(five.cliques.size(), 5u);
  const auto svg5 = renderCdDiagram(five);
  EXPECT_EQ(countOccurrences(svg5, "class=\"clique\""), 0u);
  for (const auto& name : five.methods) EXPECT_NE(svg5.find(">" + name + " ("), std::string::npos);
}

TEST(CdDiagram, EscapesNames) {
  RankReport r;
  r.methods = {"A<B", "C&D"};
  r.averageRank = {1.0, 2.0};
  r.averageAccuracy = {0.5, 0.5};
  r.cliques = {{0}, {1}};
  const auto svg = renderCdDiagram(r);
  EXPECT_NE(svg.find("A&lt;B"), std::string::npos);
  EXPECT_NE(svg.find("C&amp;D"), std::string::npos);
}

TEST(Reports, Csv) {
  const auto m = matrix({"SDP", "TS"}, {"Beef", "Coffee", "Odd"}, {{0.5, 0.25, 0.1}, {1.0, 0.75, std::nullopt}});
  const auto text = perDatasetCsv(m);
  EXPECT_EQ(text.substr(0, text.find('\n')), "dataset,SDP,TS,skipped");
  EXPECT_NE(text.find("Odd,0.100000,,TS\n"), std::string::npos) << text;
  const auto back = parsePerDatasetCsv(text);
  EXPECT_EQ(back.methods, m.methods);
  EXPECT_EQ(back.datasets, m.datasets);
  EXPECT_EQ(back.values, m.values);

  const auto report = buildRankReport(m);
  const auto summary = summaryCsv(report);
  EXPECT_EQ(summary.substr(0, summary.find('\n')), "method,average_accuracy,average_rank");
  EXPECT_NE(summary.find("TS,0.875000,1.0000\n"), std::string::npos) << summary;
  EXPECT_NE(summary.find("SDP,0.375000,2.0000\n"), std::string::npos);
  EXPECT_NE(summary.find("# skipped_datasets: Odd\n"), std::string::npos);

  const std::vector<std::string> only{"TS"};
  const auto subset = subsetSummaryCsv(report, only);
  EXPECT_NE(subset.find("TS,"), std::string::npos);
  EXPECT_EQ(subset.find("SDP,"), std::string::npos);
}

TEST(Reports, ParseErrors) {
  EXPECT_THROW(parsePerDatasetCsv(""), ParseError);
  EXPECT_THROW(parsePerDatasetCsv("dataset,A,B,skipped\nx,0.5\n"), ParseError);
  EXPECT_THROW(parsePerDatasetCsv("dataset,A,B,skipped\nx,0.5,abc,\n"), ParseError);
}
