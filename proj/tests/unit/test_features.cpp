#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lamper/errors.hpp"
#include "lamper/features.hpp"
#include "oracles/feature_oracle.hpp"

using namespace lamper;

namespace {

void expectFeatures(const std::vector<double>& x, const std::vector<double>& expected, double tol) {
  const auto fv = extractFeatures(x);
  ASSERT_EQ(fv.size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_NEAR(fv.entries[i].value, expected[i], tol) << fv.entries[i].name;
}

}  // namespace

TEST(Features, CanonicalOrder) {
  const auto fv = extractFeatures(std::vector<double>{1.0});
  std::vector<std::string> names;
  for (const auto& f : fv.entries) names.push_back(f.name);
  EXPECT_EQ(names, (std::vector<std::string>{"sum", "median", "mean", "length", "standard_deviation", "variance",
                                             "root_mean_square", "maximum", "absolute_maximum", "minimum"}));
  EXPECT_EQ(names, canonicalFeatureNames());
}

TEST(Features, Constant) { expectFeatures({5, 5, 5, 5}, {20, 5, 5, 4, 0, 0, 5, 5, 5, 5}, 0.0); }

TEST(Features, OneTwoThree) {
  expectFeatures({1, 2, 3}, {6, 2, 2, 3, 0.816497, 0.666667, 2.160247, 3, 3, 1}, 1e-6);
}

TEST(Features, NegativePair) { expectFeatures({-3, 1}, {-2, -1, -1, 2, 2, 4, 2.236068, 1, 3, -3}, 1e-6); }

TEST(Features, SingleElement) {
  const auto fv = extractFeatures(std::vector<double>{-7.5});
  EXPECT_EQ(fv.at("median"), -7.5);
  EXPECT_EQ(fv.at("mean"), -7.5);
  EXPECT_EQ(fv.at("variance"), 0.0);
  EXPECT_EQ(fv.at("standard_deviation"), 0.0);
  EXPECT_EQ(fv.at("absolute_maximum"), 7.5);
}

TEST(Features, Errors) {
  EXPECT_THROW(extractFeatures(std::vector<double>{}), InvalidArgument);
  EXPECT_THROW(extractFeatures(std::vector<double>{1.0, NAN}), InvalidArgument);
  EXPECT_THROW(extractFeatures(std::vector<double>{1.0}, {"sum", "skewness"}), InvalidArgument);
  EXPECT_THROW(extractFeatures(std::vector<double>{1.0}, {"sum", "sum"}), InvalidArgument);
  EXPECT_THROW(extractFeatures(std::vector<double>{1.0}).at("nope"), InvalidArgument);
}

TEST(Features, SelectedSubsetInGivenOrder) {
  const auto fv = extractFeatures(std::vector<double>{1, -2, 3, 3}, {"minimum", "abs_energy", "count_above_mean"});
  ASSERT_EQ(fv.size(), 3u);
  EXPECT_EQ(fv.entries[0].name, "minimum");
  EXPECT_EQ(fv.entries[0].value, -2.0);
  EXPECT_EQ(fv.entries[1].value, 23.0);
  EXPECT_EQ(fv.entries[2].value, 2.0);
}

TEST(Features, IdentitiesAndShiftEquivariance) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> value(-100, 100);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> x(1 + rng() % 300);
    for (auto& v : x) v = value(rng);
    const double c = value(rng);
    std::vector<double> shifted = x;
    for (auto& v : shifted) v += c;
    const auto a = extractFeatures(x);
    const auto b = extractFeatures(shifted);
    const double n = static_cast<double>(x.size());

    EXPECT_NEAR(a.at("variance"), a.at("standard_deviation") * a.at("standard_deviation"), 1e-12 * (1 + a.at("variance")));
    const double rms2 = a.at("root_mean_square") * a.at("root_mean_square");
    EXPECT_NEAR(rms2, a.at("variance") + a.at("mean") * a.at("mean"), 1e-12 * (1 + rms2));
    EXPECT_LE(a.at("minimum"), a.at("median"));
    EXPECT_LE(a.at("median"), a.at("maximum"));
    EXPECT_EQ(a.at("absolute_maximum"), std::max(std::fabs(a.at("minimum")), std::fabs(a.at("maximum"))));

    const double scale = 1e-10 * (1 + std::fabs(c)) * n;
    EXPECT_NEAR(b.at("sum"), a.at("sum") + n * c, scale * 100);
    EXPECT_NEAR(b.at("mean"), a.at("mean") + c, scale);
    EXPECT_NEAR(b.at("median"), a.at("median") + c, scale);
    EXPECT_NEAR(b.at("minimum"), a.at("minimum") + c, scale);
    EXPECT_NEAR(b.at("maximum"), a.at("maximum") + c, scale);
    EXPECT_NEAR(b.at("variance"), a.at("variance"), 1e-9 * (1 + a.at("variance")));
    EXPECT_EQ(b.at("length"), a.at("length"));
  }
}

TEST(Features, MatchesTwoPassOracle) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> value(-1e3, 1e3);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> x(1 + rng() % 2048);
    for (auto& v : x) v = value(rng);
    const auto expected = oracle::featuresTwoPass(x);
    for (const auto& f : extractFeatures(x).entries) {
      EXPECT_LE(oracle::relativeError(f.value, expected.at(f.name)), 1e-9) << f.name;
    }
  }
}

TEST(Features, LargeOffsetVarianceStable) {
  // Catastrophic cancellation check: tiny spread on a huge offset.
  std::vector<double> x;
  for (int i = 0; i < 1000; ++i) x.push_back(1e9 + (i % 2 ? 1.0 : -1.0));
  const auto fv = extractFeatures(x);
  EXPECT_NEAR(fv.at("variance"), 1.0, 1e-6);
  EXPECT_NEAR(fv.at("mean"), 1e9, 1e-6);
}
