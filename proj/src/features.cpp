#include "lamper/features.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>

#include "lamper/errors.hpp"

namespace lamper {

namespace {

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct Moments {
  double n = 0.0;
  double sum = 0.0;
  double mean = 0.0;
  double variance = 0.0;
  double meanSquare = 0.0;
  double min = 0.0;
  double max = 0.0;
  double median = 0.0;
};

Moments computeMoments(std::span<const double> values) {
  Moments m;
  m.n = static_cast<double>(values.size());
  CompensatedSum sum;
  CompensatedSum squares;
  for (const double v : values) {
    sum.add(v);
    squares.add(v * v);
  }
  m.sum = sum.value();
  m.mean = m.sum / m.n;
  m.meanSquare = squares.value() / m.n;

  CompensatedSum centered;
  for (const double v : values) centered.add((v - m.mean) * (v - m.mean));
  m.variance = centered.value() / m.n;

  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  m.min = *lo;
  m.max = *hi;

  std::vector<double> sorted(values.begin(), values.end());
  const std::size_t mid = sorted.size() / 2;
  std::nth_element(sorted.begin(), sorted.begin() + mid, sorted.end());
  m.median = sorted[mid];
  if (sorted.size() % 2 == 0) {
    const double lower = *std::max_element(sorted.begin(), sorted.begin() + mid);
    m.median = lower + (m.median - lower) / 2.0;
  }
  return m;
}

using Calculator = std::function<double(const Moments&, std::span<const double>)>;

const std::map<std::string, Calculator>& registry() {
  static const std::map<std::string, Calculator> calculators = {
      {"sum", [](const Moments& m, auto) { return m.sum; }},
      {"median", [](const Moments& m, auto) { return m.median; }},
      {"mean", [](const Moments& m, auto) { return m.mean; }},
      {"length", [](const Moments& m, auto) { return m.n; }},
      {"standard_deviation", [](const Moments& m, auto) { return std::sqrt(m.variance); }},
      {"variance", [](const Moments& m, auto) { return m.variance; }},
      {"root_mean_square", [](const Moments& m, auto) { return std::sqrt(m.meanSquare); }},
      {"maximum", [](const Moments& m, auto) { return m.max; }},
      {"absolute_maximum", [](const Moments& m, auto) { return std::max(std::fabs(m.min), std::fabs(m.max)); }},
      {"minimum", [](const Moments& m, auto) { return m.min; }},
      {"abs_energy", [](const Moments& m, auto) { return m.meanSquare * m.n; }},
      {"absolute_sum_of_changes",
       [](const Moments&, std::span<const double> v) {
         CompensatedSum s;
         for (std::size_t i = 1; i < v.size(); ++i) s.add(std::fabs(v[i] - v[i - 1]));
         return s.value();
       }},
      {"count_above_mean",
       [](const Moments& m, std::span<const double> v) {
         return static_cast<double>(std::count_if(v.begin(), v.end(), [&](double x) { return x > m.mean; }));
       }},
      {"count_below_mean",
       [](const Moments& m, std::span<const double> v) {
         return static_cast<double>(std::count_if(v.begin(), v.end(), [&](double x) { return x < m.mean; }));
       }},
  };
  return calculators;
}

}  // namespace

double FeatureVector::at(const std::string& name) const {
  for (const auto& f : entries) {
    if (f.name == name) return f.value;
  }
  throw InvalidArgument("no feature named '" + name + "'");
}

const std::vector<std::string>& canonicalFeatureNames() {
  static const std::vector<std::string> names = {
      "sum",      "median",  "mean",          "length",           "standard_deviation",
      "variance", "root_mean_square", "maximum", "absolute_maximum", "minimum"};
  return names;
}

const std::vector<std::string>& availableFeatureNames() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> all = canonicalFeatureNames();
    for (const auto& [name, calc] : registry()) {
      if (std::find(all.begin(), all.end(), name) == all.end()) all.push_back(name);
    }
    return all;
  }();
  return names;
}

FeatureVector extractFeatures(std::span<const double> values) {
  return extractFeatures(values, canonicalFeatureNames());
}

FeatureVector extractFeatures(std::span<const double> values, const std::vector<std::string>& names) {
  if (values.empty()) throw InvalidArgument("cannot extract features from an empty series");
  for (const double v : values) {
    if (!std::isfinite(v)) throw InvalidArgument("series contains a non-finite value");
  }
  std::set<std::string> seen;
  for (const auto& name : names) {
    if (!registry().contains(name)) throw InvalidArgument("unknown feature '" + name + "'");
    if (!seen.insert(name).second) throw InvalidArgument("duplicate feature '" + name + "'");
  }

  const Moments m = computeMoments(values);
  FeatureVector out;
  out.entries.reserve(names.size());
  for (const auto& name : names) out.entries.push_back({name, registry().at(name)(m, values)});
  return out;
}

}  // namespace lamper
