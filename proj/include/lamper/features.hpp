#pragma once

#include <span>
#include <string>
#include <vector>

namespace lamper {

struct Feature {
  std::string name;
  double value = 0.0;

  bool operator==(const Feature&) const = default;
};

/// Named statistics of a series, in a fixed order.
struct FeatureVector {
  std::vector<Feature> entries;

  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }
  // Throws InvalidArgument if `name` is absent.
  double at(const std::string& name) const;
};

// sum, median, mean, length, standard_deviation, variance,
// root_mean_square, maximum, absolute_maximum, minimum
const std::vector<std::string>& canonicalFeatureNames();

// Every name extractFeatures() understands: the canonical list plus a few
// opt-in extras that are never part of the default set.
const std::vector<std::string>& availableFeatureNames();

/// Canonical feature set. Moments are population moments (divide by n).
FeatureVector extractFeatures(std::span<const double> values);

/// Selected features in the order given. Unknown or duplicate names throw.
FeatureVector extractFeatures(std::span<const double> values, const std::vector<std::string>& names);

}  // namespace lamper
