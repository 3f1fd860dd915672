#pragma once

// Direct two-pass evaluation of the feature definitions in long double.
// Shares no code with src/features.cpp.

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

namespace lamper::oracle {

inline std::map<std::string, long double> featuresTwoPass(const std::vector<double>& x) {
  const std::size_t n = x.size();
  long double sum = 0.0L;
  for (const double v : x) sum += v;
  const long double mean = sum / static_cast<long double>(n);
  long double ss = 0.0L;
  long double sq = 0.0L;
  for (const double v : x) {
    ss += (v - mean) * (v - mean);
    sq += static_cast<long double>(v) * v;
  }
  const long double var = ss / static_cast<long double>(n);
  std::vector<double> sorted = x;
  std::sort(sorted.begin(), sorted.end());
  const long double median = n % 2 ? static_cast<long double>(sorted[n / 2])
                                   : (static_cast<long double>(sorted[n / 2 - 1]) + sorted[n / 2]) / 2.0L;
  return {
      {"sum", sum},
      {"median", median},
      {"mean", mean},
      {"length", static_cast<long double>(n)},
      {"standard_deviation", std::sqrt(var)},
      {"variance", var},
      {"root_mean_square", std::sqrt(sq / static_cast<long double>(n))},
      {"maximum", sorted.back()},
      {"absolute_maximum", std::max(std::fabs(static_cast<long double>(sorted.front())),
                                    std::fabs(static_cast<long double>(sorted.back())))},
      {"minimum", sorted.front()},
  };
}

inline double relativeError(double actual, long double expected) {
  const long double diff = std::fabs(static_cast<long double>(actual) - expected);
  if (expected == 0.0L) return static_cast<double>(diff);
  return static_cast<double>(diff / std::fabs(expected));
}

}  // namespace lamper::oracle
