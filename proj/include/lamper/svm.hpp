#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace lamper {

/// Row-major sample matrix, one sample per row.
class SampleMatrix {
 public:
  SampleMatrix() = default;
  SampleMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
  static SampleMatrix fromRows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0; }

  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> data() const { return data_; }

  // The first appended row fixes the column count.
  void appendRow(std::span<const double> values);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct SvmConfig {
  double C = 1.0;
  std::optional<double> gamma;  // empty: "scale"
  double tolerance = 1e-3;
  int maxPasses = 10;
  std::size_t maxIterations = 1'000'000;
  std::size_t gramCacheLimit = 4096;

  void validate() const;
};

double rbfKernel(std::span<const double> x, std::span<const double> y, double gamma);

/// Explicit gamma, or for "scale" 1 / (d * var) over every matrix entry
/// (population variance), falling back to 1 / d when the variance is zero.
double resolveGamma(const SampleMatrix& X, const SvmConfig& cfg);

struct BinarySvm {
  std::vector<std::vector<double>> supportVectors;
  std::vector<double> dualCoefs;  // alpha_i * y_i
  double bias = 0.0;
  double gamma = 1.0;

  double decision(std::span<const double> x) const;
};

struct SmoResult {
  std::vector<double> alphas;  // one per training sample
  double bias = 0.0;
  double gamma = 1.0;
  std::size_t iterations = 0;
  bool converged = true;  // false when the iteration guard stopped training
  BinarySvm model;
};

/// Soft-margin dual by sequential minimal optimization. Labels must be
/// -1 or +1 with both present. `gamma` is used as given.
SmoResult solveSmo(const SampleMatrix& X, std::span<const int> y, const SvmConfig& cfg, double gamma);

BinarySvm trainBinarySmo(const SampleMatrix& X, std::span<const int> y, const SvmConfig& cfg);

/// Largest violation of the soft-margin KKT conditions over the training
/// samples, measured on y_i f(x_i) - 1.
double maxKktViolation(const SmoResult& result, const SampleMatrix& X, std::span<const int> y, double C);

struct SvmModel {
  std::vector<long> classes;             // sorted ascending
  std::vector<BinarySvm> pairwiseModels;  // (0,1), (0,2), ..., (1,2), ...
  std::size_t dimension = 0;
  double gamma = 1.0;
  bool converged = true;
};

/// One-vs-one. In the pair (a, b) with a < b, class a is the positive side.
SvmModel trainMulticlass(const SampleMatrix& X, std::span<const long> labels, const SvmConfig& cfg);

/// Pairwise majority vote; ties go to the smallest class id, as does a
/// decision value of exactly zero.
long predict(const SvmModel& model, std::span<const double> x);

double evaluate(const SvmModel& model, const SampleMatrix& testX, std::span<const long> testLabels);

// "LSVM1" binary format, little-endian.
void saveModel(const SvmModel& model, std::ostream& out);
SvmModel loadModel(std::istream& in);

}  // namespace lamper
