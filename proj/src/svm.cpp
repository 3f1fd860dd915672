#include "lamper/svm.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <set>

#include "lamper/errors.hpp"

namespace lamper {

void SampleMatrix::appendRow(std::span<const double> values) {
  if (rows_ == 0 && data_.empty()) cols_ = values.size();
  if (values.size() != cols_) {
    throw InvalidArgument("row has " + std::to_string(values.size()) + " columns, matrix has " + std::to_string(cols_));
  }
  data_.insert(data_.end(), values.begin(), values.end());
  ++rows_;
}

SampleMatrix SampleMatrix::fromRows(const std::vector<std::vector<double>>& rows) {
  SampleMatrix m;
  for (const auto& r : rows) m.appendRow(r);
  return m;
}

void SvmConfig::validate() const {
  if (!(C > 0.0) || !std::isfinite(C)) throw InvalidArgument("SVM C must be a positive finite number");
  if (gamma && (!(*gamma > 0.0) || !std::isfinite(*gamma))) throw InvalidArgument("SVM gamma must be positive");
  if (!(tolerance > 0.0)) throw InvalidArgument("SVM tolerance must be positive");
  if (maxPasses < 1) throw InvalidArgument("SVM max_passes must be at least 1");
  if (maxIterations < 1) throw InvalidArgument("SVM max_iterations must be at least 1");
}

double rbfKernel(std::span<const double> x, std::span<const double> y, double gamma) {
  if (x.size() != y.size()) throw InvalidArgument("kernel arguments differ in dimension");
  double d2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    d2 += d * d;
  }
  return std::exp(-gamma * d2);
}

double resolveGamma(const SampleMatrix& X, const SvmConfig& cfg) {
  if (cfg.gamma) return *cfg.gamma;
  if (X.empty() || X.cols() == 0) throw InvalidArgument("cannot resolve gamma from an empty sample matrix");
  const auto entries = X.data();
  const double n = static_cast<double>(entries.size());
  double mean = 0.0;
  for (const double v : entries) mean += v;
  mean /= n;
  double var = 0.0;
  for (const double v : entries) var += (v - mean) * (v - mean);
  var /= n;
  const double d = static_cast<double>(X.cols());
  return var > 0.0 ? 1.0 / (d * var) : 1.0 / d;
}

double BinarySvm::decision(std::span<const double> x) const {
  double f = bias;
  for (std::size_t i = 0; i < supportVectors.size(); ++i) f += dualCoefs[i] * rbfKernel(supportVectors[i], x, gamma);
  return f;
}

namespace {

class KernelSource {
 public:
  KernelSource(const SampleMatrix& X, double gamma, std::size_t cacheLimit)
      : X_(X), gamma_(gamma), n_(X.rows()) {
    if (n_ <= cacheLimit) {
      gram_.resize(n_ * n_);
      for (std::size_t i = 0; i < n_; ++i) {
        gram_[i * n_ + i] = 1.0;
        for (std::size_t j = 0; j < i; ++j) {
          gram_[i * n_ + j] = gram_[j * n_ + i] = rbfKernel(X.row(i), X.row(j), gamma);
        }
      }
    }
  }

  double operator()(std::size_t i, std::size_t j) const {
    if (!gram_.empty()) return gram_[i * n_ + j];
    return i == j ? 1.0 : rbfKernel(X_.row(i), X_.row(j), gamma_);
  }

 private:
  const SampleMatrix& X_;
  double gamma_;
  std::size_t n_;
  std::vector<double> gram_;
};

class SmoSolver {
 public:
  SmoSolver(const SampleMatrix& X, std::span<const int> y, const SvmConfig& cfg, double gamma)
      : y_(y), C_(cfg.C), tol_(cfg.tolerance), maxIterations_(cfg.maxIterations), kernel_(X, gamma, cfg.gramCacheLimit),
        n_(X.rows()), alpha_(n_, 0.0), errors_(n_) {
    for (std::size_t i = 0; i < n_; ++i) errors_[i] = -static_cast<double>(y_[i]);
  }

  void run(int maxPasses) {
    for (int pass = 0; pass < maxPasses && !guardHit_; ++pass) {
      sweepToFixedPoint();
      // The error cache is updated incrementally; check the stopping
      // condition against freshly computed errors.
      refreshErrors();
      if (maxViolationFromCache() <= tol_) break;
    }
    finalizeBias();
  }

  SmoResult result() const {
    SmoResult r;
    r.alphas = alpha_;
    r.bias = bias_;
    r.iterations = iterations_;
    r.converged = !guardHit_;
    return r;
  }

 private:
  bool isBound(std::size_t i) const { return alpha_[i] <= 0.0 || alpha_[i] >= C_; }

  double decision(std::size_t i) const {
    double f = bias_;
    for (std::size_t j = 0; j < n_; ++j) {
      if (alpha_[j] > 0.0) f += alpha_[j] * y_[j] * kernel_(i, j);
    }
    return f;
  }

  void refreshErrors() {
    for (std::size_t i = 0; i < n_; ++i) errors_[i] = decision(i) - y_[i];
  }

  // The running bias depends on the update path. Settle it from the final
  // alphas: mean over free samples, or the middle of the feasible interval
  // when every sample is at a bound.
  void finalizeBias() {
    double freeSum = 0.0;
    std::size_t freeCount = 0;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n_; ++i) {
      const double edge = y_[i] - (decision(i) - bias_);
      if (!isBound(i)) {
        freeSum += edge;
        ++freeCount;
      } else if ((y_[i] > 0) == (alpha_[i] <= 0.0)) {
        lo = std::max(lo, edge);
      } else {
        hi = std::min(hi, edge);
      }
    }
    if (freeCount > 0) {
      bias_ = freeSum / static_cast<double>(freeCount);
    } else if (std::isfinite(lo) && std::isfinite(hi)) {
      bias_ = 0.5 * (lo + hi);
    } else if (std::isfinite(lo) || std::isfinite(hi)) {
      bias_ = std::isfinite(lo) ? lo : hi;
    }
    refreshErrors();
  }

  double violation(std::size_t i) const {
    const double r = errors_[i] * y_[i];  // y f - 1
    if (alpha_[i] <= 0.0) return std::max(0.0, -r);
    if (alpha_[i] >= C_) return std::max(0.0, r);
    return std::fabs(r);
  }

  double maxViolationFromCache() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < n_; ++i) worst = std::max(worst, violation(i));
    return worst;
  }

  void sweepToFixedPoint() {
    bool examineAll = true;
    std::size_t changed = 0;
    while ((changed > 0 || examineAll) && !guardHit_) {
      changed = 0;
      for (std::size_t i = 0; i < n_ && !guardHit_; ++i) {
        if (examineAll || !isBound(i)) changed += examine(i);
      }
      if (examineAll) {
        examineAll = false;
      } else if (changed == 0) {
        examineAll = true;
      }
    }
  }

  int examine(std::size_t i2) {
    const double r2 = errors_[i2] * y_[i2];
    if (!((r2 < -tol_ && alpha_[i2] < C_) || (r2 > tol_ && alpha_[i2] > 0.0))) return 0;

    // Second-choice heuristic: the non-bound sample maximizing |E1 - E2|;
    // the first such index wins ties.
    std::size_t best = n_;
    double bestGap = -1.0;
    for (std::size_t i = 0; i < n_; ++i) {
      if (isBound(i) || i == i2) continue;
      const double gap = std::fabs(errors_[i] - errors_[i2]);
      if (gap > bestGap) {
        bestGap = gap;
        best = i;
      }
    }
    if (best != n_ && takeStep(best, i2)) return 1;
    for (std::size_t i = 0; i < n_; ++i) {
      if (!isBound(i) && takeStep(i, i2)) return 1;
    }
    for (std::size_t i = 0; i < n_; ++i) {
      if (isBound(i) && takeStep(i, i2)) return 1;
    }
    return 0;
  }

  bool takeStep(std::size_t i1, std::size_t i2) {
    if (i1 == i2) return false;
    const double a1 = alpha_[i1];
    const double a2 = alpha_[i2];
    const double y1 = y_[i1];
    const double y2 = y_[i2];
    const double e1 = errors_[i1];
    const double e2 = errors_[i2];
    const double s = y1 * y2;

    double lo;
    double hi;
    if (y1 != y2) {
      lo = std::max(0.0, a2 - a1);
      hi = std::min(C_, C_ + a2 - a1);
    } else {
      lo = std::max(0.0, a1 + a2 - C_);
      hi = std::min(C_, a1 + a2);
    }
    if (lo >= hi) return false;

    const double k11 = kernel_(i1, i1);
    const double k12 = kernel_(i1, i2);
    const double k22 = kernel_(i2, i2);
    const double eta = k11 + k22 - 2.0 * k12;

    double a2new;
    if (eta > 0.0) {
      a2new = std::clamp(a2 + y2 * (e1 - e2) / eta, lo, hi);
    } else {
      // Objective at both ends of the segment.
      const double f1 = y1 * (e1 - bias_) - a1 * k11 - s * a2 * k12;
      const double f2 = y2 * (e2 - bias_) - s * a1 * k12 - a2 * k22;
      const double l1 = a1 + s * (a2 - lo);
      const double h1 = a1 + s * (a2 - hi);
      const double objLo = l1 * f1 + lo * f2 + 0.5 * l1 * l1 * k11 + 0.5 * lo * lo * k22 + s * lo * l1 * k12;
      const double objHi = h1 * f1 + hi * f2 + 0.5 * h1 * h1 * k11 + 0.5 * hi * hi * k22 + s * hi * h1 * k12;
      if (objLo < objHi - kStepEps) {
        a2new = lo;
      } else if (objLo > objHi + kStepEps) {
        a2new = hi;
      } else {
        a2new = a2;
      }
    }

    const double snap = kSnap * C_;
    if (a2new < snap) a2new = 0.0;
    if (a2new > C_ - snap) a2new = C_;
    if (std::fabs(a2new - a2) < kStepEps * (a2new + a2 + kStepEps)) return false;

    double a1new = a1 + s * (a2 - a2new);
    // Keep sum(alpha * y) fixed while pushing a1 back into the box.
    if (a1new < snap) {
      a2new += s * a1new;
      a1new = 0.0;
    } else if (a1new > C_ - snap) {
      a2new += s * (a1new - C_);
      a1new = C_;
    }
    a2new = std::clamp(a2new, 0.0, C_);
    if (a2new < snap) a2new = 0.0;
    if (a2new > C_ - snap) a2new = C_;

    const double d1 = y1 * (a1new - a1);
    const double d2 = y2 * (a2new - a2);
    const double b1 = bias_ - e1 - d1 * k11 - d2 * k12;
    const double b2 = bias_ - e2 - d1 * k12 - d2 * k22;
    double bnew;
    if (a1new > 0.0 && a1new < C_) {
      bnew = b1;
    } else if (a2new > 0.0 && a2new < C_) {
      bnew = b2;
    } else {
      bnew = 0.5 * (b1 + b2);
    }
    const double db = bnew - bias_;

    alpha_[i1] = a1new;
    alpha_[i2] = a2new;
    bias_ = bnew;
    for (std::size_t i = 0; i < n_; ++i) errors_[i] += d1 * kernel_(i1, i) + d2 * kernel_(i2, i) + db;

    if (++iterations_ >= maxIterations_) guardHit_ = true;
    return true;
  }

  static constexpr double kStepEps = 1e-12;
  static constexpr double kSnap = 1e-12;

  std::span<const int> y_;
  double C_;
  double tol_;
  std::size_t maxIterations_;
  KernelSource kernel_;
  std::size_t n_;
  std::vector<double> alpha_;
  std::vector<double> errors_;
  double bias_ = 0.0;
  std::size_t iterations_ = 0;
  bool guardHit_ = false;
};

}  // namespace

SmoResult solveSmo(const SampleMatrix& X, std::span<const int> y, const SvmConfig& cfg, double gamma) {
  cfg.validate();
  if (!(gamma > 0.0)) throw InvalidArgument("gamma must be positive");
  if (X.rows() != y.size()) throw InvalidArgument("sample and label counts differ");
  if (X.rows() < 2) throw InvalidArgument("SVM training needs at least 2 samples");
  bool hasPos = false;
  bool hasNeg = false;
  for (const int label : y) {
    if (label == 1) {
      hasPos = true;
    } else if (label == -1) {
      hasNeg = true;
    } else {
      throw InvalidArgument("binary SVM labels must be -1 or +1");
    }
  }
  if (!hasPos || !hasNeg) throw InvalidArgument("binary SVM training needs both classes present");

  SmoSolver solver(X, y, cfg, gamma);
  solver.run(cfg.maxPasses);
  SmoResult r = solver.result();
  r.gamma = gamma;
  r.model.bias = r.bias;
  r.model.gamma = gamma;
  for (std::size_t i = 0; i < X.rows(); ++i) {
    if (r.alphas[i] > 0.0) {
      r.model.supportVectors.emplace_back(X.row(i).begin(), X.row(i).end());
      r.model.dualCoefs.push_back(r.alphas[i] * y[i]);
    }
  }
  return r;
}

BinarySvm trainBinarySmo(const SampleMatrix& X, std::span<const int> y, const SvmConfig& cfg) {
  return solveSmo(X, y, cfg, resolveGamma(X, cfg)).model;
}

double maxKktViolation(const SmoResult& result, const SampleMatrix& X, std::span<const int> y, double C) {
  double worst = 0.0;
  for (std::size_t i = 0; i < X.rows(); ++i) {
    double f = result.bias;
    for (std::size_t j = 0; j < X.rows(); ++j) {
      if (result.alphas[j] > 0.0) f += result.alphas[j] * y[j] * rbfKernel(X.row(i), X.row(j), result.gamma);
    }
    const double r = y[i] * f - 1.0;
    const double a = result.alphas[i];
    const double v = a <= 0.0 ? std::max(0.0, -r) : a >= C ? std::max(0.0, r) : std::fabs(r);
    worst = std::max(worst, v);
  }
  return worst;
}

SvmModel trainMulticlass(const SampleMatrix& X, std::span<const long> labels, const SvmConfig& cfg) {
  cfg.validate();
  if (X.rows() != labels.size()) throw InvalidArgument("sample and label counts differ");
  const std::set<long> distinct(labels.begin(), labels.end());
  if (distinct.size() < 2) throw InvalidArgument("multiclass training needs at least 2 classes");

  SvmModel model;
  model.classes.assign(distinct.begin(), distinct.end());
  model.dimension = X.cols();
  model.gamma = resolveGamma(X, cfg);
  for (std::size_t a = 0; a < model.classes.size(); ++a) {
    for (std::size_t b = a + 1; b < model.classes.size(); ++b) {
      SampleMatrix sub;
      std::vector<int> y;
      for (std::size_t i = 0; i < X.rows(); ++i) {
        if (labels[i] == model.classes[a] || labels[i] == model.classes[b]) {
          sub.appendRow(X.row(i));
          y.push_back(labels[i] == model.classes[a] ? 1 : -1);
        }
      }
      SmoResult r = solveSmo(sub, y, cfg, model.gamma);
      model.converged = model.converged && r.converged;
      model.pairwiseModels.push_back(std::move(r.model));
    }
  }
  return model;
}

long predict(const SvmModel& model, std::span<const double> x) {
  if (x.size() != model.dimension) {
    throw InvalidArgument("sample has dimension " + std::to_string(x.size()) + ", model expects " +
                          std::to_string(model.dimension));
  }
  const std::size_t k = model.classes.size();
  std::vector<std::size_t> votes(k, 0);
  std::size_t pair = 0;
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      ++votes[model.pairwiseModels[pair++].decision(x) >= 0.0 ? a : b];
    }
  }
  // max_element returns the first maximum, i.e. the smallest class id.
  return model.classes[std::max_element(votes.begin(), votes.end()) - votes.begin()];
}

double evaluate(const SvmModel& model, const SampleMatrix& testX, std::span<const long> testLabels) {
  if (testX.rows() == 0) throw InvalidArgument("cannot evaluate on an empty test set");
  if (testX.rows() != testLabels.size()) throw InvalidArgument("sample and label counts differ");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < testX.rows(); ++i) correct += predict(model, testX.row(i)) == testLabels[i];
  return static_cast<double>(correct) / static_cast<double>(testX.rows());
}

namespace {

constexpr char kMagic[5] = {'L', 'S', 'V', 'M', '1'};

void writeLe(std::ostream& out, std::uint64_t v, int bytes) {
  char buf[8];
  for (int i = 0; i < bytes; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(buf, bytes);
}

std::uint64_t readLe(std::istream& in, int bytes) {
  unsigned char buf[8];
  if (!in.read(reinterpret_cast<char*>(buf), bytes)) throw ParseError("truncated SVM model file");
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

void writeF64(std::ostream& out, double v) { writeLe(out, std::bit_cast<std::uint64_t>(v), 8); }
double readF64(std::istream& in) { return std::bit_cast<double>(readLe(in, 8)); }

}  // namespace

void saveModel(const SvmModel& model, std::ostream& out) {
  out.write(kMagic, sizeof kMagic);
  writeLe(out, model.classes.size(), 4);
  writeLe(out, model.dimension, 4);
  writeF64(out, model.gamma);
  for (const long c : model.classes) writeLe(out, static_cast<std::uint64_t>(static_cast<std::int64_t>(c)), 8);
  for (const auto& m : model.pairwiseModels) {
    writeLe(out, m.supportVectors.size(), 4);
    writeF64(out, m.bias);
    for (std::size_t i = 0; i < m.supportVectors.size(); ++i) {
      writeF64(out, m.dualCoefs[i]);
      for (const double v : m.supportVectors[i]) writeF64(out, v);
    }
  }
  if (!out) throw Error("failed writing SVM model");
}

SvmModel loadModel(std::istream& in) {
  char magic[sizeof kMagic];
  if (!in.read(magic, sizeof magic) || !std::equal(magic, magic + sizeof magic, kMagic)) {
    throw ParseError("not an LSVM1 model file");
  }
  SvmModel model;
  const std::size_t k = readLe(in, 4);
  model.dimension = readLe(in, 4);
  model.gamma = readF64(in);
  if (k < 2) throw ParseError("model file lists fewer than 2 classes");
  for (std::size_t i = 0; i < k; ++i) model.classes.push_back(static_cast<long>(static_cast<std::int64_t>(readLe(in, 8))));
  for (std::size_t p = 0; p < k * (k - 1) / 2; ++p) {
    BinarySvm m;
    m.gamma = model.gamma;
    const std::size_t count = readLe(in, 4);
    m.bias = readF64(in);
    for (std::size_t i = 0; i < count; ++i) {
      m.dualCoefs.push_back(readF64(in));
      std::vector<double> sv(model.dimension);
      for (double& v : sv) v = readF64(in);
      m.supportVectors.push_back(std::move(sv));
    }
    model.pairwiseModels.push_back(std::move(m));
  }
  return model;
}

}  // namespace lamper
