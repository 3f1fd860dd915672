#include "lamper/embedding.hpp"

#include <algorithm>
#include <cmath>

#include "lamper/errors.hpp"

namespace lamper {

std::size_t EmbeddingBackend::countTokens(std::string_view text) const {
  const std::string owned(text);
  return countTokens(std::span<const std::string>(&owned, 1)).front();
}

std::vector<Embedding> EmbeddingBackend::embedTexts(std::span<const std::string> texts) const {
  if (texts.empty()) return {};
  const BackendInfo meta = info();
  const auto counts = countTokens(texts);
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (counts[i] > meta.maxTokens) {
      throw BudgetError("text " + std::to_string(i) + " needs " + std::to_string(counts[i]) + " tokens, " +
                        meta.modelName + " accepts " + std::to_string(meta.maxTokens));
    }
  }
  auto out = embedWithinBudget(texts);
  if (out.size() != texts.size()) throw BackendError("backend returned a different number of embeddings");
  for (const auto& e : out) {
    if (e.size() != meta.dimension) throw BackendError("backend returned an embedding of the wrong dimension");
    if (!std::all_of(e.begin(), e.end(), [](double x) { return std::isfinite(x); })) {
      throw BackendError("backend returned a non-finite embedding");
    }
  }
  return out;
}

TokenCounter EmbeddingBackend::counter() const {
  return [this](std::string_view text) { return countTokens(text); };
}

std::uint64_t fnv1a64(std::string_view data, std::uint64_t state) {
  for (const unsigned char c : data) {
    state ^= c;
    state *= 0x100000001b3ULL;
  }
  return state;
}

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

Embedding mockEmbed(std::string_view text, std::size_t dimension, std::uint64_t seed) {
  if (dimension < 1) throw InvalidArgument("embedding dimension must be at least 1");
  char seedBytes[8];
  for (int i = 0; i < 8; ++i) seedBytes[i] = static_cast<char>((seed >> (8 * i)) & 0xff);
  std::uint64_t state = fnv1a64(text, fnv1a64(std::string_view(seedBytes, 8)));

  Embedding e(dimension);
  double norm2 = 0.0;
  for (double& x : e) {
    // 53 random bits -> [-1, 1)
    x = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-52 - 1.0;
    norm2 += x * x;
  }
  if (norm2 == 0.0) {
    e.front() = 1.0;
    return e;
  }
  const double norm = std::sqrt(norm2);
  for (double& x : e) x /= norm;
  return e;
}

bool isValidUtf8(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size()) {
    const auto c = static_cast<unsigned char>(text[i]);
    std::size_t extra = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xe0) == 0xc0) {
      extra = 1;
      cp = c & 0x1f;
    } else if ((c & 0xf0) == 0xe0) {
      extra = 2;
      cp = c & 0x0f;
    } else if ((c & 0xf8) == 0xf0) {
      extra = 3;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + extra >= text.size()) return false;
    for (std::size_t k = 1; k <= extra; ++k) {
      const auto cc = static_cast<unsigned char>(text[i + k]);
      if ((cc & 0xc0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3f);
    }
    static constexpr std::uint32_t kMin[] = {0, 0x80, 0x800, 0x10000};
    if (cp < kMin[extra] || cp > 0x10ffff || (cp >= 0xd800 && cp <= 0xdfff)) return false;
    i += extra + 1;
  }
  return true;
}

MockBackend::MockBackend(std::size_t dimension, std::uint64_t seed, std::size_t maxTokens)
    : info_{"mock-d" + std::to_string(dimension) + "-s" + std::to_string(seed), maxTokens, dimension}, seed_(seed) {
  if (dimension < 1) throw InvalidArgument("mock dimension must be at least 1");
  if (maxTokens <= kSpecialTokens) throw InvalidArgument("mock max_tokens must exceed the special-token overhead");
}

std::size_t MockBackend::countMockTokens(std::string_view text) {
  if (!isValidUtf8(text)) throw InvalidArgument("malformed UTF-8 text");
  std::size_t pieces = 0;
  bool inPiece = false;
  for (const char c : text) {
    const bool space = c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
    if (!space && !inPiece) ++pieces;
    inPiece = !space;
  }
  return kSpecialTokens + pieces;
}

std::vector<std::size_t> MockBackend::countTokens(std::span<const std::string> texts) const {
  std::vector<std::size_t> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(countMockTokens(t));
  return out;
}

std::vector<Embedding> MockBackend::embedWithinBudget(std::span<const std::string> texts) const {
  std::vector<Embedding> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(mockEmbed(t, info_.dimension, seed_));
  return out;
}

class InstrumentedBackend::Slot {
 public:
  explicit Slot(const InstrumentedBackend& owner) : owner_(owner) {
    std::unique_lock lock(owner_.mutex_);
    owner_.cv_.wait(lock, [&] { return owner_.inFlight_ < owner_.maxConcurrent_; });
    ++owner_.inFlight_;
    if (owner_.inFlight_ > owner_.peakInFlight_.load()) owner_.peakInFlight_.store(owner_.inFlight_);
  }
  ~Slot() {
    {
      std::lock_guard lock(owner_.mutex_);
      --owner_.inFlight_;
    }
    owner_.cv_.notify_one();
  }
  Slot(const Slot&) = delete;
  Slot& operator=(const Slot&) = delete;

 private:
  const InstrumentedBackend& owner_;
};

InstrumentedBackend::InstrumentedBackend(std::shared_ptr<const EmbeddingBackend> inner, std::size_t maxConcurrent)
    : inner_(std::move(inner)), maxConcurrent_(maxConcurrent) {
  if (!inner_) throw InvalidArgument("instrumented backend needs an inner backend");
  if (maxConcurrent_ < 1) throw InvalidArgument("concurrency cap must be at least 1");
}

std::vector<std::size_t> InstrumentedBackend::countTokens(std::span<const std::string> texts) const {
  Slot slot(*this);
  return inner_->countTokens(texts);
}

std::vector<Embedding> InstrumentedBackend::embedWithinBudget(std::span<const std::string> texts) const {
  Slot slot(*this);
  ++embedCalls_;
  textsEmbedded_ += texts.size();
  for (const auto n : inner_->countTokens(texts)) {
    std::size_t seen = maxSubmittedTokens_.load();
    while (n > seen && !maxSubmittedTokens_.compare_exchange_weak(seen, n)) {
    }
  }
  return inner_->embedTexts(texts);
}

std::string_view poolingName(Pooling pooling) { return pooling == Pooling::Mean ? "mean" : "max"; }

Pooling parsePooling(std::string_view name) {
  if (name == "mean") return Pooling::Mean;
  if (name == "max") return Pooling::Max;
  throw InvalidArgument("unknown pooling '" + std::string(name) + "'");
}

namespace {

std::size_t commonDimension(std::span<const Embedding> embeddings) {
  if (embeddings.empty()) throw InvalidArgument("cannot pool an empty list of embeddings");
  const std::size_t dim = embeddings.front().size();
  for (const auto& e : embeddings) {
    if (e.size() != dim) throw InvalidArgument("cannot pool embeddings of different dimensions");
  }
  return dim;
}

}  // namespace

Embedding meanPool(std::span<const Embedding> embeddings) {
  const std::size_t dim = commonDimension(embeddings);
  if (embeddings.size() == 1) return embeddings.front();
  Embedding out(dim, 0.0);
  // Sum in a fixed (sorted) order per component so the result does not
  // depend on the order of the inputs.
  std::vector<double> column(embeddings.size());
  for (std::size_t d = 0; d < dim; ++d) {
    for (std::size_t i = 0; i < embeddings.size(); ++i) column[i] = embeddings[i][d];
    std::sort(column.begin(), column.end());
    double sum = 0.0;
    for (const double x : column) sum += x;
    out[d] = sum / static_cast<double>(embeddings.size());
  }
  return out;
}

Embedding maxPool(std::span<const Embedding> embeddings) {
  const std::size_t dim = commonDimension(embeddings);
  Embedding out = embeddings.front();
  for (const auto& e : embeddings.subspan(1)) {
    for (std::size_t d = 0; d < dim; ++d) out[d] = std::max(out[d], e[d]);
  }
  return out;
}

Embedding pool(std::span<const Embedding> embeddings, Pooling pooling) {
  return pooling == Pooling::Mean ? meanPool(embeddings) : maxPool(embeddings);
}

Embedding fuse(std::vector<std::pair<PromptKind, Embedding>> parts) {
  if (parts.empty()) throw InvalidArgument("cannot fuse an empty list of embeddings");
  std::sort(parts.begin(), parts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 1; i < parts.size(); ++i) {
    if (parts[i].first == parts[i - 1].first) {
      throw InvalidArgument("duplicate prompt kind " + std::string(kindName(parts[i].first)) + " in fusion");
    }
  }
  Embedding out;
  for (const auto& [kind, e] : parts) out.insert(out.end(), e.begin(), e.end());
  return out;
}

Embedding l2Normalize(Embedding e) {
  double norm2 = 0.0;
  for (const double x : e) norm2 += x * x;
  if (norm2 == 0.0) return e;
  const double norm = std::sqrt(norm2);
  for (double& x : e) x /= norm;
  return e;
}

}  // namespace lamper
