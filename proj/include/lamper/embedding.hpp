#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lamper/prompt.hpp"

namespace lamper {

using Embedding = std::vector<double>;

struct BackendInfo {
  std::string modelName;
  std::size_t maxTokens = 0;
  std::size_t dimension = 0;
};

/// A text encoder. Implementations must accept concurrent calls.
///
/// embedTexts() is the only way to reach the encoder: it counts every text
/// first and raises BudgetError before anything over `maxTokens` is
/// submitted.
class EmbeddingBackend {
 public:
  virtual ~EmbeddingBackend() = default;

  virtual BackendInfo info() const = 0;
  virtual std::vector<std::size_t> countTokens(std::span<const std::string> texts) const = 0;
  std::size_t countTokens(std::string_view text) const;

  std::vector<Embedding> embedTexts(std::span<const std::string> texts) const;

  // Token counter bound to this backend, for the prompt builders.
  TokenCounter counter() const;

 protected:
  virtual std::vector<Embedding> embedWithinBudget(std::span<const std::string> texts) const = 0;
};

// Stable FNV-1a over the bytes of `data`, continuing from `state`.
std::uint64_t fnv1a64(std::string_view data, std::uint64_t state = 0xcbf29ce484222325ULL);

/// Deterministic unit-norm pseudo-embedding of `text`: a splitmix64 stream
/// seeded by a 64-bit hash of (seed, text), mapped to [-1, 1) and
/// normalized. Identical on every platform.
Embedding mockEmbed(std::string_view text, std::size_t dimension, std::uint64_t seed);

bool isValidUtf8(std::string_view text);

/// Test double: counts 2 special tokens plus one per whitespace-delimited
/// piece and embeds with mockEmbed().
class MockBackend final : public EmbeddingBackend {
 public:
  static constexpr std::size_t kSpecialTokens = 2;

  MockBackend(std::size_t dimension, std::uint64_t seed, std::size_t maxTokens = 512);

  BackendInfo info() const override { return info_; }
  using EmbeddingBackend::countTokens;
  std::vector<std::size_t> countTokens(std::span<const std::string> texts) const override;
  static std::size_t countMockTokens(std::string_view text);

 protected:
  std::vector<Embedding> embedWithinBudget(std::span<const std::string> texts) const override;

 private:
  BackendInfo info_;
  std::uint64_t seed_;
};

struct HttpBackendOptions {
  std::string endpoint;  // e.g. http://127.0.0.1:8000
  std::size_t batchSize = 16;
  int retries = 3;
  int backoffMillis = 200;  // doubled after every failed attempt
  int timeoutSeconds = 300;
};

/// Client for the embedding wire protocol (/info, /count_tokens, /embed).
/// Fetches /info on construction. Transport failures and 5xx responses are
/// retried with exponential backoff before surfacing as BackendError; a 400
/// is reported immediately.
class HttpBackend final : public EmbeddingBackend {
 public:
  explicit HttpBackend(HttpBackendOptions options);

  BackendInfo info() const override { return info_; }
  using EmbeddingBackend::countTokens;
  std::vector<std::size_t> countTokens(std::span<const std::string> texts) const override;

 protected:
  std::vector<Embedding> embedWithinBudget(std::span<const std::string> texts) const override;

 private:
  std::string request(const std::string& method, const std::string& path, const std::string& body) const;

  HttpBackendOptions options_;
  std::string host_;
  BackendInfo info_;
};

/// Wraps a backend, caps simultaneous requests at `maxConcurrent`, and
/// records what was submitted.
class InstrumentedBackend final : public EmbeddingBackend {
 public:
  InstrumentedBackend(std::shared_ptr<const EmbeddingBackend> inner, std::size_t maxConcurrent);

  BackendInfo info() const override { return inner_->info(); }
  using EmbeddingBackend::countTokens;
  std::vector<std::size_t> countTokens(std::span<const std::string> texts) const override;

  std::size_t embedCalls() const { return embedCalls_.load(); }
  std::size_t textsEmbedded() const { return textsEmbedded_.load(); }
  std::size_t maxSubmittedTokens() const { return maxSubmittedTokens_.load(); }
  std::size_t peakConcurrency() const { return peakInFlight_.load(); }

 protected:
  std::vector<Embedding> embedWithinBudget(std::span<const std::string> texts) const override;

 private:
  class Slot;

  std::shared_ptr<const EmbeddingBackend> inner_;
  std::size_t maxConcurrent_;
  mutable std::mutex mutex_;
  mutable std::condition_variable cv_;
  mutable std::size_t inFlight_ = 0;
  mutable std::atomic<std::size_t> peakInFlight_{0};
  mutable std::atomic<std::size_t> embedCalls_{0};
  mutable std::atomic<std::size_t> textsEmbedded_{0};
  mutable std::atomic<std::size_t> maxSubmittedTokens_{0};
};

enum class Pooling { Mean, Max };

std::string_view poolingName(Pooling pooling);
Pooling parsePooling(std::string_view name);

Embedding meanPool(std::span<const Embedding> embeddings);
Embedding maxPool(std::span<const Embedding> embeddings);
Embedding pool(std::span<const Embedding> embeddings, Pooling pooling);

/// Concatenates the parts in SDP, DDP, FP order regardless of input order.
Embedding fuse(std::vector<std::pair<PromptKind, Embedding>> parts);

// Unit L2 norm; zero vectors are returned unchanged.
Embedding l2Normalize(Embedding e);

}  // namespace lamper
