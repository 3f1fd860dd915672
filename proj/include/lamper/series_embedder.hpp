#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lamper/cache.hpp"
#include "lamper/dataset.hpp"
#include "lamper/embedding.hpp"
#include "lamper/prompt.hpp"

namespace lamper {

struct EmbedOptions {
  RenderConfig render;
  Pooling pooling = Pooling::Mean;
  std::vector<std::string> featureNames = canonicalFeatureNames();
};

// Where a series lives; used only to build its cache key.
struct SeriesRef {
  std::string dataset;
  Split split = Split::Train;
  std::size_t index = 0;
};

/// Turns one series into one embedding for a prompt kind: build the
/// sub-prompts under the backend's token budget, embed them, pool.
class SeriesEmbedder {
 public:
  SeriesEmbedder(std::shared_ptr<const EmbeddingBackend> backend, EmbedOptions options,
                 std::shared_ptr<const EmbeddingCache> cache = nullptr);

  std::vector<SubPrompt> prompts(std::span<const double> values, PromptKind kind) const;

  // Uncached.
  Embedding embed(std::span<const double> values, PromptKind kind) const;
  // Served from the cache when present, stored otherwise.
  Embedding embed(std::span<const double> values, PromptKind kind, const SeriesRef& ref) const;

  std::string keyFor(std::span<const double> values, PromptKind kind, const SeriesRef& ref) const;

  const EmbeddingBackend& backend() const { return *backend_; }
  const EmbedOptions& options() const { return options_; }

 private:
  std::shared_ptr<const EmbeddingBackend> backend_;
  EmbedOptions options_;
  std::shared_ptr<const EmbeddingCache> cache_;
  BackendInfo info_;
};

}  // namespace lamper
