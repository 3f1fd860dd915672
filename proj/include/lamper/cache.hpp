#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>

#include "lamper/dataset.hpp"
#include "lamper/embedding.hpp"
#include "lamper/prompt.hpp"

namespace lamper {

struct CacheKeyFields {
  std::string datasetName;
  Split split = Split::Train;
  std::size_t seriesIndex = 0;
  PromptKind kind = PromptKind::SDP;
  std::string modelName;
  RenderConfig render;
  // Anything else the embedding depends on (pooling, feature list, a hash
  // of the series values).
  std::string variant;
};

/// Hex SHA-256 over a length-prefixed encoding of every field.
std::string cacheKey(const CacheKeyFields& fields);

// Record layout: little-endian uint32 dimension, then dimension float64s.
std::string encodeEmbeddingRecord(std::span<const double> e);
Embedding decodeEmbeddingRecord(std::string_view bytes);

/// Embedding store keyed by cacheKey(). With a directory, one record file
/// per key written through a temp file and rename, so concurrent writers
/// of one key are harmless. Without one, entries live in memory.
class EmbeddingCache {
 public:
  EmbeddingCache() = default;
  explicit EmbeddingCache(std::filesystem::path directory);

  std::optional<Embedding> load(const std::string& key) const;
  void store(const std::string& key, std::span<const double> e) const;

  std::size_t hits() const { return hits_.load(); }
  std::size_t misses() const { return misses_.load(); }
  void resetCounters() const;

  const std::optional<std::filesystem::path>& directory() const { return directory_; }

 private:
  std::filesystem::path recordPath(const std::string& key) const;

  std::optional<std::filesystem::path> directory_;
  mutable std::mutex mutex_;
  mutable std::map<std::string, Embedding> memory_;
  mutable std::atomic<std::size_t> hits_{0};
  mutable std::atomic<std::size_t> misses_{0};
};

}  // namespace lamper
