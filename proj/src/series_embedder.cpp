#include "lamper/series_embedder.hpp"

#include <bit>
#include <cstdio>

#include "lamper/errors.hpp"
#include "lamper/features.hpp"

namespace lamper {

SeriesEmbedder::SeriesEmbedder(std::shared_ptr<const EmbeddingBackend> backend, EmbedOptions options,
                               std::shared_ptr<const EmbeddingCache> cache)
    : backend_(std::move(backend)), options_(std::move(options)), cache_(std::move(cache)) {
  if (!backend_) throw InvalidArgument("series embedder needs a backend");
  options_.render.validate();
  info_ = backend_->info();
}

std::vector<SubPrompt> SeriesEmbedder::prompts(std::span<const double> values, PromptKind kind) const {
  const TokenCounter counter = backend_->counter();
  switch (kind) {
    case PromptKind::SDP: return buildSdp(values, options_.render, info_.maxTokens, counter);
    case PromptKind::DDP: return buildDdp(values, options_.render, info_.maxTokens, counter);
    case PromptKind::FP:
      return buildFp(extractFeatures(values, options_.featureNames), options_.render, info_.maxTokens, counter);
  }
  throw InvalidArgument("unknown prompt kind");
}

Embedding SeriesEmbedder::embed(std::span<const double> values, PromptKind kind) const {
  std::vector<std::string> texts;
  for (auto& p : prompts(values, kind)) texts.push_back(std::move(p.text));
  const auto parts = backend_->embedTexts(texts);
  return pool(parts, options_.pooling);
}

std::string SeriesEmbedder::keyFor(std::span<const double> values, PromptKind kind, const SeriesRef& ref) const {
  std::uint64_t valuesHash = 0xcbf29ce484222325ULL;
  for (const double v : values) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
    valuesHash = fnv1a64(std::string_view(bytes, 8), valuesHash);
  }
  char hashHex[17];
  std::snprintf(hashHex, sizeof hashHex, "%016llx", static_cast<unsigned long long>(valuesHash));

  std::string variant = "pool=" + std::string(poolingName(options_.pooling)) + ";n=" + std::to_string(values.size()) +
                        ";values=" + hashHex + ";max_tokens=" + std::to_string(info_.maxTokens);
  if (kind == PromptKind::FP) {
    variant += ";features=";
    for (const auto& name : options_.featureNames) variant += name + ",";
  }
  return cacheKey({ref.dataset, ref.split, ref.index, kind, info_.modelName, options_.render, variant});
}

Embedding SeriesEmbedder::embed(std::span<const double> values, PromptKind kind, const SeriesRef& ref) const {
  if (!cache_) return embed(values, kind);
  const std::string key = keyFor(values, kind, ref);
  if (auto hit = cache_->load(key)) return std::move(*hit);
  Embedding e = embed(values, kind);
  cache_->store(key, e);
  return e;
}

}  // namespace lamper
