#include "lamper/cache.hpp"

#include <openssl/evp.h>
#include <unistd.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <thread>

#include "lamper/errors.hpp"

namespace lamper {

namespace fs = std::filesystem;

namespace {

void appendField(std::string& out, std::string_view field) {
  out += std::to_string(field.size());
  out += ':';
  out += field;
  out += '|';
}

std::string sha256Hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    hex += kHex[digest[i] >> 4];
    hex += kHex[digest[i] & 0xf];
  }
  return hex;
}

void putLe(std::string& out, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out += static_cast<char>((v >> (8 * i)) & 0xff);
}

std::uint64_t getLe(std::string_view in, std::size_t offset, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[offset + i])) << (8 * i);
  return v;
}

}  // namespace

std::string cacheKey(const CacheKeyFields& f) {
  if (f.datasetName.empty() || f.modelName.empty()) {
    throw InvalidArgument("cache key needs a dataset name and a model name");
  }
  std::string material = "lamper-embedding-v1|";
  appendField(material, f.datasetName);
  appendField(material, splitName(f.split));
  appendField(material, std::to_string(f.seriesIndex));
  appendField(material, kindName(f.kind));
  appendField(material, f.modelName);
  appendField(material, std::to_string(f.render.precision));
  appendField(material, f.render.valueSeparator);
  appendField(material, f.variant);
  return sha256Hex(material);
}

std::string encodeEmbeddingRecord(std::span<const double> e) {
  std::string out;
  out.reserve(4 + 8 * e.size());
  putLe(out, e.size(), 4);
  for (const double x : e) putLe(out, std::bit_cast<std::uint64_t>(x), 8);
  return out;
}

Embedding decodeEmbeddingRecord(std::string_view bytes) {
  if (bytes.size() < 4) throw ParseError("embedding record shorter than its header");
  const std::size_t dim = getLe(bytes, 0, 4);
  if (bytes.size() != 4 + 8 * dim) throw ParseError("embedding record length does not match its dimension");
  Embedding e(dim);
  for (std::size_t i = 0; i < dim; ++i) e[i] = std::bit_cast<double>(getLe(bytes, 4 + 8 * i, 8));
  return e;
}

EmbeddingCache::EmbeddingCache(fs::path directory) : directory_(std::move(directory)) {
  std::error_code ec;
  fs::create_directories(*directory_, ec);
  if (ec) throw Error("cannot create cache directory " + directory_->string() + ": " + ec.message());
}

fs::path EmbeddingCache::recordPath(const std::string& key) const {
  return *directory_ / key.substr(0, 2) / (key + ".emb");
}

std::optional<Embedding> EmbeddingCache::load(const std::string& key) const {
  if (!directory_) {
    std::lock_guard lock(mutex_);
    const auto it = memory_.find(key);
    if (it == memory_.end()) {
      ++misses_;
      return std::nullopt;
    }
    ++hits_;
    return it->second;
  }
  std::ifstream in(recordPath(key), std::ios::binary);
  if (!in) {
    ++misses_;
    return std::nullopt;
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    auto e = decodeEmbeddingRecord(buffer.str());
    ++hits_;
    return e;
  } catch (const ParseError&) {
    // Truncated or foreign file: treat as absent, it will be rewritten.
    ++misses_;
    return std::nullopt;
  }
}

void EmbeddingCache::store(const std::string& key, std::span<const double> e) const {
  if (!directory_) {
    std::lock_guard lock(mutex_);
    memory_.insert_or_assign(key, Embedding(e.begin(), e.end()));
    return;
  }
  const fs::path target = recordPath(key);
  std::error_code ec;
  fs::create_directories(target.parent_path(), ec);
  if (ec) throw Error("cannot create " + target.parent_path().string() + ": " + ec.message());

  std::ostringstream tmpName;
  static std::atomic<unsigned> sequence{0};
  tmpName << key << ".tmp." << ::getpid() << '.' << std::this_thread::get_id() << '.' << sequence++;
  const fs::path tmp = target.parent_path() / tmpName.str();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    const std::string record = encodeEmbeddingRecord(e);
    out.write(record.data(), static_cast<std::streamsize>(record.size()));
    if (!out) throw Error("cannot write cache record " + tmp.string());
  }
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error("cannot publish cache record " + target.string() + ": " + ec.message());
  }
}

void EmbeddingCache::resetCounters() const {
  hits_ = 0;
  misses_ = 0;
}

}  // namespace lamper
