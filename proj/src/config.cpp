#include "lamper/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "lamper/errors.hpp"
#include "lamper/features.hpp"

namespace lamper {

namespace fs = std::filesystem;

std::string fusionName(const std::vector<PromptKind>& kinds) {
  if (kinds.size() == std::size(kAllPromptKinds)) return "Fusion";
  std::string name;
  for (const PromptKind k : kinds) name += (name.empty() ? "" : "+") + std::string(kindName(k));
  return name;
}

std::vector<MethodSpec> RunConfig::methods() const {
  std::vector<MethodSpec> out;
  for (const PromptKind k : promptKinds) out.push_back({std::string(kindName(k)), k});
  for (const auto& set : fusionSets) out.push_back({fusionName(set), set});
  if (includeRawTsBenchmark) out.push_back({"TS", RawSeriesSource{}});
  return out;
}

std::vector<PromptKind> RunConfig::requiredKinds() const {
  std::set<PromptKind> kinds(promptKinds.begin(), promptKinds.end());
  for (const auto& set : fusionSets) kinds.insert(set.begin(), set.end());
  return {kinds.begin(), kinds.end()};
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> splitList(const std::string& value, char sep) {
  std::vector<std::string> items;
  std::string current;
  std::istringstream in(value);
  while (std::getline(in, current, sep)) {
    current = trim(current);
    if (!current.empty()) items.push_back(current);
  }
  return items;
}

class Parser {
 public:
  Parser(RunConfig& cfg, const fs::path& baseDir) : cfg_(cfg), baseDir_(baseDir) { registerKeys(); }

  void parse(std::string_view text) {
    std::string section;
    std::set<std::string> seen;
    std::istringstream in{std::string(text)};
    std::string raw;
    line_ = 0;
    while (std::getline(in, raw)) {
      ++line_;
      const std::string line = trim(stripComment(raw));
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']') fail("malformed section header '" + line + "'");
        section = trim(std::string_view(line).substr(1, line.size() - 2));
        if (section.empty()) fail("empty section name");
        if (section != "render" && section != "mock" && section != "http" && section != "svm") {
          fail("unknown section '[" + section + "]'");
        }
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) fail("expected 'key = value', got '" + line + "'");
      const std::string key = trim(std::string_view(line).substr(0, eq));
      const std::string full = section.empty() ? key : section + "." + key;
      const std::string value = unquote(trim(std::string_view(line).substr(eq + 1)));
      const auto it = setters_.find(full);
      if (it == setters_.end()) fail("unknown key '" + full + "'");
      if (!seen.insert(full).second) fail("duplicate key '" + full + "'");
      try {
        it->second(value);
      } catch (const ConfigError&) {
        throw;
      } catch (const Error& e) {
        fail("invalid value for '" + full + "': " + e.what());
      }
    }
    line_ = 0;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const { throw ConfigError(message, line_); }

  // '#' starts a comment unless inside double quotes.
  static std::string_view stripComment(std::string_view line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) return line.substr(0, i);
    }
    return line;
  }

  std::string unquote(const std::string& value) const {
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') return value.substr(1, value.size() - 2);
    if (!value.empty() && value.front() == '"') fail("unterminated quoted value");
    return value;
  }

  template <typename T>
  T number(const std::string& value) const {
    T out{};
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size()) fail("expected a number, got '" + value + "'");
    return out;
  }

  std::size_t positive(const std::string& value) const {
    const auto v = number<long long>(value);
    if (v < 1) fail("expected a positive integer, got '" + value + "'");
    return static_cast<std::size_t>(v);
  }

  bool boolean(const std::string& value) const {
    if (value == "true" || value == "yes" || value == "on" || value == "1") return true;
    if (value == "false" || value == "no" || value == "off" || value == "0") return false;
    fail("expected true or false, got '" + value + "'");
  }

  fs::path path(const std::string& value) const {
    if (value.empty()) fail("empty path");
    fs::path p(value);
    return p.is_relative() && !baseDir_.empty() ? baseDir_ / p : p;
  }

  void registerKeys() {
    auto& c = cfg_;
    setters_ = {
        {"dataset_root", [&](const std::string& v) { c.datasetRoot = path(v); }},
        {"datasets", [&](const std::string& v) { c.datasetFilter = splitList(v, ','); }},
        {"output_dir", [&](const std::string& v) { c.outputDir = path(v); }},
        {"cache_dir", [&](const std::string& v) { c.cacheDir = path(v); }},
        {"concurrency", [&](const std::string& v) { c.concurrency = positive(v); }},
        {"prompt_kinds",
         [&](const std::string& v) {
           c.promptKinds.clear();
           for (const auto& item : splitList(v, ',')) {
             const PromptKind k = parseKind(item);
             if (std::find(c.promptKinds.begin(), c.promptKinds.end(), k) != c.promptKinds.end()) {
               fail("prompt kind '" + item + "' listed twice");
             }
             c.promptKinds.push_back(k);
           }
         }},
        {"fusion_sets",
         [&](const std::string& v) {
           c.fusionSets.clear();
           for (const auto& item : splitList(v, ',')) {
             std::set<PromptKind> kinds;
             for (const auto& part : splitList(item, '+')) {
               if (!kinds.insert(parseKind(part)).second) fail("fusion set '" + item + "' repeats a kind");
             }
             if (kinds.size() < 2) fail("fusion set '" + item + "' needs at least two kinds");
             std::vector<PromptKind> set(kinds.begin(), kinds.end());
             if (std::find(c.fusionSets.begin(), c.fusionSets.end(), set) != c.fusionSets.end()) {
               fail("fusion set '" + item + "' listed twice");
             }
             c.fusionSets.push_back(std::move(set));
           }
         }},
        {"raw_ts_benchmark", [&](const std::string& v) { c.includeRawTsBenchmark = boolean(v); }},
        {"normalize_series", [&](const std::string& v) { c.normalizeSeries = boolean(v); }},
        {"normalize_embeddings", [&](const std::string& v) { c.normalizeEmbeddings = boolean(v); }},
        {"pooling", [&](const std::string& v) { c.pooling = parsePooling(v); }},
        {"features",
         [&](const std::string& v) {
           c.featureNames = splitList(v, ',');
           if (c.featureNames.empty()) fail("feature list is empty");
           const auto& known = availableFeatureNames();
           std::set<std::string> unique;
           for (const auto& name : c.featureNames) {
             if (std::find(known.begin(), known.end(), name) == known.end()) fail("unknown feature '" + name + "'");
             if (!unique.insert(name).second) fail("feature '" + name + "' listed twice");
           }
         }},
        {"backend",
         [&](const std::string& v) {
           if (v == "mock") {
             c.backend.kind = BackendKind::Mock;
           } else if (v == "http") {
             c.backend.kind = BackendKind::Http;
           } else {
             fail("backend must be 'mock' or 'http', got '" + v + "'");
           }
         }},
        {"endpoint", [&](const std::string& v) { c.backend.endpoint = v; }},
        {"render.precision",
         [&](const std::string& v) {
           c.render.precision = number<int>(v);
           c.render.validate();
         }},
        {"render.separator",
         [&](const std::string& v) {
           if (v.empty()) fail("value separator must not be empty");
           c.render.valueSeparator = v;
         }},
        {"mock.dimension", [&](const std::string& v) { c.backend.mockDimension = positive(v); }},
        {"mock.seed", [&](const std::string& v) { c.backend.mockSeed = number<std::uint64_t>(v); }},
        {"mock.max_tokens",
         [&](const std::string& v) {
           c.backend.mockMaxTokens = positive(v);
           if (c.backend.mockMaxTokens <= MockBackend::kSpecialTokens) fail("mock.max_tokens is too small");
         }},
        {"http.batch_size", [&](const std::string& v) { c.backend.batchSize = positive(v); }},
        {"http.retries",
         [&](const std::string& v) {
           c.backend.retries = number<int>(v);
           if (c.backend.retries < 0) fail("http.retries must be nonnegative");
         }},
        {"svm.c",
         [&](const std::string& v) {
           c.svm.C = number<double>(v);
           if (!(c.svm.C > 0.0)) fail("svm.c must be positive");
         }},
        {"svm.gamma",
         [&](const std::string& v) {
           if (v == "scale") {
             c.svm.gamma.reset();
             return;
           }
           c.svm.gamma = number<double>(v);
           if (!(*c.svm.gamma > 0.0)) fail("svm.gamma must be positive or 'scale'");
         }},
        {"svm.tolerance",
         [&](const std::string& v) {
           c.svm.tolerance = number<double>(v);
           if (!(c.svm.tolerance > 0.0)) fail("svm.tolerance must be positive");
         }},
        {"svm.max_passes", [&](const std::string& v) { c.svm.maxPasses = static_cast<int>(positive(v)); }},
        {"svm.max_iterations", [&](const std::string& v) { c.svm.maxIterations = positive(v); }},
    };
  }

  RunConfig& cfg_;
  fs::path baseDir_;
  std::size_t line_ = 0;
  std::map<std::string, std::function<void(const std::string&)>> setters_;
};

}  // namespace

RunConfig validateConfig(std::string_view text, const fs::path& baseDir) {
  RunConfig cfg;
  cfg.promptKinds.assign(std::begin(kAllPromptKinds), std::end(kAllPromptKinds));
  cfg.fusionSets = {{PromptKind::SDP, PromptKind::DDP},
                    {PromptKind::SDP, PromptKind::FP},
                    {PromptKind::DDP, PromptKind::FP},
                    {PromptKind::SDP, PromptKind::DDP, PromptKind::FP}};
  cfg.featureNames = canonicalFeatureNames();
  if (!baseDir.empty()) cfg.outputDir = baseDir / cfg.outputDir;

  Parser(cfg, baseDir).parse(text);

  if (cfg.datasetRoot.empty()) throw ConfigError("missing required key 'dataset_root'");
  if (cfg.backend.kind == BackendKind::Http && cfg.backend.endpoint.empty()) {
    throw ConfigError("backend 'http' needs an 'endpoint'");
  }
  if (cfg.cacheDir.empty()) cfg.cacheDir = cfg.outputDir / "cache";
  const auto methods = cfg.methods();
  if (methods.size() < 2) throw ConfigError("a run needs at least two methods to rank");
  std::set<std::string> names;
  for (const auto& m : methods) {
    if (!names.insert(m.name).second) throw ConfigError("method '" + m.name + "' is declared twice");
  }
  return cfg;
}

RunConfig loadConfig(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return validateConfig(buffer.str(), path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

}  // namespace lamper
