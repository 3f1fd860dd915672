#include <chrono>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "lamper/embedding.hpp"
#include "lamper/errors.hpp"

namespace lamper {

using json = nlohmann::json;

namespace {

// Splits "http://host:port/prefix" into ("http://host:port", "/prefix").
std::pair<std::string, std::string> splitEndpoint(const std::string& endpoint) {
  const auto scheme = endpoint.find("://");
  if (scheme == std::string::npos) throw InvalidArgument("endpoint must start with http:// : '" + endpoint + "'");
  const auto slash = endpoint.find('/', scheme + 3);
  if (slash == std::string::npos) return {endpoint, ""};
  std::string prefix = endpoint.substr(slash);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {endpoint.substr(0, slash), prefix};
}

json parseBody(const std::string& body, const char* what) {
  try {
    return json::parse(body);
  } catch (const json::exception& e) {
    throw BackendError(std::string("malformed ") + what + " response: " + e.what());
  }
}

}  // namespace

HttpBackend::HttpBackend(HttpBackendOptions options) : options_(std::move(options)) {
  if (options_.batchSize < 1) throw InvalidArgument("batch size must be at least 1");
  if (options_.retries < 0) throw InvalidArgument("retries must be nonnegative");
  std::string prefix;
  std::tie(host_, prefix) = splitEndpoint(options_.endpoint);
  options_.endpoint = prefix;

  const json doc = parseBody(request("GET", "/info", ""), "/info");
  try {
    info_.modelName = doc.at("model").get<std::string>();
    info_.maxTokens = doc.at("max_tokens").get<std::size_t>();
    info_.dimension = doc.at("dimension").get<std::size_t>();
  } catch (const json::exception& e) {
    throw BackendError(std::string("malformed /info response: ") + e.what());
  }
  if (info_.maxTokens == 0 || info_.dimension == 0) throw BackendError("/info reports a zero budget or dimension");
}

std::string HttpBackend::request(const std::string& method, const std::string& path, const std::string& body) const {
  const std::string target = options_.endpoint + path;
  std::string lastError;
  int delay = options_.backoffMillis;
  for (int attempt = 0; attempt <= options_.retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(delay));
      delay *= 2;
    }
    httplib::Client client(host_);
    client.set_connection_timeout(10);
    client.set_read_timeout(options_.timeoutSeconds);
    client.set_write_timeout(options_.timeoutSeconds);
    auto res = method == "GET" ? client.Get(target) : client.Post(target, body, "application/json");
    if (!res) {
      lastError = httplib::to_string(res.error());
      continue;
    }
    if (res->status == 200) return res->body;
    if (res->status == 400) {
      std::string message = res->body;
      try {
        message = json::parse(res->body).at("error").get<std::string>();
      } catch (const json::exception&) {
      }
      throw BudgetError(path + " rejected the request: " + message);
    }
    lastError = "HTTP " + std::to_string(res->status);
  }
  throw BackendError(method + " " + host_ + target + " failed after " + std::to_string(options_.retries + 1) +
                     " attempts: " + lastError);
}

std::vector<std::size_t> HttpBackend::countTokens(std::span<const std::string> texts) const {
  std::vector<std::size_t> out;
  out.reserve(texts.size());
  for (std::size_t start = 0; start < texts.size(); start += options_.batchSize) {
    const auto batch = texts.subspan(start, std::min(options_.batchSize, texts.size() - start));
    json req = {{"texts", json::array()}};
    for (const auto& t : batch) {
      if (!isValidUtf8(t)) throw InvalidArgument("malformed UTF-8 text");
      req["texts"].push_back(t);
    }
    const json doc = parseBody(request("POST", "/count_tokens", req.dump()), "/count_tokens");
    try {
      const auto& counts = doc.at("counts");
      if (counts.size() != batch.size()) throw BackendError("/count_tokens returned the wrong number of counts");
      for (const auto& c : counts) out.push_back(c.get<std::size_t>());
    } catch (const json::exception& e) {
      throw BackendError(std::string("malformed /count_tokens response: ") + e.what());
    }
  }
  return out;
}

std::vector<Embedding> HttpBackend::embedWithinBudget(std::span<const std::string> texts) const {
  std::vector<Embedding> out;
  out.reserve(texts.size());
  for (std::size_t start = 0; start < texts.size(); start += options_.batchSize) {
    const auto batch = texts.subspan(start, std::min(options_.batchSize, texts.size() - start));
    json req = {{"texts", json::array()}};
    for (const auto& t : batch) req["texts"].push_back(t);
    const json doc = parseBody(request("POST", "/embed", req.dump()), "/embed");
    try {
      const auto& rows = doc.at("embeddings");
      if (rows.size() != batch.size()) throw BackendError("/embed returned the wrong number of embeddings");
      for (const auto& row : rows) {
        out.push_back(row.get<Embedding>());
        if (out.back().size() != info_.dimension) throw BackendError("/embed returned a vector of the wrong dimension");
      }
    } catch (const json::exception& e) {
      throw BackendError(std::string("malformed /embed response: ") + e.what());
    }
  }
  return out;
}

}  // namespace lamper
