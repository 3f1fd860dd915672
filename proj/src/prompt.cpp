#include "lamper/prompt.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>

#include "lamper/errors.hpp"

namespace lamper {

std::string_view kindName(PromptKind kind) {
  switch (kind) {
    case PromptKind::SDP: return "SDP";
    case PromptKind::DDP: return "DDP";
    case PromptKind::FP: return "FP";
  }
  return "?";
}

PromptKind parseKind(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
  for (const PromptKind kind : kAllPromptKinds) {
    if (upper == kindName(kind)) return kind;
  }
  throw InvalidArgument("unknown prompt kind '" + std::string(name) + "'");
}

void RenderConfig::validate() const {
  if (precision < 0 || precision > 12) {
    throw InvalidArgument("precision must be in [0, 12], got " + std::to_string(precision));
  }
}

std::string formatValue(double x, const RenderConfig& cfg) {
  cfg.validate();
  if (!std::isfinite(x)) throw InvalidArgument("cannot render a non-finite value");
  // Shortest round-trip form, d.ddde[+-]XX, so the rounding below acts on
  // the decimal the value was written as.
  std::array<char, 64> buf;
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), std::fabs(x), std::chars_format::scientific);
  const std::string_view sci(buf.data(), ptr);
  const auto e = sci.find('e');
  std::string digits;
  for (const char c : sci.substr(0, e)) {
    if (c != '.') digits += c;
  }
  int exponent = 0;
  std::from_chars(sci.data() + e + 1 + (sci[e + 1] == '+'), sci.data() + sci.size(), exponent);

  // value = 0.<digits> * 10^(exponent + 1); keep the digits left of 10^-p.
  const long keep = static_cast<long>(exponent) + 1 + cfg.precision;
  std::string kept;
  if (keep > 0) {
    const auto take = std::min<std::size_t>(static_cast<std::size_t>(keep), digits.size());
    kept = digits.substr(0, take);
    const std::string rest = digits.substr(take);
    kept.append(static_cast<std::size_t>(keep) - take, '0');
    const bool tail = rest.size() > 1 && rest.find_first_not_of('0', 1) != std::string::npos;
    const bool odd = (kept.back() - '0') % 2 == 1;
    if (!rest.empty() && (rest[0] > '5' || (rest[0] == '5' && (tail || odd)))) {
      std::size_t i = kept.size();
      while (i > 0 && kept[i - 1] == '9') kept[--i] = '0';
      if (i == 0) {
        kept.insert(kept.begin(), '1');
      } else {
        ++kept[i - 1];
      }
    }
  } else if (keep == 0 && (digits[0] > '5' || (digits[0] == '5' && digits.find_first_not_of('0', 1) != std::string::npos))) {
    kept = "1";
  }
  const auto nonzero = kept.find_first_not_of('0');
  kept = nonzero == std::string::npos ? "" : kept.substr(nonzero);

  const auto p = static_cast<std::size_t>(cfg.precision);
  if (kept.size() <= p) kept.insert(0, p + 1 - kept.size(), '0');
  std::string out = kept.substr(0, kept.size() - p);
  if (p > 0) out += "." + kept.substr(kept.size() - p);
  if (std::signbit(x) && nonzero != std::string::npos) out.insert(0, "-");
  return out;
}

std::string joinValues(std::span<const double> values, const RenderConfig& cfg) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += cfg.valueSeparator;
    out += formatValue(values[i], cfg);
  }
  return out;
}

std::vector<std::span<const double>> sliceSeries(std::span<const double> values, std::size_t chunkLen) {
  if (chunkLen < 1) throw InvalidArgument("chunk length must be at least 1");
  if (values.empty()) throw InvalidArgument("cannot slice an empty series");
  std::vector<std::span<const double>> chunks;
  for (std::size_t start = 0; start < values.size(); start += chunkLen) {
    chunks.push_back(values.subspan(start, std::min(chunkLen, values.size() - start)));
  }
  return chunks;
}

std::string ordinal(std::size_t n) {
  const std::size_t lastTwo = n % 100;
  const char* suffix = "th";
  if (lastTwo < 11 || lastTwo > 13) {
    switch (n % 10) {
      case 1: suffix = "st"; break;
      case 2: suffix = "nd"; break;
      case 3: suffix = "rd"; break;
      default: break;
    }
  }
  return std::to_string(n) + suffix;
}

namespace {

std::string ddpText(std::size_t seriesLength, std::size_t chunkCount, std::size_t nominalLength, std::size_t index,
                    const std::string& renderedValues) {
  return "The length of time series is " + std::to_string(seriesLength) +
         ". The original time series is splited into " + std::to_string(chunkCount) +
         " sub-series, whose length is " + std::to_string(nominalLength) + ". The specific value of the " +
         ordinal(index + 1) + " sub-series are " + renderedValues + " in order.";
}

void requireChunkedKind(PromptKind kind) {
  if (kind == PromptKind::FP) throw InvalidArgument("FP prompts are not sliced by value");
}

bool allFit(const std::vector<SubPrompt>& prompts, std::size_t budget, const TokenCounter& counter) {
  return std::all_of(prompts.begin(), prompts.end(),
                     [&](const SubPrompt& p) { return counter(p.text) <= budget; });
}

}  // namespace

std::vector<SubPrompt> renderChunked(std::span<const double> values, PromptKind kind, std::size_t chunkLen,
                                     const RenderConfig& cfg) {
  requireChunkedKind(kind);
  const auto chunks = sliceSeries(values, chunkLen);
  const std::size_t nominal = std::min(chunkLen, values.size());
  std::vector<SubPrompt> out;
  out.reserve(chunks.size());
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    std::string rendered = joinValues(chunks[i], cfg);
    SubPrompt p{kind, i, chunks.size(), {}};
    p.text = kind == PromptKind::SDP ? std::move(rendered)
                                     : ddpText(values.size(), chunks.size(), nominal, i, rendered);
    out.push_back(std::move(p));
  }
  return out;
}

std::size_t computeChunkLen(std::span<const double> values, PromptKind kind, const RenderConfig& cfg,
                            std::size_t budget, const TokenCounter& counter) {
  requireChunkedKind(kind);
  cfg.validate();
  if (values.empty()) throw InvalidArgument("cannot slice an empty series");

  const std::string emptyTemplate = kind == PromptKind::SDP ? std::string{} : ddpText(values.size(), 1, 0, 0, "");
  if (counter(emptyTemplate) >= budget) {
    throw BudgetError("prompt template alone needs the whole budget of " + std::to_string(budget) + " tokens");
  }
  const auto fits = [&](std::size_t len) { return allFit(renderChunked(values, kind, len, cfg), budget, counter); };

  if (!fits(1)) throw BudgetError("no chunk length fits within " + std::to_string(budget) + " tokens");
  std::size_t lo = 1;  // fits(lo) holds
  std::size_t hi = values.size();
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo + 1) / 2;
    if (fits(mid)) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  return lo;
}

std::vector<SubPrompt> buildSdp(std::span<const double> values, const RenderConfig& cfg, std::size_t budget,
                                const TokenCounter& counter) {
  return renderChunked(values, PromptKind::SDP, computeChunkLen(values, PromptKind::SDP, cfg, budget, counter), cfg);
}

std::vector<SubPrompt> buildDdp(std::span<const double> values, const RenderConfig& cfg, std::size_t budget,
                                const TokenCounter& counter) {
  return renderChunked(values, PromptKind::DDP, computeChunkLen(values, PromptKind::DDP, cfg, budget, counter), cfg);
}

std::string renderFpText(std::span<const Feature> features, const RenderConfig& cfg) {
  std::string text = std::to_string(features.size()) + " features of the time series are extracted via tsfresh";
  for (const auto& f : features) {
    text += ", the feature of " + f.name + " is " + formatValue(f.value, cfg);
  }
  text += '.';
  return text;
}

std::vector<SubPrompt> buildFp(const FeatureVector& features, const RenderConfig& cfg, std::size_t budget,
                               const TokenCounter& counter) {
  cfg.validate();
  if (features.empty()) throw InvalidArgument("cannot build a feature prompt without features");
  const std::span<const Feature> all(features.entries);

  std::vector<std::string> texts;
  std::size_t start = 0;
  while (start < all.size()) {
    std::size_t count = 1;
    std::string text = renderFpText(all.subspan(start, 1), cfg);
    if (counter(text) > budget) {
      throw BudgetError("feature clause '" + all[start].name + "' alone exceeds " + std::to_string(budget) + " tokens");
    }
    while (start + count < all.size()) {
      std::string longer = renderFpText(all.subspan(start, count + 1), cfg);
      if (counter(longer) > budget) break;
      text = std::move(longer);
      ++count;
    }
    texts.push_back(std::move(text));
    start += count;
  }

  std::vector<SubPrompt> out;
  for (std::size_t i = 0; i < texts.size(); ++i) out.push_back({PromptKind::FP, i, texts.size(), std::move(texts[i])});
  return out;
}

}  // namespace lamper
