#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lamper/features.hpp"

namespace lamper {

enum class PromptKind { SDP, DDP, FP };

inline constexpr PromptKind kAllPromptKinds[] = {PromptKind::SDP, PromptKind::DDP, PromptKind::FP};

std::string_view kindName(PromptKind kind);
// Case-insensitive; throws InvalidArgument on anything else.
PromptKind parseKind(std::string_view name);

struct SubPrompt {
  PromptKind kind = PromptKind::SDP;
  std::size_t index = 0;
  std::size_t total = 0;
  std::string text;
};

struct RenderConfig {
  int precision = 4;
  std::string valueSeparator = ", ";

  void validate() const;
};

// Number of tokens a backend would spend on a text, special tokens included.
using TokenCounter = std::function<std::size_t(std::string_view)>;

/// Fixed-point, exactly `precision` fractional digits, no exponent. Rounds
/// half-to-even on the shortest decimal that round-trips to `x` (so
/// -0.00005 is a tie and renders as 0.0000). A rendering of negative zero
/// drops the sign.
std::string formatValue(double x, const RenderConfig& cfg);

std::string joinValues(std::span<const double> values, const RenderConfig& cfg);

/// Contiguous chunks of `chunkLen` values; the last may be shorter.
std::vector<std::span<const double>> sliceSeries(std::span<const double> values, std::size_t chunkLen);

// 1 -> "1st", 2 -> "2nd", 11 -> "11th", 22 -> "22nd"
std::string ordinal(std::size_t n);

/// Renders SDP or DDP sub-prompts for a fixed chunk length, without any
/// budget check.
std::vector<SubPrompt> renderChunked(std::span<const double> values, PromptKind kind, std::size_t chunkLen,
                                     const RenderConfig& cfg);

/// Largest chunk length whose every rendered sub-prompt fits `budget`
/// according to `counter`. Binary search over [1, n]; each candidate is
/// checked by rendering all of its chunks. Throws BudgetError when not
/// even a single-value chunk fits. SDP and DDP only.
std::size_t computeChunkLen(std::span<const double> values, PromptKind kind, const RenderConfig& cfg,
                            std::size_t budget, const TokenCounter& counter);

std::vector<SubPrompt> buildSdp(std::span<const double> values, const RenderConfig& cfg, std::size_t budget,
                                const TokenCounter& counter);
std::vector<SubPrompt> buildDdp(std::span<const double> values, const RenderConfig& cfg, std::size_t budget,
                                const TokenCounter& counter);

/// Renders the features into as few sub-prompts as fit, packing clauses
/// greedily in order. Each sub-prompt repeats the head with its own count.
std::vector<SubPrompt> buildFp(const FeatureVector& features, const RenderConfig& cfg, std::size_t budget,
                               const TokenCounter& counter);

// Single FP sub-prompt holding every given feature.
std::string renderFpText(std::span<const Feature> features, const RenderConfig& cfg);

}  // namespace lamper
